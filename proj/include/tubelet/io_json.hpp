#pragma once

#include "tubelet/eval.hpp"
#include "tubelet/trajectory.hpp"
#include "tubelet/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tubelet {

inline constexpr int kSchemaVersion = 1;

/// Proposal artifact:
/// {"schema_version":1, "proposals":[{"source":..,"grouping_fn":..,
///   "refinement":..,"traj_total":..,"frames":[{"t":..,"x_min":..,...}]}]}
void write_proposals(const std::filesystem::path& path, const std::vector<Tubelet>& proposals);
std::vector<Tubelet> read_proposals(const std::filesystem::path& path);

/// Ground truth: [{"video":..,"class":..,"frames":[{"t":..,"x_min":..,...}]}]
std::vector<GroundTruthInstance> read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthInstance>& gts);

/// One JSON object per line: {"start_frame":..,"points":[[x,y],...]}
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajs);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

/// Recall as a function of sigma, CSV with header sigma,mean_recall.
void write_recall_curve_csv(const std::filesystem::path& path,
                            const std::vector<GroundTruthInstance>& gts,
                            const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                            const std::vector<double>& sigmas);

}  // namespace tubelet
