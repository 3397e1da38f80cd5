#pragma once

#include "tubelet/trajectory.hpp"
#include "tubelet/types.hpp"

#include <cstdint>
#include <vector>

namespace tubelet {

struct RefineConfig {
  int motion_keep_p = 50;         // P
  double overlap_threshold = 0.8;
  int target_segments = 15;       // temporal clusters
  int min_length = 30;            // frames; shorter sub-tubelets are dropped
  double pad_fraction = 0.05;     // N = pad_fraction * frame width
  std::uint64_t seed = 0;         // k-means seeding
};

enum class PipelineMode { trimmed, untrimmed };

/// Keeps the top P proposals by trajectory count plus the top 10 percent
/// (floor) of the remainder. Applies to vid-sourced proposals only;
/// iMotion-sourced proposals pass through. Output preserves input order.
std::vector<Tubelet> motion_prune(const std::vector<Tubelet>& pool, int keep_p);

/// Greedy scan in descending traj_total order; a proposal is kept iff its
/// localization score with every already kept one is <= theta.
std::vector<Tubelet> overlap_prune(const std::vector<Tubelet>& pool, double theta);

/// Clusters per-box (relative location, relative motion content) pairs,
/// splits clusters into contiguous runs, and emits runs of at least
/// min_length frames. Returns the input unchanged when the profile is all
/// zero.
std::vector<Tubelet> temporal_refine(const Tubelet& t, const RefineConfig& cfg);

/// Clamps boxes to the member-trajectory extent padded by pad pixels, then
/// smooths the x/y/width/height series by weighted local linear regression
/// with a triangular kernel over max(3, round(B/5)) frames.
Tubelet spatial_refine(const Tubelet& t, const std::vector<Trajectory>& trajs, int pad,
                       int frame_width, int frame_height);

/// Full pruning + refinement chain. trimmed:
///   motion_prune(vid) u imotion -> overlap_prune -> spatial_refine.
/// untrimmed:
///   vid: motion_prune -> overlap_prune -> temporal_refine -> overlap_prune;
///   imotion: overlap_prune; then union and spatial_refine.
std::vector<Tubelet> refine_pipeline(std::vector<Tubelet> pool_vid,
                                     std::vector<Tubelet> pool_imotion,
                                     const std::vector<Trajectory>& trajs, PipelineMode mode,
                                     const RefineConfig& cfg, int frame_width, int frame_height);

}  // namespace tubelet
