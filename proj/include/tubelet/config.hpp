#pragma once

#include "tubelet/features.hpp"
#include "tubelet/grouping.hpp"
#include "tubelet/motion.hpp"
#include "tubelet/refine.hpp"
#include "tubelet/segmentation.hpp"
#include "tubelet/trajectory.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tubelet {

/// All pipeline constants; defaults are the standard operating point
/// (segmentation sigma 0.5, c 200, smin 500, P 50, overlap 0.8, min length
/// 30, ~15 temporal segments, N = 5% of frame width, eval sigma 0.5).
struct PipelineConfig {
  RobustConfig motion;
  int imotion_se_radius = 2;
  int imotion_binarize_tau = 0;
  SegmentationConfig segment_vid;
  SegmentationConfig segment_imotion;
  std::vector<std::string> grouping_functions = {"motion", "fill", "motion+size+fill",
                                                 "all-but-motion", "all"};
  GroupingConfig grouping;
  FeatureBins features;
  TrackConfig track;
  RefineConfig refine;
  double eval_sigma = 0.5;
  PipelineMode mode = PipelineMode::trimmed;
  int threads = 0;  // 0: hardware concurrency
};

/// Parses a [section] key = value config file. Unknown sections or keys are
/// hard errors. '#' starts a comment.
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one dotted key, e.g. "refine.p" = "50". Throws on unknown keys.
void apply_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Environment overrides: TUBELET_<SECTION>_<KEY> (dots and dashes become
/// underscores, uppercased).
void apply_env_overrides(PipelineConfig& cfg);

}  // namespace tubelet
