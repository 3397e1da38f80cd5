#pragma once

#include "tubelet/config.hpp"
#include "tubelet/imotion.hpp"
#include "tubelet/segmentation.hpp"
#include "tubelet/video.hpp"

#include <vector>

namespace tubelet {

/// Intermediate artifacts of one proposal run on a single video.
struct ProposalRun {
  IMotionMap imotion;      // closed maps, one per frame
  IMotionMap binary;       // binarized maps
  VoxelLabeling seg_vid;
  VoxelLabeling seg_imotion;
  std::vector<Tubelet> proposals_vid;      // union set over grouping functions
  std::vector<Tubelet> proposals_imotion;
};

/// motion -> iMotion -> both segmentations -> grouping functions -> union.
ProposalRun propose(const VideoVolume& video, const PipelineConfig& cfg);

/// propose + trajectory extraction + pruning/refinement.
std::vector<Tubelet> run_full(const VideoVolume& video, const PipelineConfig& cfg);

}  // namespace tubelet
