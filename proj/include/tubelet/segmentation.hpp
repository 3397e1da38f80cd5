#pragma once

#include "tubelet/types.hpp"
#include "tubelet/video.hpp"

#include <vector>

namespace tubelet {

struct SegmentationConfig {
  double smoothing_sigma = 0.5;    // per-channel spatial Gaussian
  double merge_threshold_c = 200;  // FH threshold constant
  std::int64_t min_segment_size = 500;  // smin, in voxels
  int connectivity = 6;            // 6 or 26
};

/// Dense labeling of a video volume; labels in [0, label_count), each label's
/// voxel set connected under the configured connectivity.
struct VoxelLabeling {
  int width = 0, height = 0;
  std::vector<LabelImage> frames;
  int label_count = 0;

  int frame_count() const { return static_cast<int>(frames.size()); }
  std::int64_t voxel_count() const {
    return static_cast<std::int64_t>(width) * height * frame_count();
  }
  std::int32_t label(int x, int y, int t) const {
    return frames[static_cast<std::size_t>(t)](y, x);
  }
};

struct LabelStats {
  std::int64_t size = 0;  // voxels
  int t_begin = 0, t_end = -1;
  std::vector<BoundingBox> boxes;  // one per frame in [t_begin, t_end]

  BoundingBox box_at(int t) const {
    if (t < t_begin || t > t_end) return {};
    return boxes[static_cast<std::size_t>(t - t_begin)];
  }
};

/// Felzenszwalb-Huttenlocher criterion on the space-time lattice. Edge weight
/// is Euclidean distance in the smoothed channels (absolute difference for
/// single-channel input); temporal edges weighted identically to spatial ones.
VoxelLabeling segment(const VideoVolume& v, const SegmentationConfig& cfg);

std::vector<LabelStats> label_stats(const VoxelLabeling& l);

/// Spatial Gaussian smoothing of one channel (applied per frame).
FloatImage gaussian_smooth(const FloatImage& img, double sigma);

}  // namespace tubelet
