#pragma once

#include "tubelet/imotion.hpp"
#include "tubelet/types.hpp"
#include "tubelet/video.hpp"

#include <vector>

namespace tubelet {

struct FeatureBins {
  int color_bins_per_channel = 25;  // HSV
  int texture_orientations = 8;
  int texture_magnitudes = 10;
};

/// Per-voxel quantized features shared by all grouping runs. Region
/// histograms are plain bin counts over these rasters, so propagated
/// histograms can be checked against from-scratch recomputation.
struct FeatureVolume {
  int width = 0, height = 0, frames = 0;
  FeatureBins bins;

  // ones count in the 5x5x3 neighborhood of the binary iMotion map, 0..75
  std::vector<ByteImage> motion_count;
  // HSV bin per channel
  std::vector<std::vector<ByteImage>> color_bin;    // [channel][frame]
  // orientation*magnitudes + magnitude bin per RGB channel
  std::vector<std::vector<ByteImage>> texture_bin;  // [channel][frame]

  int motion_bins() const { return 76; }
  int color_channels() const { return static_cast<int>(color_bin.size()); }
  int texture_channels() const { return static_cast<int>(texture_bin.size()); }
  int color_bins() const { return color_channels() * bins.color_bins_per_channel; }
  int texture_bins() const {
    return texture_channels() * bins.texture_orientations * bins.texture_magnitudes;
  }
};

/// Zero-padded ones count over 5x5x3 neighborhoods of a binary map.
std::vector<ByteImage> motion_neighborhood_counts(const IMotionMap& binary);

FeatureVolume compute_features(const VideoVolume& rgb, const IMotionMap& binary,
                               const FeatureBins& bins = {});

}  // namespace tubelet
