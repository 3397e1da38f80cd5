#pragma once

#include "tubelet/motion.hpp"
#include "tubelet/types.hpp"
#include "tubelet/video.hpp"

#include <vector>

namespace tubelet {

enum class IMotionStage { raw, closed, binary };

/// Per-frame independent-motion evidence xi(p,t) = 1 - psi(r)/r, quantized to
/// 8 bits (xi * 255, rounded). Binary stage holds only {0,1}.
struct IMotionMap {
  IMotionStage stage = IMotionStage::raw;
  std::vector<ByteImage> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int width() const { return frames.empty() ? 0 : static_cast<int>(frames[0].cols()); }
  int height() const { return frames.empty() ? 0 : static_cast<int>(frames[0].rows()); }
};

/// xi = 1 - w pointwise; invalid pixels carry xi = 0.
ByteImage evidence_frame(const FloatImage& weights, const ByteImage& valid);
IMotionMap evidence_map(const std::vector<MotionEstimate>& estimates);

// Grayscale morphology with a square structuring element of side 2*radius+1.
// Samples outside the frame take the operation's neutral value.
ByteImage dilate(const ByteImage& img, int radius);
ByteImage erode(const ByteImage& img, int radius);

/// Dilation followed by erosion, per frame.
IMotionMap close_map(const IMotionMap& m, int se_radius);

/// 1 where value > tau else 0. tau = 0 implements the all-non-zero rule.
IMotionMap binarize(const IMotionMap& m, int tau = 0);

/// Full per-video evidence pipeline: dominant motion on consecutive grayscale
/// frame pairs, evidence, closing. The last frame reuses the preceding pair's
/// map so the sequence has one map per frame.
IMotionMap compute_imotion(const VideoVolume& gray, const RobustConfig& cfg, int se_radius);

VideoVolume as_video(const IMotionMap& m);

}  // namespace tubelet
