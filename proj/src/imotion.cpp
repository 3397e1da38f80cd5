#include "tubelet/imotion.hpp"

#include <cmath>
#include <stdexcept>

namespace tubelet {

ByteImage evidence_frame(const FloatImage& weights, const ByteImage& valid) {
  ByteImage out(weights.rows(), weights.cols());
  for (Eigen::Index y = 0; y < weights.rows(); ++y)
    for (Eigen::Index x = 0; x < weights.cols(); ++x) {
      if (!valid(y, x)) {
        out(y, x) = 0;
        continue;
      }
      const double xi = 1.0 - static_cast<double>(weights(y, x));
      out(y, x) = static_cast<std::uint8_t>(std::lround(std::clamp(xi, 0.0, 1.0) * 255.0));
    }
  return out;
}

IMotionMap evidence_map(const std::vector<MotionEstimate>& estimates) {
  IMotionMap m;
  m.stage = IMotionStage::raw;
  m.frames.reserve(estimates.size());
  for (const MotionEstimate& e : estimates) m.frames.push_back(evidence_frame(e.weights, e.valid));
  return m;
}

namespace {

template <bool Max>
ByteImage rank_filter(const ByteImage& img, int radius) {
  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  const std::uint8_t neutral = Max ? 0 : 255;
  // separable: rows then columns
  ByteImage tmp(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = neutral;
      for (int i = -radius; i <= radius; ++i) {
        const int xi = x + i;
        const std::uint8_t s = (xi < 0 || xi >= w) ? neutral : img(y, xi);
        v = Max ? std::max(v, s) : std::min(v, s);
      }
      tmp(y, x) = v;
    }
  ByteImage out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = neutral;
      for (int i = -radius; i <= radius; ++i) {
        const int yi = y + i;
        const std::uint8_t s = (yi < 0 || yi >= h) ? neutral : tmp(yi, x);
        v = Max ? std::max(v, s) : std::min(v, s);
      }
      out(y, x) = v;
    }
  return out;
}

}  // namespace

ByteImage dilate(const ByteImage& img, int radius) { return rank_filter<true>(img, radius); }
ByteImage erode(const ByteImage& img, int radius) { return rank_filter<false>(img, radius); }

IMotionMap close_map(const IMotionMap& m, int se_radius) {
  if (se_radius < 1) throw std::invalid_argument("close_map: se_radius must be >= 1");
  IMotionMap out;
  out.stage = IMotionStage::closed;
  out.frames.reserve(m.frames.size());
  for (const ByteImage& f : m.frames) out.frames.push_back(erode(dilate(f, se_radius), se_radius));
  return out;
}

IMotionMap binarize(const IMotionMap& m, int tau) {
  IMotionMap out;
  out.stage = IMotionStage::binary;
  out.frames.reserve(m.frames.size());
  for (const ByteImage& f : m.frames) {
    ByteImage b(f.rows(), f.cols());
    for (Eigen::Index y = 0; y < f.rows(); ++y)
      for (Eigen::Index x = 0; x < f.cols(); ++x) b(y, x) = f(y, x) > tau ? 1 : 0;
    out.frames.push_back(std::move(b));
  }
  return out;
}

IMotionMap compute_imotion(const VideoVolume& gray, const RobustConfig& cfg, int se_radius) {
  if (gray.frame_count() < 2) throw VideoError("compute_imotion: need at least 2 frames");
  if (gray.channel_count() != 1) throw VideoError("compute_imotion: input must be grayscale");
  std::vector<MotionEstimate> est;
  est.reserve(static_cast<std::size_t>(gray.frame_count()) - 1);
  for (int t = 0; t + 1 < gray.frame_count(); ++t)
    est.push_back(estimate_dominant_motion(gray.frames[static_cast<std::size_t>(t)].channels[0],
                                           gray.frames[static_cast<std::size_t>(t) + 1].channels[0],
                                           cfg));
  IMotionMap raw = evidence_map(est);
  raw.frames.push_back(raw.frames.back());  // one map per frame
  return close_map(raw, se_radius);
}

VideoVolume as_video(const IMotionMap& m) {
  VideoVolume v;
  v.width = m.width();
  v.height = m.height();
  v.frames.reserve(m.frames.size());
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    Frame f;
    f.index = static_cast<int>(i);
    f.channels = {m.frames[i]};
    v.frames.push_back(std::move(f));
  }
  return v;
}

}  // namespace tubelet
