#include "tubelet/features.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubelet {

std::vector<ByteImage> motion_neighborhood_counts(const IMotionMap& binary) {
  if (binary.stage != IMotionStage::binary)
    throw std::invalid_argument("motion_neighborhood_counts: map must be binary");
  const int w = binary.width(), h = binary.height(), fcount = binary.frame_count();

  // separable zero-padded box sums: x (5), y (5), t (3)
  std::vector<Image<std::uint16_t>> sx(static_cast<std::size_t>(fcount));
  for (int t = 0; t < fcount; ++t) {
    const ByteImage& f = binary.frames[static_cast<std::size_t>(t)];
    Image<std::uint16_t>& o = sx[static_cast<std::size_t>(t)];
    o.setZero(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        std::uint16_t s = 0;
        for (int i = -2; i <= 2; ++i)
          if (x + i >= 0 && x + i < w) s += f(y, x + i);
        o(y, x) = s;
      }
  }
  std::vector<Image<std::uint16_t>> sxy(static_cast<std::size_t>(fcount));
  for (int t = 0; t < fcount; ++t) {
    Image<std::uint16_t>& o = sxy[static_cast<std::size_t>(t)];
    o.setZero(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        std::uint16_t s = 0;
        for (int i = -2; i <= 2; ++i)
          if (y + i >= 0 && y + i < h) s += sx[static_cast<std::size_t>(t)](y + i, x);
        o(y, x) = s;
      }
  }
  std::vector<ByteImage> out(static_cast<std::size_t>(fcount));
  for (int t = 0; t < fcount; ++t) {
    ByteImage& o = out[static_cast<std::size_t>(t)];
    o.setZero(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int s = 0;
        for (int i = -1; i <= 1; ++i)
          if (t + i >= 0 && t + i < fcount) s += sxy[static_cast<std::size_t>(t + i)](y, x);
        o(y, x) = static_cast<std::uint8_t>(s);
      }
  }
  return out;
}

FeatureVolume compute_features(const VideoVolume& rgb, const IMotionMap& binary,
                               const FeatureBins& bins) {
  if (rgb.frame_count() != binary.frame_count() || rgb.width != binary.width() ||
      rgb.height != binary.height())
    throw std::invalid_argument("compute_features: video/map geometry mismatch");

  FeatureVolume fv;
  fv.width = rgb.width;
  fv.height = rgb.height;
  fv.frames = rgb.frame_count();
  fv.bins = bins;
  fv.motion_count = motion_neighborhood_counts(binary);

  const VideoVolume hsv = rgb.channel_count() == 3 ? to_hsv(rgb) : rgb;
  const int cch = hsv.channel_count();
  fv.color_bin.assign(static_cast<std::size_t>(cch), {});
  for (int c = 0; c < cch; ++c) {
    auto& frames = fv.color_bin[static_cast<std::size_t>(c)];
    frames.reserve(static_cast<std::size_t>(fv.frames));
    for (int t = 0; t < fv.frames; ++t) {
      const ByteImage& ch = hsv.frames[static_cast<std::size_t>(t)].channels[static_cast<std::size_t>(c)];
      ByteImage b(fv.height, fv.width);
      for (int y = 0; y < fv.height; ++y)
        for (int x = 0; x < fv.width; ++x)
          b(y, x) = static_cast<std::uint8_t>(
              std::min(ch(y, x) * bins.color_bins_per_channel / 256, bins.color_bins_per_channel - 1));
      frames.push_back(std::move(b));
    }
  }

  const int tch = rgb.channel_count();
  fv.texture_bin.assign(static_cast<std::size_t>(tch), {});
  const double pi = std::numbers::pi;
  for (int c = 0; c < tch; ++c) {
    auto& frames = fv.texture_bin[static_cast<std::size_t>(c)];
    frames.reserve(static_cast<std::size_t>(fv.frames));
    for (int t = 0; t < fv.frames; ++t) {
      const ByteImage& ch = rgb.frames[static_cast<std::size_t>(t)].channels[static_cast<std::size_t>(c)];
      ByteImage b(fv.height, fv.width);
      for (int y = 0; y < fv.height; ++y)
        for (int x = 0; x < fv.width; ++x) {
          const double gx = 0.5 * (ch(y, std::min(x + 1, fv.width - 1)) -
                                   ch(y, std::max(x - 1, 0)));
          const double gy = 0.5 * (ch(std::min(y + 1, fv.height - 1), x) -
                                   ch(std::max(y - 1, 0), x));
          double ang = std::atan2(gy, gx);  // map to [0, pi): unsigned orientation
          if (ang < 0) ang += pi;
          if (ang >= pi) ang = 0.0;
          const int ob = std::min(static_cast<int>(ang / pi * bins.texture_orientations),
                                  bins.texture_orientations - 1);
          const double mag = std::hypot(gx, gy);  // <= ~180 for 8-bit input
          const int mb = std::min(static_cast<int>(mag / 128.0 * bins.texture_magnitudes),
                                  bins.texture_magnitudes - 1);
          b(y, x) = static_cast<std::uint8_t>(ob * bins.texture_magnitudes + mb);
        }
      frames.push_back(std::move(b));
    }
  }
  return fv;
}

}  // namespace tubelet
