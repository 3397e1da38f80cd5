#pragma once

#include "tubelet/types.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubelet {

struct VideoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One decoded frame; channels are planar rasters of identical shape.
/// 3 channels = RGB, 1 channel = grayscale.
struct Frame {
  int index = 0;
  std::vector<ByteImage> channels;

  int width() const { return channels.empty() ? 0 : static_cast<int>(channels[0].cols()); }
  int height() const { return channels.empty() ? 0 : static_cast<int>(channels[0].rows()); }
};

/// A decoded frame sequence. Immutable after load; safe to share across
/// threads.
struct VideoVolume {
  int width = 0;
  int height = 0;
  std::vector<Frame> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int channel_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].channels.size()); }
  std::int64_t voxel_count() const {
    return static_cast<std::int64_t>(width) * height * frame_count();
  }
};

enum class VideoFormat { image_dir, y4m };

/// Loads a frame sequence. image_dir expects equally sized PNG or PPM frames
/// with zero-padded numeric stems; y4m expects an uncompressed YUV4MPEG2
/// stream (C420 or C444).
VideoVolume load_video(const std::filesystem::path& path, VideoFormat format);

/// gray = round(0.299 R + 0.587 G + 0.114 B), clamped to [0,255].
VideoVolume to_grayscale(const VideoVolume& v);

/// Hexcone HSV; H in [0,360) scaled to [0,255], S and V in [0,255].
VideoVolume to_hsv(const VideoVolume& v);

ByteImage rgb_to_gray(const ByteImage& r, const ByteImage& g, const ByteImage& b);

/// Writes frames as PNG files named <prefix>NNNNNN.png under dir.
void save_video(const VideoVolume& v, const std::filesystem::path& dir,
                const std::string& prefix = "");

struct OverlayBox {
  int frame = 0;
  BoundingBox box;
  std::uint8_t r = 255, g = 0, b = 0;
};

/// Copies v to dir with 2-px box outlines drawn in list order.
void render_overlay(const VideoVolume& v, const std::vector<OverlayBox>& boxes,
                    const std::filesystem::path& dir);

// PNG/PPM single-image helpers used by IO and the debug exports.
void write_png(const std::filesystem::path& path, const std::vector<ByteImage>& channels);
std::vector<ByteImage> read_png(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ByteImage& r, const ByteImage& g,
               const ByteImage& b);

}  // namespace tubelet
