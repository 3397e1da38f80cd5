#include "tubelet/video.hpp"

#include "synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace tubelet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tubelet_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ByteImage solid(int w, int h, std::uint8_t v) { return ByteImage::Constant(h, w, v); }

}  // namespace

TEST_CASE("load_video from a PNG directory") {
  const fs::path dir = temp_dir("load_png");
  for (int i = 0; i < 3; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%03d.png", i);
    write_png(dir / name, {solid(32, 24, 10), solid(32, 24, 20), solid(32, 24, 30)});
  }
  const VideoVolume v = load_video(dir, VideoFormat::image_dir);
  CHECK(v.width == 32);
  CHECK(v.height == 24);
  CHECK(v.frame_count() == 3);
  CHECK(v.frames[1].index == 1);
  CHECK(v.frames[0].channels[0](0, 0) == 10);
  CHECK(v.frames[0].channels[2](23, 31) == 30);
}

TEST_CASE("load_video rejects inconsistent frame sizes with the frame index") {
  const fs::path dir = temp_dir("load_bad");
  write_png(dir / "000.png", {solid(32, 24, 1)});
  write_png(dir / "001.png", {solid(16, 16, 1)});
  write_png(dir / "002.png", {solid(32, 24, 1)});
  CHECK_THROWS_WITH_AS(load_video(dir, VideoFormat::image_dir),
                       doctest::Contains("inconsistent frame size at index 1"), VideoError);
}

TEST_CASE("load_video missing path") {
  CHECK_THROWS_AS(load_video("/nonexistent/path/xyz", VideoFormat::image_dir), VideoError);
}

TEST_CASE("y4m decode matches a reference decode") {
  const fs::path dir = temp_dir("y4m");
  const fs::path file = dir / "clip.y4m";
  const int w = 8, h = 6, n = 10;
  // reference YCbCr planes, C444 so there is no chroma resampling ambiguity
  std::vector<std::vector<std::uint8_t>> Y(n), Cb(n), Cr(n);
  {
    std::ofstream out(file, std::ios::binary);
    out << "YUV4MPEG2 W8 H6 F25:1 Ip A1:1 C444\n";
    for (int t = 0; t < n; ++t) {
      out << "FRAME\n";
      for (int k = 0; k < w * h; ++k) Y[t].push_back(static_cast<std::uint8_t>(16 + (k * 3 + t * 7) % 220));
      for (int k = 0; k < w * h; ++k) Cb[t].push_back(static_cast<std::uint8_t>(40 + (k + t) % 160));
      for (int k = 0; k < w * h; ++k) Cr[t].push_back(static_cast<std::uint8_t>(50 + (k * 5 + t) % 150));
      out.write(reinterpret_cast<const char*>(Y[t].data()), w * h);
      out.write(reinterpret_cast<const char*>(Cb[t].data()), w * h);
      out.write(reinterpret_cast<const char*>(Cr[t].data()), w * h);
    }
  }
  const VideoVolume v = load_video(file, VideoFormat::y4m);
  REQUIRE(v.frame_count() == n);
  REQUIRE(v.width == w);
  REQUIRE(v.height == h);
  // independent BT.601 limited-range conversion
  auto clamp8 = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L));
  };
  for (int t = 0; t < n; ++t)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double yy = (Y[t][static_cast<std::size_t>(y * w + x)] - 16.0) / 219.0 * 255.0;
        const double pb = (Cb[t][static_cast<std::size_t>(y * w + x)] - 128.0) / 224.0 * 255.0;
        const double pr = (Cr[t][static_cast<std::size_t>(y * w + x)] - 128.0) / 224.0 * 255.0;
        CHECK(v.frames[static_cast<std::size_t>(t)].channels[0](y, x) == clamp8(yy + 1.402 * pr));
        CHECK(v.frames[static_cast<std::size_t>(t)].channels[1](y, x) ==
              clamp8(yy - 0.344136 * pb - 0.714136 * pr));
        CHECK(v.frames[static_cast<std::size_t>(t)].channels[2](y, x) == clamp8(yy + 1.772 * pb));
      }
}

TEST_CASE("grayscale conversion") {
  VideoVolume v;
  v.width = 4;
  v.height = 4;
  Frame f;
  f.channels = {solid(4, 4, 255), solid(4, 4, 255), solid(4, 4, 255)};
  v.frames.push_back(f);
  SUBCASE("pure white maps to 255") {
    const VideoVolume g = to_grayscale(v);
    CHECK(g.frames[0].channels[0](0, 0) == 255);
  }
  SUBCASE("pure red maps to 76") {
    v.frames[0].channels = {solid(4, 4, 255), solid(4, 4, 0), solid(4, 4, 0)};
    CHECK(to_grayscale(v).frames[0].channels[0](2, 2) == 76);
  }
  SUBCASE("pure blue maps to 29") {
    v.frames[0].channels = {solid(4, 4, 0), solid(4, 4, 0), solid(4, 4, 255)};
    CHECK(to_grayscale(v).frames[0].channels[0](1, 3) == 29);
  }
  SUBCASE("idempotent on gray content") {
    const VideoVolume g = to_grayscale(v);
    VideoVolume g3 = v;
    g3.frames[0].channels = {g.frames[0].channels[0], g.frames[0].channels[0],
                             g.frames[0].channels[0]};
    const VideoVolume g2 = to_grayscale(g3);
    CHECK((g2.frames[0].channels[0] == g.frames[0].channels[0]).all());
  }
}

TEST_CASE("image_dir round trip is bit exact") {
  const fs::path dir = temp_dir("roundtrip_in");
  const auto clip = fixtures::make_shape_clip({.frames = 3, .width = 20, .height = 16});
  save_video(clip.video, dir);
  const VideoVolume v = load_video(dir, VideoFormat::image_dir);
  REQUIRE(v.frame_count() == 3);
  for (int t = 0; t < 3; ++t)
    for (int c = 0; c < 3; ++c)
      CHECK((v.frames[static_cast<std::size_t>(t)].channels[static_cast<std::size_t>(c)] ==
             clip.video.frames[static_cast<std::size_t>(t)].channels[static_cast<std::size_t>(c)])
                .all());
}

TEST_CASE("render_overlay") {
  const auto clip = fixtures::make_shape_clip({.frames = 2, .width = 20, .height = 16});
  SUBCASE("no boxes preserves pixels") {
    const fs::path dir = temp_dir("overlay_none");
    render_overlay(clip.video, {}, dir);
    const VideoVolume v = load_video(dir, VideoFormat::image_dir);
    for (int c = 0; c < 3; ++c)
      CHECK((v.frames[0].channels[static_cast<std::size_t>(c)] ==
             clip.video.frames[0].channels[static_cast<std::size_t>(c)]).all());
  }
  SUBCASE("full-frame box outlines the border") {
    const fs::path dir = temp_dir("overlay_full");
    render_overlay(clip.video, {{0, {0, 0, 19, 15}, 255, 0, 0}}, dir);
    const VideoVolume v = load_video(dir, VideoFormat::image_dir);
    CHECK(v.frames[0].channels[0](0, 0) == 255);
    CHECK(v.frames[0].channels[1](0, 0) == 0);
    CHECK(v.frames[0].channels[0](15, 19) == 255);
  }
  SUBCASE("later entries draw last") {
    const fs::path dir = temp_dir("overlay_order");
    render_overlay(clip.video,
                   {{0, {2, 2, 10, 10}, 255, 0, 0}, {0, {4, 2, 12, 10}, 0, 0, 255}}, dir);
    const VideoVolume v = load_video(dir, VideoFormat::image_dir);
    // overlapping top edge at (x=4..10, y=2): second box wins
    CHECK(v.frames[0].channels[2](2, 8) == 255);
    CHECK(v.frames[0].channels[0](2, 8) == 0);
    // first box still present where not overdrawn
    CHECK(v.frames[0].channels[0](2, 2) == 255);
  }
  SUBCASE("out-of-range frame index fails") {
    CHECK_THROWS_AS(render_overlay(clip.video, {{7, {0, 0, 3, 3}, 255, 0, 0}}, temp_dir("ov_bad")),
                    VideoError);
  }
}

TEST_CASE("hsv conversion basics") {
  VideoVolume v;
  v.width = 1;
  v.height = 1;
  Frame f;
  f.channels = {solid(1, 1, 255), solid(1, 1, 0), solid(1, 1, 0)};
  v.frames.push_back(f);
  const VideoVolume hsv = to_hsv(v);
  CHECK(hsv.frames[0].channels[0](0, 0) == 0);    // hue 0 for red
  CHECK(hsv.frames[0].channels[1](0, 0) == 255);  // full saturation
  CHECK(hsv.frames[0].channels[2](0, 0) == 255);  // full value
}
