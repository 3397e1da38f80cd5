#include "tubelet/video.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tubelet {
namespace fs = std::filesystem;

namespace {

bool has_ext(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

std::vector<ByteImage> read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VideoError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6" && magic != "P5") throw VideoError("unsupported PNM magic in " + path.string());
  auto next_int = [&in, &path]() {
    int v;
    // skip comments
    in >> std::ws;
    while (in.peek() == '#') {
      std::string line;
      std::getline(in, line);
      in >> std::ws;
    }
    if (!(in >> v)) throw VideoError("truncated PNM header in " + path.string());
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw VideoError("only 8-bit PNM supported: " + path.string());
  in.get();  // single whitespace after maxval
  const int nch = magic == "P6" ? 3 : 1;
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * nch);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw VideoError("truncated PNM data in " + path.string());
  std::vector<ByteImage> channels(static_cast<std::size_t>(nch), ByteImage(h, w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nch; ++c)
        channels[static_cast<std::size_t>(c)](y, x) =
            buf[(static_cast<std::size_t>(y) * w + x) * nch + c];
  return channels;
}

struct PngReadCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReadCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

}  // namespace

std::vector<ByteImage> read_png(const fs::path& path) {
  PngReadCloser s;
  s.fp = std::fopen(path.string().c_str(), "rb");
  if (!s.fp) throw VideoError("cannot open " + path.string());
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  s.info = png_create_info_struct(s.png);
  if (setjmp(png_jmpbuf(s.png))) throw VideoError("png decode failed: " + path.string());
  png_init_io(s.png, s.fp);
  png_read_info(s.png, s.info);

  png_set_strip_16(s.png);
  png_set_packing(s.png);
  if (png_get_color_type(s.png, s.info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(s.png);
  if (png_get_color_type(s.png, s.info) == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(s.png, s.info) < 8)
    png_set_expand_gray_1_2_4_to_8(s.png);
  png_set_strip_alpha(s.png);
  png_read_update_info(s.png, s.info);

  const int w = static_cast<int>(png_get_image_width(s.png, s.info));
  const int h = static_cast<int>(png_get_image_height(s.png, s.info));
  const int nch = png_get_channels(s.png, s.info);
  if (nch != 1 && nch != 3) throw VideoError("unsupported png channel count: " + path.string());

  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * nch);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = buf.data() + static_cast<std::size_t>(y) * w * nch;
  png_read_image(s.png, rows.data());

  std::vector<ByteImage> channels(static_cast<std::size_t>(nch), ByteImage(h, w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nch; ++c)
        channels[static_cast<std::size_t>(c)](y, x) =
            buf[(static_cast<std::size_t>(y) * w + x) * nch + c];
  return channels;
}

void write_png(const fs::path& path, const std::vector<ByteImage>& channels) {
  if (channels.empty()) throw VideoError("write_png: no channels");
  const int nch = static_cast<int>(channels.size());
  if (nch != 1 && nch != 3) throw VideoError("write_png: channel count must be 1 or 3");
  const int h = static_cast<int>(channels[0].rows());
  const int w = static_cast<int>(channels[0].cols());

  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw VideoError("cannot open for write: " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw VideoError("png encode failed: " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               nch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<std::size_t>(w) * nch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nch; ++c)
        row[static_cast<std::size_t>(x) * nch + c] = channels[static_cast<std::size_t>(c)](y, x);
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_ppm(const fs::path& path, const ByteImage& r, const ByteImage& g, const ByteImage& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VideoError("cannot open for write: " + path.string());
  const int h = static_cast<int>(r.rows()), w = static_cast<int>(r.cols());
  out << "P6\n" << w << " " << h << "\n255\n";
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      out.put(static_cast<char>(r(y, x)));
      out.put(static_cast<char>(g(y, x)));
      out.put(static_cast<char>(b(y, x)));
    }
}

namespace {

VideoVolume load_image_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (has_ext(e.path(), ".png") || has_ext(e.path(), ".ppm") || has_ext(e.path(), ".pgm"))
      files.push_back(e.path());
  }
  if (files.empty()) throw VideoError("no frames found in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  VideoVolume v;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::vector<ByteImage> channels =
        has_ext(files[i], ".png") ? read_png(files[i]) : read_ppm(files[i]);
    Frame f;
    f.index = static_cast<int>(i);
    f.channels = std::move(channels);
    if (i == 0) {
      v.width = f.width();
      v.height = f.height();
    } else if (f.width() != v.width || f.height() != v.height) {
      throw VideoError("inconsistent frame size at index " + std::to_string(i) + " (" +
                       files[i].filename().string() + ")");
    }
    v.frames.push_back(std::move(f));
  }
  // normalize: mixed gray/rgb directories are promoted to rgb
  const bool any_rgb = std::any_of(v.frames.begin(), v.frames.end(),
                                   [](const Frame& f) { return f.channels.size() == 3; });
  if (any_rgb)
    for (Frame& f : v.frames)
      if (f.channels.size() == 1) f.channels = {f.channels[0], f.channels[0], f.channels[0]};
  return v;
}

std::uint8_t clamp_u8(double x) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L));
}

// ITU-R BT.601 limited-range YCbCr -> RGB.
void ycbcr_to_rgb(double Y, double Cb, double Cr, std::uint8_t& r, std::uint8_t& g,
                  std::uint8_t& b) {
  const double y = (Y - 16.0) * 255.0 / 219.0;
  const double pb = (Cb - 128.0) * 255.0 / 224.0;
  const double pr = (Cr - 128.0) * 255.0 / 224.0;
  r = clamp_u8(y + 1.402 * pr);
  g = clamp_u8(y - 0.344136 * pb - 0.714136 * pr);
  b = clamp_u8(y + 1.772 * pb);
}

VideoVolume load_y4m(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VideoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (header.rfind("YUV4MPEG2", 0) != 0) throw VideoError("not a y4m stream: " + path.string());

  int w = 0, h = 0;
  std::string chroma = "420";
  std::istringstream hs(header);
  std::string tok;
  hs >> tok;  // magic
  while (hs >> tok) {
    if (tok[0] == 'W') w = std::stoi(tok.substr(1));
    else if (tok[0] == 'H') h = std::stoi(tok.substr(1));
    else if (tok[0] == 'C') chroma = tok.substr(1);
  }
  if (w <= 0 || h <= 0) throw VideoError("y4m header missing W/H: " + path.string());
  const bool c444 = chroma.rfind("444", 0) == 0;
  if (!c444 && chroma.rfind("420", 0) != 0)
    throw VideoError("unsupported y4m chroma C" + chroma + " in " + path.string());

  const int cw = c444 ? w : (w + 1) / 2;
  const int ch = c444 ? h : (h + 1) / 2;
  const std::size_t ysz = static_cast<std::size_t>(w) * h;
  const std::size_t csz = static_cast<std::size_t>(cw) * ch;

  VideoVolume v;
  v.width = w;
  v.height = h;
  std::vector<unsigned char> yb(ysz), ub(csz), vb(csz);
  int index = 0;
  std::string fheader;
  while (std::getline(in, fheader)) {
    if (fheader.rfind("FRAME", 0) != 0)
      throw VideoError("malformed y4m frame header at frame " + std::to_string(index));
    in.read(reinterpret_cast<char*>(yb.data()), static_cast<std::streamsize>(ysz));
    in.read(reinterpret_cast<char*>(ub.data()), static_cast<std::streamsize>(csz));
    in.read(reinterpret_cast<char*>(vb.data()), static_cast<std::streamsize>(csz));
    if (!in) throw VideoError("truncated y4m frame " + std::to_string(index));
    Frame f;
    f.index = index++;
    f.channels.assign(3, ByteImage(h, w));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int cy = c444 ? y : y / 2, cx = c444 ? x : x / 2;
        std::uint8_t r, g, b;
        ycbcr_to_rgb(yb[static_cast<std::size_t>(y) * w + x],
                     ub[static_cast<std::size_t>(cy) * cw + cx],
                     vb[static_cast<std::size_t>(cy) * cw + cx], r, g, b);
        f.channels[0](y, x) = r;
        f.channels[1](y, x) = g;
        f.channels[2](y, x) = b;
      }
    v.frames.push_back(std::move(f));
  }
  if (v.frames.empty()) throw VideoError("y4m stream has no frames: " + path.string());
  return v;
}

}  // namespace

VideoVolume load_video(const fs::path& path, VideoFormat format) {
  if (!fs::exists(path)) throw VideoError("path does not exist: " + path.string());
  switch (format) {
    case VideoFormat::image_dir: return load_image_dir(path);
    case VideoFormat::y4m: return load_y4m(path);
  }
  throw VideoError("unknown video format");
}

ByteImage rgb_to_gray(const ByteImage& r, const ByteImage& g, const ByteImage& b) {
  ByteImage out(r.rows(), r.cols());
  for (Eigen::Index y = 0; y < r.rows(); ++y)
    for (Eigen::Index x = 0; x < r.cols(); ++x)
      out(y, x) = clamp_u8(0.299 * r(y, x) + 0.587 * g(y, x) + 0.114 * b(y, x));
  return out;
}

VideoVolume to_grayscale(const VideoVolume& v) {
  VideoVolume out;
  out.width = v.width;
  out.height = v.height;
  out.frames.reserve(v.frames.size());
  for (const Frame& f : v.frames) {
    Frame g;
    g.index = f.index;
    if (f.channels.size() == 1)
      g.channels = {f.channels[0]};
    else
      g.channels = {rgb_to_gray(f.channels[0], f.channels[1], f.channels[2])};
    out.frames.push_back(std::move(g));
  }
  return out;
}

VideoVolume to_hsv(const VideoVolume& v) {
  VideoVolume out;
  out.width = v.width;
  out.height = v.height;
  out.frames.reserve(v.frames.size());
  for (const Frame& f : v.frames) {
    if (f.channels.size() != 3) throw VideoError("to_hsv requires RGB input");
    Frame o;
    o.index = f.index;
    o.channels.assign(3, ByteImage(v.height, v.width));
    for (int y = 0; y < v.height; ++y)
      for (int x = 0; x < v.width; ++x) {
        const double r = f.channels[0](y, x) / 255.0;
        const double g = f.channels[1](y, x) / 255.0;
        const double b = f.channels[2](y, x) / 255.0;
        const double mx = std::max({r, g, b});
        const double mn = std::min({r, g, b});
        const double d = mx - mn;
        double hdeg = 0.0;
        if (d > 0.0) {
          if (mx == r) hdeg = 60.0 * std::fmod((g - b) / d, 6.0);
          else if (mx == g) hdeg = 60.0 * ((b - r) / d + 2.0);
          else hdeg = 60.0 * ((r - g) / d + 4.0);
          if (hdeg < 0.0) hdeg += 360.0;
        }
        const double s = mx > 0.0 ? d / mx : 0.0;
        o.channels[0](y, x) = clamp_u8(hdeg / 360.0 * 255.0);
        o.channels[1](y, x) = clamp_u8(s * 255.0);
        o.channels[2](y, x) = clamp_u8(mx * 255.0);
      }
    out.frames.push_back(std::move(o));
  }
  return out;
}

namespace {
std::string frame_name(const std::string& prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.png", index);
  return prefix + buf;
}
}  // namespace

void save_video(const VideoVolume& v, const fs::path& dir, const std::string& prefix) {
  fs::create_directories(dir);
  for (const Frame& f : v.frames) write_png(dir / frame_name(prefix, f.index), f.channels);
}

void render_overlay(const VideoVolume& v, const std::vector<OverlayBox>& boxes,
                    const fs::path& dir) {
  for (const OverlayBox& ob : boxes)
    if (ob.frame < 0 || ob.frame >= v.frame_count())
      throw VideoError("overlay box references frame " + std::to_string(ob.frame) +
                       " outside [0," + std::to_string(v.frame_count()) + ")");
  fs::create_directories(dir);
  for (const Frame& f : v.frames) {
    std::vector<ByteImage> channels = f.channels;
    if (channels.size() == 1) channels = {channels[0], channels[0], channels[0]};
    for (const OverlayBox& ob : boxes) {
      if (ob.frame != f.index || ob.box.empty()) continue;
      const BoundingBox b = ob.box.clamped(v.width, v.height);
      auto put = [&](int x, int y) {
        if (x < 0 || x >= v.width || y < 0 || y >= v.height) return;
        channels[0](y, x) = ob.r;
        channels[1](y, x) = ob.g;
        channels[2](y, x) = ob.b;
      };
      for (int t = 0; t < 2; ++t) {  // 2-px outline
        for (int x = b.x_min - t; x <= b.x_max + t; ++x) {
          put(x, b.y_min - t);
          put(x, b.y_max + t);
        }
        for (int y = b.y_min - t; y <= b.y_max + t; ++y) {
          put(b.x_min - t, y);
          put(b.x_max + t, y);
        }
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "%06d_overlay.png", f.index);
    write_png(dir / name, channels);
  }
}

}  // namespace tubelet
