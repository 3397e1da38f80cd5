#include "tubelet/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tubelet {

FloatImage gaussian_smooth(const FloatImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + radius)];
  }
  for (double& v : k) v /= sum;

  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  FloatImage tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -radius; i <= radius; ++i)
        s += k[static_cast<std::size_t>(i + radius)] * img(y, std::clamp(x + i, 0, w - 1));
      tmp(y, x) = static_cast<float>(s);
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -radius; i <= radius; ++i)
        s += k[static_cast<std::size_t>(i + radius)] * tmp(std::clamp(y + i, 0, h - 1), x);
      out(y, x) = static_cast<float>(s);
    }
  return out;
}

namespace {

struct Edge {
  float weight;
  std::int32_t a, b;
};

struct UnionFind {
  std::vector<std::int32_t> parent;
  std::vector<std::int64_t> size;
  std::vector<float> internal;  // max merged edge weight per component

  explicit UnionFind(std::size_t n) : parent(n), size(n, 1), internal(n, 0.0f) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  std::int32_t unite(std::int32_t a, std::int32_t b, float w) {
    if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    internal[static_cast<std::size_t>(a)] =
        std::max({internal[static_cast<std::size_t>(a)], internal[static_cast<std::size_t>(b)], w});
    return a;
  }
};

}  // namespace

VoxelLabeling segment(const VideoVolume& v, const SegmentationConfig& cfg) {
  if (v.frame_count() == 0) throw std::invalid_argument("segment: empty video");
  if (cfg.connectivity != 6 && cfg.connectivity != 26)
    throw std::invalid_argument("segment: connectivity must be 6 or 26");

  const int w = v.width, h = v.height, fcount = v.frame_count();
  const int nch = v.channel_count();
  const std::int64_t n = static_cast<std::int64_t>(w) * h * fcount;

  // smoothed channels, per frame
  std::vector<std::vector<FloatImage>> sm(static_cast<std::size_t>(fcount));
  for (int t = 0; t < fcount; ++t)
    for (int c = 0; c < nch; ++c)
      sm[static_cast<std::size_t>(t)].push_back(gaussian_smooth(
          v.frames[static_cast<std::size_t>(t)].channels[static_cast<std::size_t>(c)]
              .cast<float>(),
          cfg.smoothing_sigma));

  auto idx = [&](int x, int y, int t) {
    return (static_cast<std::int64_t>(t) * h + y) * w + x;
  };
  auto weight = [&](int x0, int y0, int t0, int x1, int y1, int t1) {
    double s = 0;
    for (int c = 0; c < nch; ++c) {
      const double d = sm[static_cast<std::size_t>(t0)][static_cast<std::size_t>(c)](y0, x0) -
                       sm[static_cast<std::size_t>(t1)][static_cast<std::size_t>(c)](y1, x1);
      s += d * d;
    }
    return static_cast<float>(std::sqrt(s));
  };

  // forward neighbor offsets (strictly increasing linear index)
  std::vector<std::array<int, 3>> offsets;  // dx, dy, dt
  if (cfg.connectivity == 6) {
    offsets = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  } else {
    for (int dt = 0; dt <= 1; ++dt)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dt == 0 && (dy < 0 || (dy == 0 && dx <= 0))) continue;
          offsets.push_back({dx, dy, dt});
        }
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * offsets.size());
  for (int t = 0; t < fcount; ++t)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (const auto& o : offsets) {
          const int x1 = x + o[0], y1 = y + o[1], t1 = t + o[2];
          if (x1 < 0 || x1 >= w || y1 < 0 || y1 >= h || t1 >= fcount) continue;
          edges.push_back({weight(x, y, t, x1, y1, t1), static_cast<std::int32_t>(idx(x, y, t)),
                           static_cast<std::int32_t>(idx(x1, y1, t1))});
        }

  // stable criterion order: (weight, a, b)
  std::sort(edges.begin(), edges.end(), [](const Edge& e, const Edge& f) {
    if (e.weight != f.weight) return e.weight < f.weight;
    if (e.a != f.a) return e.a < f.a;
    return e.b < f.b;
  });

  UnionFind uf(static_cast<std::size_t>(n));
  const double c = cfg.merge_threshold_c;
  for (const Edge& e : edges) {
    const std::int32_t a = uf.find(e.a), b = uf.find(e.b);
    if (a == b) continue;
    const double ta = uf.internal[static_cast<std::size_t>(a)] +
                      c / static_cast<double>(uf.size[static_cast<std::size_t>(a)]);
    const double tb = uf.internal[static_cast<std::size_t>(b)] +
                      c / static_cast<double>(uf.size[static_cast<std::size_t>(b)]);
    if (e.weight <= std::min(ta, tb)) uf.unite(a, b, e.weight);
  }

  // absorb small components along the sorted edges
  for (const Edge& e : edges) {
    const std::int32_t a = uf.find(e.a), b = uf.find(e.b);
    if (a == b) continue;
    if (uf.size[static_cast<std::size_t>(a)] < cfg.min_segment_size ||
        uf.size[static_cast<std::size_t>(b)] < cfg.min_segment_size)
      uf.unite(a, b, e.weight);
  }

  // dense labels in raster-scan first-occurrence order
  VoxelLabeling out;
  out.width = w;
  out.height = h;
  out.frames.assign(static_cast<std::size_t>(fcount), LabelImage(h, w));
  std::vector<std::int32_t> remap(static_cast<std::size_t>(n), -1);
  std::int32_t next = 0;
  for (int t = 0; t < fcount; ++t)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::int32_t root = uf.find(static_cast<std::int32_t>(idx(x, y, t)));
        if (remap[static_cast<std::size_t>(root)] < 0) remap[static_cast<std::size_t>(root)] = next++;
        out.frames[static_cast<std::size_t>(t)](y, x) = remap[static_cast<std::size_t>(root)];
      }
  out.label_count = next;
  return out;
}

std::vector<LabelStats> label_stats(const VoxelLabeling& l) {
  std::vector<LabelStats> stats(static_cast<std::size_t>(l.label_count));
  std::vector<std::vector<BoundingBox>> boxes(
      static_cast<std::size_t>(l.label_count),
      std::vector<BoundingBox>(static_cast<std::size_t>(l.frame_count())));
  for (int t = 0; t < l.frame_count(); ++t)
    for (int y = 0; y < l.height; ++y)
      for (int x = 0; x < l.width; ++x) {
        const std::int32_t id = l.frames[static_cast<std::size_t>(t)](y, x);
        LabelStats& s = stats[static_cast<std::size_t>(id)];
        if (s.size == 0) {
          s.t_begin = t;
          s.t_end = t;
        } else {
          s.t_begin = std::min(s.t_begin, t);
          s.t_end = std::max(s.t_end, t);
        }
        ++s.size;
        boxes[static_cast<std::size_t>(id)][static_cast<std::size_t>(t)].include(x, y);
      }
  for (std::int32_t id = 0; id < l.label_count; ++id) {
    LabelStats& s = stats[static_cast<std::size_t>(id)];
    s.boxes.assign(boxes[static_cast<std::size_t>(id)].begin() + s.t_begin,
                   boxes[static_cast<std::size_t>(id)].begin() + s.t_end + 1);
  }
  return stats;
}

}  // namespace tubelet
