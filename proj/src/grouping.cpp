#include "tubelet/grouping.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace tubelet {

GroupingFunction GroupingFunction::parse(const std::string& name) {
  GroupingFunction g;
  if (name == "all") {
    g.motion = g.color = g.texture = g.size = g.fill = true;
    return g;
  }
  if (name == "all-but-motion") {
    g.color = g.texture = g.size = g.fill = true;
    return g;
  }
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "motion") g.motion = true;
    else if (part == "color") g.color = true;
    else if (part == "texture") g.texture = true;
    else if (part == "size") g.size = true;
    else if (part == "fill") g.fill = true;
    else throw std::invalid_argument("unknown similarity measure: " + part);
  }
  if (g.measure_count() == 0) throw std::invalid_argument("empty grouping function: " + name);
  return g;
}

std::string GroupingFunction::name() const {
  if (motion && color && texture && size && fill) return "all";
  if (!motion && color && texture && size && fill) return "all-but-motion";
  std::string out;
  auto add = [&out](const char* n) {
    if (!out.empty()) out += '+';
    out += n;
  };
  if (motion) add("motion");
  if (color) add("color");
  if (texture) add("texture");
  if (size) add("size");
  if (fill) add("fill");
  return out;
}

std::vector<GroupingFunction> selected_grouping_functions() {
  return {GroupingFunction::parse("motion"), GroupingFunction::parse("fill"),
          GroupingFunction::parse("motion+size+fill"), GroupingFunction::parse("all-but-motion"),
          GroupingFunction::parse("all")};
}

double histogram_intersection(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.cwiseMin(b).sum();
}

namespace {

std::int64_t joint_cuboid_volume(const SuperVoxel& a, const SuperVoxel& b) {
  BoundingBox box;
  for (const BoundingBox& bb : a.boxes) box.include(bb);
  for (const BoundingBox& bb : b.boxes) box.include(bb);
  const int t0 = std::min(a.t_begin, b.t_begin);
  const int t1 = std::max(a.t_end(), b.t_end());
  return box.area() * static_cast<std::int64_t>(t1 - t0 + 1);
}

}  // namespace

double similarity(const SuperVoxel& a, const SuperVoxel& b, const GroupingFunction& g,
                  std::int64_t video_voxels) {
  if (!a.neighbors.contains(b.id))
    throw std::invalid_argument("similarity: super-voxels are not neighbors");
  double s = 0.0;
  if (g.motion) s += histogram_intersection(a.h_motion, b.h_motion);
  if (g.color) s += histogram_intersection(a.h_color, b.h_color);
  if (g.texture) s += histogram_intersection(a.h_texture, b.h_texture);
  if (g.size)
    s += 1.0 - static_cast<double>(a.size + b.size) / static_cast<double>(video_voxels);
  if (g.fill)
    s += static_cast<double>(a.size + b.size) /
         static_cast<double>(joint_cuboid_volume(a, b));
  return s;
}

SuperVoxel merge_supervoxels(const SuperVoxel& a, const SuperVoxel& b, int new_id) {
  if (!a.active || !b.active)
    throw std::invalid_argument("merge_supervoxels: node already deactivated");
  SuperVoxel r;
  r.id = new_id;
  r.size = a.size + b.size;
  const double wa = static_cast<double>(a.size), wb = static_cast<double>(b.size);
  r.h_motion = (wa * a.h_motion + wb * b.h_motion) / (wa + wb);
  r.h_color = (wa * a.h_color + wb * b.h_color) / (wa + wb);
  r.h_texture = (wa * a.h_texture + wb * b.h_texture) / (wa + wb);
  r.t_begin = std::min(a.t_begin, b.t_begin);
  const int t_end = std::max(a.t_end(), b.t_end());
  r.boxes.assign(static_cast<std::size_t>(t_end - r.t_begin + 1), BoundingBox{});
  for (int t = r.t_begin; t <= t_end; ++t) {
    BoundingBox& box = r.boxes[static_cast<std::size_t>(t - r.t_begin)];
    const BoundingBox ba = (t >= a.t_begin && t <= a.t_end())
                               ? a.boxes[static_cast<std::size_t>(t - a.t_begin)]
                               : BoundingBox{};
    const BoundingBox bb = (t >= b.t_begin && t <= b.t_end())
                               ? b.boxes[static_cast<std::size_t>(t - b.t_begin)]
                               : BoundingBox{};
    box.include(ba);
    box.include(bb);
  }
  r.neighbors = a.neighbors;
  r.neighbors.insert(b.neighbors.begin(), b.neighbors.end());
  r.neighbors.erase(a.id);
  r.neighbors.erase(b.id);
  r.child_a = a.id;
  r.child_b = b.id;
  return r;
}

std::vector<SuperVoxel> build_initial_supervoxels(const VoxelLabeling& labeling,
                                                  const FeatureVolume& features,
                                                  int connectivity) {
  if (labeling.width != features.width || labeling.height != features.height ||
      labeling.frame_count() != features.frames)
    throw std::invalid_argument("build_initial_supervoxels: geometry mismatch");

  const int n = labeling.label_count;
  std::vector<LabelStats> stats = label_stats(labeling);
  std::vector<SuperVoxel> sv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SuperVoxel& s = sv[static_cast<std::size_t>(i)];
    s.id = i;
    s.size = stats[static_cast<std::size_t>(i)].size;
    s.t_begin = stats[static_cast<std::size_t>(i)].t_begin;
    s.boxes = stats[static_cast<std::size_t>(i)].boxes;
    s.h_motion = Eigen::VectorXd::Zero(features.motion_bins());
    s.h_color = Eigen::VectorXd::Zero(features.color_bins());
    s.h_texture = Eigen::VectorXd::Zero(features.texture_bins());
  }

  const int w = labeling.width, h = labeling.height, fcount = labeling.frame_count();
  for (int t = 0; t < fcount; ++t)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        SuperVoxel& s = sv[static_cast<std::size_t>(labeling.label(x, y, t))];
        s.h_motion(features.motion_count[static_cast<std::size_t>(t)](y, x)) += 1.0;
        for (int c = 0; c < features.color_channels(); ++c)
          s.h_color(c * features.bins.color_bins_per_channel +
                    features.color_bin[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)](y, x)) += 1.0;
        const int tb = features.bins.texture_orientations * features.bins.texture_magnitudes;
        for (int c = 0; c < features.texture_channels(); ++c)
          s.h_texture(c * tb +
                      features.texture_bin[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)](y, x)) += 1.0;
      }
  for (SuperVoxel& s : sv) {
    if (s.h_motion.sum() > 0) s.h_motion /= s.h_motion.sum();
    if (s.h_color.sum() > 0) s.h_color /= s.h_color.sum();
    if (s.h_texture.sum() > 0) s.h_texture /= s.h_texture.sum();
  }

  // adjacency along forward lattice edges
  std::vector<std::array<int, 3>> offsets;
  if (connectivity == 6) {
    offsets = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  } else {
    for (int dt = 0; dt <= 1; ++dt)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dt == 0 && (dy < 0 || (dy == 0 && dx <= 0))) continue;
          offsets.push_back({dx, dy, dt});
        }
  }
  for (int t = 0; t < fcount; ++t)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::int32_t la = labeling.label(x, y, t);
        for (const auto& o : offsets) {
          const int x1 = x + o[0], y1 = y + o[1], t1 = t + o[2];
          if (x1 < 0 || x1 >= w || y1 < 0 || y1 >= h || t1 >= fcount) continue;
          const std::int32_t lb = labeling.label(x1, y1, t1);
          if (la != lb) {
            sv[static_cast<std::size_t>(la)].neighbors.insert(lb);
            sv[static_cast<std::size_t>(lb)].neighbors.insert(la);
          }
        }
      }
  return sv;
}

namespace {

struct PairEntry {
  double sim;
  int a, b;  // a < b
};

struct PairLess {
  // max-heap on similarity; ties prefer the lowest (a, b)
  bool operator()(const PairEntry& x, const PairEntry& y) const {
    if (x.sim != y.sim) return x.sim < y.sim;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

bool is_motionless(const SuperVoxel& s) { return s.h_motion(0) >= 1.0 - 1e-12; }

}  // namespace

GroupingResult run_grouping(std::vector<SuperVoxel> initial, const GroupingFunction& g,
                            std::int64_t video_voxels, const GroupingConfig& cfg) {
  GroupingResult out;
  out.tree.leaf_count = static_cast<int>(initial.size());
  out.nodes = std::move(initial);
  if (out.nodes.empty()) throw std::invalid_argument("run_grouping: no initial super-voxels");
  if (out.nodes.size() == 1) return out;

  std::priority_queue<PairEntry, std::vector<PairEntry>, PairLess> heap;
  for (const SuperVoxel& s : out.nodes)
    for (int nb : s.neighbors)
      if (s.id < nb)
        heap.push({similarity(s, out.nodes[static_cast<std::size_t>(nb)], g, video_voxels),
                   s.id, nb});

  int active_count = static_cast<int>(out.nodes.size());
  while (active_count > 1) {
    if (heap.empty())
      throw std::runtime_error("run_grouping: disconnected super-voxel graph");
    const PairEntry e = heap.top();
    heap.pop();
    if (!out.nodes[static_cast<std::size_t>(e.a)].active ||
        !out.nodes[static_cast<std::size_t>(e.b)].active)
      continue;  // stale entry

    const int new_id = static_cast<int>(out.nodes.size());
    SuperVoxel merged = merge_supervoxels(out.nodes[static_cast<std::size_t>(e.a)],
                                          out.nodes[static_cast<std::size_t>(e.b)], new_id);
    out.nodes[static_cast<std::size_t>(e.a)].active = false;
    out.nodes[static_cast<std::size_t>(e.b)].active = false;
    for (int nb : merged.neighbors) {
      SuperVoxel& other = out.nodes[static_cast<std::size_t>(nb)];
      other.neighbors.erase(e.a);
      other.neighbors.erase(e.b);
      other.neighbors.insert(new_id);
    }
    out.tree.merges.push_back({e.a, e.b, new_id, e.sim});
    out.nodes.push_back(std::move(merged));
    const SuperVoxel& added = out.nodes.back();
    for (int nb : added.neighbors) {
      const SuperVoxel& other = out.nodes[static_cast<std::size_t>(nb)];
      if (!other.active) continue;
      const int lo = std::min(added.id, nb), hi = std::max(added.id, nb);
      heap.push({similarity(added, other, g, video_voxels), lo, hi});
    }
    --active_count;
  }

  for (const MergeRecord& m : out.tree.merges) {
    const SuperVoxel& s = out.nodes[static_cast<std::size_t>(m.result)];
    if (s.size < cfg.discard_min_size) continue;
    if (is_motionless(s)) continue;
    out.retained.push_back(m.result);
  }
  return out;
}

std::vector<Tubelet> extract_tubelets(const GroupingResult& result, const std::string& source,
                                      const std::string& grouping_fn) {
  std::vector<Tubelet> out;
  out.reserve(result.retained.size());
  for (int id : result.retained) {
    const SuperVoxel& s = result.nodes[static_cast<std::size_t>(id)];
    Tubelet t;
    t.t_begin = s.t_begin;
    t.boxes = s.boxes;
    t.source = source;
    t.grouping_fn = grouping_fn;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Tubelet> union_phi(const std::vector<std::vector<Tubelet>>& sets) {
  std::vector<Tubelet> out;
  std::set<std::string> seen;
  for (const auto& set : sets)
    for (const Tubelet& t : set) {
      std::string key = std::to_string(t.t_begin);
      for (const BoundingBox& b : t.boxes) {
        key += '|';
        key += std::to_string(b.x_min) + ',' + std::to_string(b.y_min) + ',' +
               std::to_string(b.x_max) + ',' + std::to_string(b.y_max);
      }
      if (seen.insert(std::move(key)).second) out.push_back(t);
    }
  return out;
}

}  // namespace tubelet
