#include "tubelet/refine.hpp"

#include "tubelet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tubelet {

std::vector<Tubelet> motion_prune(const std::vector<Tubelet>& pool, int keep_p) {
  if (keep_p < 0) throw std::invalid_argument("motion_prune: P must be >= 0");
  std::vector<std::size_t> vid_idx;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].source != "imotion") vid_idx.push_back(i);

  std::stable_sort(vid_idx.begin(), vid_idx.end(), [&pool](std::size_t a, std::size_t b) {
    return pool[a].traj_total > pool[b].traj_total;
  });
  const std::int64_t n = static_cast<std::int64_t>(vid_idx.size());
  const std::int64_t keep =
      std::min<std::int64_t>(n, keep_p + (n > keep_p ? (n - keep_p) / 10 : 0));

  std::vector<bool> kept(pool.size(), false);
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].source == "imotion") kept[i] = true;
  for (std::int64_t i = 0; i < keep; ++i) kept[vid_idx[static_cast<std::size_t>(i)]] = true;

  std::vector<Tubelet> out;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (kept[i]) {
      out.push_back(pool[i]);
      if (out.back().source != "imotion") out.back().refinement += 'M';
    }
  return out;
}

std::vector<Tubelet> overlap_prune(const std::vector<Tubelet>& pool, double theta) {
  if (theta <= 0.0 || theta > 1.0)
    throw std::invalid_argument("overlap_prune: theta must be in (0,1]");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&pool](std::size_t a, std::size_t b) {
    return pool[a].traj_total > pool[b].traj_total;
  });

  std::vector<Tubelet> out;
  for (std::size_t i : order) {
    bool keep = true;
    for (const Tubelet& k : out)
      if (localization_score(pool[i], k) > theta) {
        keep = false;
        break;
      }
    if (keep) {
      out.push_back(pool[i]);
      out.back().refinement += 'O';
    }
  }
  return out;
}

namespace {

// Deterministic k-means (k-means++ seeding, Lloyd iterations) on 2-D points.
std::vector<int> kmeans2d(const std::vector<Eigen::Vector2d>& pts, int k, std::uint64_t seed) {
  const int n = static_cast<int>(pts.size());
  k = std::min(k, n);
  std::mt19937_64 rng(seed);

  std::vector<Eigen::Vector2d> centers;
  {
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.push_back(pts[static_cast<std::size_t>(first(rng))]);
    std::vector<double> d2(static_cast<std::size_t>(n));
    while (static_cast<int>(centers.size()) < k) {
      double sum = 0;
      for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        for (const auto& c : centers)
          best = std::min(best, (pts[static_cast<std::size_t>(i)] - c).squaredNorm());
        d2[static_cast<std::size_t>(i)] = best;
        sum += best;
      }
      if (sum <= 0) {
        centers.push_back(pts[static_cast<std::size_t>(centers.size() % n)]);
        continue;
      }
      std::uniform_real_distribution<double> u(0.0, sum);
      double r = u(rng);
      int pick = n - 1;
      for (int i = 0; i < n; ++i) {
        r -= d2[static_cast<std::size_t>(i)];
        if (r <= 0) {
          pick = i;
          break;
        }
      }
      centers.push_back(pts[static_cast<std::size_t>(pick)]);
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::max();
      for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
        const double d = (pts[static_cast<std::size_t>(i)] -
                          centers[static_cast<std::size_t>(c)]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    std::vector<Eigen::Vector2d> sums(centers.size(), Eigen::Vector2d::Zero());
    std::vector<int> counts(centers.size(), 0);
    for (int i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] +=
          pts[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (counts[c] > 0) centers[c] = sums[c] / counts[c];
  }
  return labels;
}

}  // namespace

std::vector<Tubelet> temporal_refine(const Tubelet& t, const RefineConfig& cfg) {
  const int B = t.length();
  if (B < 1 || t.traj_profile.size() != static_cast<std::size_t>(B))
    throw std::invalid_argument("temporal_refine: missing trajectory profile");
  const int nr_max = *std::max_element(t.traj_profile.begin(), t.traj_profile.end());
  if (nr_max == 0) return {t};

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i)
    pts.emplace_back(static_cast<double>(i) / B,
                     static_cast<double>(t.traj_profile[static_cast<std::size_t>(i)]) / nr_max);
  const std::vector<int> labels = kmeans2d(pts, cfg.target_segments, cfg.seed);

  std::vector<Tubelet> out;
  int run_start = 0;
  for (int i = 1; i <= B; ++i) {
    if (i < B && labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(run_start)])
      continue;
    const int len = i - run_start;
    if (len >= cfg.min_length) {
      Tubelet sub;
      sub.t_begin = t.t_begin + run_start;
      sub.boxes.assign(t.boxes.begin() + run_start, t.boxes.begin() + i);
      sub.traj_profile.assign(t.traj_profile.begin() + run_start, t.traj_profile.begin() + i);
      sub.traj_total =
          std::accumulate(sub.traj_profile.begin(), sub.traj_profile.end(), std::int64_t{0});
      sub.source = t.source;
      sub.grouping_fn = t.grouping_fn;
      sub.refinement = t.refinement + 'T';
      out.push_back(std::move(sub));
    }
    run_start = i;
  }
  return out;
}

namespace {

// weighted local linear regression with a triangular kernel
std::vector<double> smooth_series(const std::vector<double>& s, int window) {
  const int n = static_cast<int>(s.size());
  const int r = std::max(1, window / 2);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = std::max(0, i - r); j <= std::min(n - 1, i + r); ++j) {
      const double w = 1.0 - std::abs(j - i) / static_cast<double>(r + 1);
      const double x = j - i;
      sw += w;
      sx += w * x;
      sy += w * s[static_cast<std::size_t>(j)];
      sxx += w * x * x;
      sxy += w * x * s[static_cast<std::size_t>(j)];
    }
    const double det = sw * sxx - sx * sx;
    out[static_cast<std::size_t>(i)] =
        std::abs(det) > 1e-12 ? (sxx * sy - sx * sxy) / det : sy / sw;
  }
  return out;
}

}  // namespace

Tubelet spatial_refine(const Tubelet& t, const std::vector<Trajectory>& trajs, int pad,
                       int frame_width, int frame_height) {
  if (pad < 0) throw std::invalid_argument("spatial_refine: pad must be >= 0");
  Tubelet out = t;
  const int B = t.length();
  if (B == 0) return out;

  // member trajectories under the majority rule
  std::vector<const Trajectory*> members;
  for (const Trajectory& tr : trajs) {
    int inside = 0;
    for (int i = 0; i < tr.length(); ++i) {
      const BoundingBox box = t.box_at(tr.start_frame + i);
      if (box.contains(tr.points[static_cast<std::size_t>(i)].x(),
                       tr.points[static_cast<std::size_t>(i)].y()))
        ++inside;
    }
    if (2 * inside > tr.length()) members.push_back(&tr);
  }

  // clamp to padded per-frame trajectory extents
  for (int i = 0; i < B; ++i) {
    const int f = t.t_begin + i;
    BoundingBox extent;
    for (const Trajectory* tr : members) {
      const int j = f - tr->start_frame;
      if (j < 0 || j >= tr->length()) continue;
      const Eigen::Vector2d& p = tr->points[static_cast<std::size_t>(j)];
      extent.include(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())));
      extent.include(static_cast<int>(std::ceil(p.x())), static_cast<int>(std::ceil(p.y())));
    }
    if (extent.empty()) continue;  // frames with no points keep their box
    extent.x_min -= pad;
    extent.y_min -= pad;
    extent.x_max += pad;
    extent.y_max += pad;
    const BoundingBox clamped = out.boxes[static_cast<std::size_t>(i)].intersect(extent);
    if (!clamped.empty()) out.boxes[static_cast<std::size_t>(i)] = clamped;
  }

  // smooth x, y, width, height
  std::vector<double> xs(static_cast<std::size_t>(B)), ys(static_cast<std::size_t>(B)),
      ws(static_cast<std::size_t>(B)), hs(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i) {
    const BoundingBox& b = out.boxes[static_cast<std::size_t>(i)];
    xs[static_cast<std::size_t>(i)] = b.x_min;
    ys[static_cast<std::size_t>(i)] = b.y_min;
    ws[static_cast<std::size_t>(i)] = static_cast<double>(b.width());
    hs[static_cast<std::size_t>(i)] = static_cast<double>(b.height());
  }
  const int window = std::max(3, static_cast<int>(std::lround(B / 5.0)));
  xs = smooth_series(xs, window);
  ys = smooth_series(ys, window);
  ws = smooth_series(ws, window);
  hs = smooth_series(hs, window);
  for (int i = 0; i < B; ++i) {
    BoundingBox b;
    b.x_min = static_cast<int>(std::lround(xs[static_cast<std::size_t>(i)]));
    b.y_min = static_cast<int>(std::lround(ys[static_cast<std::size_t>(i)]));
    b.x_max = b.x_min + std::max(0, static_cast<int>(std::lround(ws[static_cast<std::size_t>(i)])) - 1);
    b.y_max = b.y_min + std::max(0, static_cast<int>(std::lround(hs[static_cast<std::size_t>(i)])) - 1);
    const BoundingBox clamped = b.clamped(frame_width, frame_height);
    out.boxes[static_cast<std::size_t>(i)] =
        clamped.empty() ? out.boxes[static_cast<std::size_t>(i)].clamped(frame_width, frame_height)
                        : clamped;
  }
  out.refinement += 'S';
  return out;
}

namespace {

void assign_all(std::vector<Tubelet>& pool, const std::vector<Trajectory>& trajs) {
  for (Tubelet& t : pool) {
    TrajectoryAssignment a = assign(trajs, t);
    t.traj_total = a.total;
    t.traj_profile = std::move(a.profile);
  }
}

}  // namespace

std::vector<Tubelet> refine_pipeline(std::vector<Tubelet> pool_vid,
                                     std::vector<Tubelet> pool_imotion,
                                     const std::vector<Trajectory>& trajs, PipelineMode mode,
                                     const RefineConfig& cfg, int frame_width, int frame_height) {
  for (Tubelet& t : pool_vid) t.source = "vid";
  for (Tubelet& t : pool_imotion) t.source = "imotion";
  assign_all(pool_vid, trajs);
  assign_all(pool_imotion, trajs);
  const int pad = static_cast<int>(std::lround(cfg.pad_fraction * frame_width));

  std::vector<Tubelet> result;
  if (mode == PipelineMode::trimmed) {
    std::vector<Tubelet> pool = motion_prune(pool_vid, cfg.motion_keep_p);
    pool.insert(pool.end(), pool_imotion.begin(), pool_imotion.end());
    result = overlap_prune(pool, cfg.overlap_threshold);
  } else {
    std::vector<Tubelet> vid = motion_prune(pool_vid, cfg.motion_keep_p);
    vid = overlap_prune(vid, cfg.overlap_threshold);
    std::vector<Tubelet> refined;
    for (const Tubelet& t : vid) {
      std::vector<Tubelet> subs = temporal_refine(t, cfg);
      refined.insert(refined.end(), std::make_move_iterator(subs.begin()),
                     std::make_move_iterator(subs.end()));
    }
    assign_all(refined, trajs);
    refined = overlap_prune(refined, cfg.overlap_threshold);
    std::vector<Tubelet> imo = overlap_prune(pool_imotion, cfg.overlap_threshold);
    result = std::move(refined);
    result.insert(result.end(), std::make_move_iterator(imo.begin()),
                  std::make_move_iterator(imo.end()));
  }
  for (Tubelet& t : result) t = spatial_refine(t, trajs, pad, frame_width, frame_height);
  return result;
}

}  // namespace tubelet
