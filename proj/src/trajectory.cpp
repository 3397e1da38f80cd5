#include "tubelet/trajectory.hpp"

#include "tubelet/motion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace tubelet {

namespace {

FloatImage half_size(const FloatImage& img) {
  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  const int nh = (h + 1) / 2, nw = (w + 1) / 2;
  FloatImage out(nh, nw);
  for (int y = 0; y < nh; ++y)
    for (int x = 0; x < nw; ++x) {
      double s = 0;
      int cnt = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const int yy = 2 * y + dy, xx = 2 * x + dx;
          if (yy < h && xx < w) {
            s += img(yy, xx);
            ++cnt;
          }
        }
      out(y, x) = static_cast<float>(s / cnt);
    }
  return out;
}

// Iterative translational alignment of the patch around p between two frames.
// Returns false when the track cannot be continued.
bool align_patch(const std::vector<FloatImage>& pyr0, const std::vector<FloatImage>& pyr1,
                 const Eigen::Vector2d& p, const TrackConfig& cfg, Eigen::Vector2d& disp) {
  const int levels = static_cast<int>(pyr0.size());
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  for (int l = levels - 1; l >= 0; --l) {
    const double scale = std::pow(2.0, l);
    const FloatImage& i0 = pyr0[static_cast<std::size_t>(l)];
    const FloatImage& i1 = pyr1[static_cast<std::size_t>(l)];
    const Eigen::Vector2d pl = p / scale;
    for (int it = 0; it < 5; ++it) {
      Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
      Eigen::Vector2d atb = Eigen::Vector2d::Zero();
      int valid = 0;
      for (int dy = -cfg.window_radius; dy <= cfg.window_radius; ++dy)
        for (int dx = -cfg.window_radius; dx <= cfg.window_radius; ++dx) {
          const double x0 = pl.x() + dx, y0 = pl.y() + dy;
          const double x1 = x0 + d.x(), y1 = y0 + d.y();
          bool ok0 = false, ok1 = false, okx = false, oky = false;
          const float v0 = bilinear_sample(i0, x0, y0, ok0);
          const float v1 = bilinear_sample(i1, x1, y1, ok1);
          if (!ok0 || !ok1) continue;
          const float gx = bilinear_sample(i1, std::min(x1 + 1.0, i1.cols() - 1.0), y1, okx) -
                           bilinear_sample(i1, std::max(x1 - 1.0, 0.0), y1, okx);
          const float gy = bilinear_sample(i1, x1, std::min(y1 + 1.0, i1.rows() - 1.0), oky) -
                           bilinear_sample(i1, x1, std::max(y1 - 1.0, 0.0), oky);
          const Eigen::Vector2d g(0.5 * gx, 0.5 * gy);
          ata += g * g.transpose();
          atb += g * static_cast<double>(v1 - v0);
          ++valid;
        }
      if (valid < 8) return false;
      // regularize near-degenerate texture
      ata += 1e-3 * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d step = ata.ldlt().solve(-atb);
      if (!step.allFinite()) return false;
      d += step;
      if (step.norm() < 0.01) break;
    }
    if (l > 0) d *= 2.0;
  }
  disp = d;
  return disp.norm() <= cfg.max_step;
}

}  // namespace

std::vector<Trajectory> track(const VideoVolume& v, const TrackConfig& cfg) {
  if (v.frame_count() < 2) throw std::invalid_argument("track: need at least 2 frames");
  const VideoVolume gray = v.channel_count() == 1 ? v : to_grayscale(v);

  // per-frame pyramids
  std::vector<std::vector<FloatImage>> pyramids(static_cast<std::size_t>(gray.frame_count()));
  for (int t = 0; t < gray.frame_count(); ++t) {
    auto& pyr = pyramids[static_cast<std::size_t>(t)];
    pyr.push_back(gray.frames[static_cast<std::size_t>(t)].channels[0].cast<float>());
    for (int l = 1; l < cfg.pyramid_levels; ++l) {
      if (std::min(pyr.back().rows(), pyr.back().cols()) < 2 * cfg.window_radius + 2) break;
      pyr.push_back(half_size(pyr.back()));
    }
  }

  std::vector<Trajectory> done;
  std::vector<Trajectory> live;
  for (int t = 0; t + 1 < gray.frame_count(); ++t) {
    if (t % cfg.resample_interval == 0) {
      for (int y = cfg.grid_stride / 2; y < v.height; y += cfg.grid_stride)
        for (int x = cfg.grid_stride / 2; x < v.width; x += cfg.grid_stride) {
          Trajectory tr;
          tr.start_frame = t;
          tr.points.push_back(Eigen::Vector2d(x, y));
          live.push_back(std::move(tr));
        }
    }

    std::vector<Trajectory> next_live;
    for (Trajectory& tr : live) {
      const Eigen::Vector2d p = tr.points.back();
      Eigen::Vector2d d;
      bool ok = align_patch(pyramids[static_cast<std::size_t>(t)],
                            pyramids[static_cast<std::size_t>(t) + 1], p, cfg, d);
      Eigen::Vector2d q = p + d;
      if (ok && (q.x() < 0 || q.x() > v.width - 1 || q.y() < 0 || q.y() > v.height - 1)) ok = false;
      if (ok) {
        tr.points.push_back(q);
        if (tr.length() >= cfg.max_length) done.push_back(std::move(tr));
        else next_live.push_back(std::move(tr));
      } else {
        done.push_back(std::move(tr));
      }
    }
    live = std::move(next_live);
  }
  done.insert(done.end(), std::make_move_iterator(live.begin()),
              std::make_move_iterator(live.end()));

  std::vector<Trajectory> out;
  for (Trajectory& tr : done) {
    if (tr.length() < 2) continue;
    double path = 0;
    for (std::size_t i = 1; i < tr.points.size(); ++i)
      path += (tr.points[i] - tr.points[i - 1]).norm();
    if (path < cfg.min_displacement) continue;
    out.push_back(std::move(tr));
  }
  return out;
}

TrajectoryAssignment assign(const std::vector<Trajectory>& trajs, const Tubelet& t) {
  TrajectoryAssignment out;
  out.profile.assign(static_cast<std::size_t>(t.length()), 0);
  for (const Trajectory& tr : trajs) {
    int inside = 0;
    for (int i = 0; i < tr.length(); ++i) {
      const BoundingBox box = t.box_at(tr.start_frame + i);
      if (box.contains(tr.points[static_cast<std::size_t>(i)].x(),
                       tr.points[static_cast<std::size_t>(i)].y()))
        ++inside;
    }
    if (2 * inside <= tr.length()) continue;  // strict majority
    ++out.total;
    for (int i = 0; i < tr.length(); ++i) {
      const int f = tr.start_frame + i;
      if (f < t.t_begin || f > t.t_end()) continue;
      const BoundingBox box = t.box_at(f);
      if (box.contains(tr.points[static_cast<std::size_t>(i)].x(),
                       tr.points[static_cast<std::size_t>(i)].y()))
        ++out.profile[static_cast<std::size_t>(f - t.t_begin)];
    }
  }
  return out;
}

}  // namespace tubelet
