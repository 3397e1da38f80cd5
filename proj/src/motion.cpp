#include "tubelet/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubelet {

Eigen::Vector2d velocity(const MotionParams& params, double x, double y) {
  const Eigen::VectorXd& a = params.a;
  double u = a(0) + a(1) * x + a(2) * y;
  double v = a(3) + a(4) * x + a(5) * y;
  if (params.model == MotionModel::quadratic) {
    u += a(6) * x * x + a(7) * x * y;
    v += a(6) * x * y + a(7) * y * y;
  }
  return {u, v};
}

double tukey_influence_ratio(double r, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("tukey scale must be > 0");
  const double t = r / scale;
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q;
}

float bilinear_sample(const FloatImage& img, double x, double y, bool& valid) {
  const int w = static_cast<int>(img.cols()), h = static_cast<int>(img.rows());
  if (x < 0.0 || y < 0.0 || x > w - 1 || y > h - 1) {
    valid = false;
    return 0.0f;
  }
  valid = true;
  const int x0 = std::min(static_cast<int>(x), w - 2 >= 0 ? w - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), h - 2 >= 0 ? h - 2 : 0);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0, fy = y - y0;
  return static_cast<float>((1 - fx) * (1 - fy) * img(y0, x0) + fx * (1 - fy) * img(y0, x1) +
                            (1 - fx) * fy * img(y1, x0) + fx * fy * img(y1, x1));
}

namespace {

// 5-tap binomial smoothing and 2x decimation.
FloatImage downsample(const FloatImage& img) {
  static const double k[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  FloatImage tmp(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * img(y, std::clamp(x + i, 0, w - 1));
      tmp(y, x) = static_cast<float>(s);
    }
  const int nh = (h + 1) / 2, nw = (w + 1) / 2;
  FloatImage out(nh, nw);
  for (int y = 0; y < nh; ++y)
    for (int x = 0; x < nw; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * tmp(std::clamp(2 * y + i, 0, h - 1), 2 * x);
      out(y, x) = static_cast<float>(s);
    }
  return out;
}

double median_of(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (lo + m);
  }
  return m;
}

// 4.6848 * MAD of the residual sample.
double auto_scale(const std::vector<double>& residuals) {
  std::vector<double> v = residuals;
  const double med = median_of(v);
  for (double& r : v) r = std::abs(r - med);
  const double mad = median_of(v);
  return std::max(4.6848 * mad, 1.0);  // floor guards all-conforming pairs
}

double tukey_rho(double r, double c) {
  const double t = r / c;
  const double c2 = c * c;
  if (std::abs(t) >= 1.0) return c2 / 6.0;
  const double q = 1.0 - t * t;
  return c2 / 6.0 * (1.0 - q * q * q);
}

struct LevelData {
  FloatImage f0, f1, gx1, gy1;
};

void gradients(const FloatImage& img, FloatImage& gx, FloatImage& gy) {
  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  gx.resize(h, w);
  gy.resize(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      gx(y, x) = 0.5f * (img(y, std::min(x + 1, w - 1)) - img(y, std::max(x - 1, 0)));
      gy(y, x) = 0.5f * (img(std::min(y + 1, h - 1), x) - img(std::max(y - 1, 0), x));
    }
}

int param_count(MotionModel m) { return m == MotionModel::affine ? 6 : 8; }

// Rows of the Jacobian d r / d a at (x, y) given the warped image gradient.
void fill_jacobian(MotionModel model, double x, double y, double ix, double iy,
                   Eigen::Ref<Eigen::VectorXd> j) {
  j(0) = ix;
  j(1) = ix * x;
  j(2) = ix * y;
  j(3) = iy;
  j(4) = iy * x;
  j(5) = iy * y;
  if (model == MotionModel::quadratic) {
    j(6) = ix * x * x + iy * x * y;
    j(7) = ix * x * y + iy * y * y;
  }
}

struct Residuals {
  std::vector<double> r;       // valid residuals
  std::vector<int> px, py;     // their pixel coordinates
  double objective(double c) const {
    double s = 0;
    for (double v : r) s += tukey_rho(v, c);
    return s;
  }
};

Residuals compute_residuals(const LevelData& lv, const MotionParams& p) {
  Residuals out;
  const int h = static_cast<int>(lv.f0.rows()), w = static_cast<int>(lv.f0.cols());
  out.r.reserve(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d d = velocity(p, x, y);
      bool ok = false;
      const float s = bilinear_sample(lv.f1, x + d.x(), y + d.y(), ok);
      if (!ok) continue;
      out.r.push_back(s - lv.f0(y, x));
      out.px.push_back(x);
      out.py.push_back(y);
    }
  return out;
}

// Transfer params one level finer (coordinates double).
void upscale_params(MotionParams& p) {
  p.a(0) *= 2.0;
  p.a(3) *= 2.0;
  if (p.model == MotionModel::quadratic) {
    p.a(6) *= 0.5;
    p.a(7) *= 0.5;
  }
}

}  // namespace

MotionEstimate estimate_dominant_motion(const FloatImage& frame_t, const FloatImage& frame_t1,
                                        const RobustConfig& cfg) {
  if (frame_t.rows() != frame_t1.rows() || frame_t.cols() != frame_t1.cols())
    throw std::invalid_argument("estimate_dominant_motion: frame size mismatch");
  if (frame_t.rows() < 2 || frame_t.cols() < 2)
    throw std::invalid_argument("estimate_dominant_motion: frame too small");

  MotionEstimate est;
  est.params = MotionParams::zero(cfg.model);

  // pyramid, coarsest last; levels capped so the top stays >= 8 px
  std::vector<LevelData> pyr;
  pyr.push_back({frame_t, frame_t1, {}, {}});
  for (int l = 1; l < std::max(1, cfg.pyramid_levels); ++l) {
    const FloatImage& prev0 = pyr.back().f0;
    if (std::min(prev0.rows(), prev0.cols()) < 16) break;
    pyr.push_back({downsample(pyr.back().f0), downsample(pyr.back().f1), {}, {}});
  }
  for (LevelData& lv : pyr) gradients(lv.f1, lv.gx1, lv.gy1);

  {  // degenerate input: no gradient anywhere
    FloatImage gx, gy;
    gradients(frame_t, gx, gy);
    if ((gx.abs().maxCoeff() == 0.0f && gy.abs().maxCoeff() == 0.0f)) {
      est.degenerate = true;
      est.residuals = frame_t1 - frame_t;
      est.valid = ByteImage::Constant(frame_t.rows(), frame_t.cols(), 1);
      est.weights = FloatImage::Ones(frame_t.rows(), frame_t.cols());
      est.tukey_scale = 1.0;
      return est;
    }
  }

  const int np = param_count(cfg.model);
  MotionParams theta = MotionParams::zero(cfg.model);

  for (int li = static_cast<int>(pyr.size()) - 1; li >= 0; --li) {
    const LevelData& lv = pyr[static_cast<std::size_t>(li)];
    const bool finest = li == 0;

    // Scale fixed per level: recomputing it inside the iteration loop would
    // break the monotone-descent guarantee of the halving step.
    Residuals res = compute_residuals(lv, theta);
    if (res.r.empty()) break;
    double c = cfg.tukey_scale > 0.0 ? cfg.tukey_scale : auto_scale(res.r);
    double obj = res.objective(c);
    if (finest) est.objective.push_back(obj);

    for (int it = 0; it < cfg.irls_iterations; ++it) {
      Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(np, np);
      Eigen::VectorXd atb = Eigen::VectorXd::Zero(np);
      Eigen::VectorXd j(np);
      for (std::size_t k = 0; k < res.r.size(); ++k) {
        const double w = tukey_influence_ratio(res.r[k], c);
        if (w <= 0.0) continue;
        const int x = res.px[k], y = res.py[k];
        bool ok = false;
        const Eigen::Vector2d d = velocity(theta, x, y);
        const double ix = bilinear_sample(lv.gx1, x + d.x(), y + d.y(), ok);
        const double iy = bilinear_sample(lv.gy1, x + d.x(), y + d.y(), ok);
        if (!ok) continue;
        fill_jacobian(cfg.model, x, y, ix, iy, j);
        ata.noalias() += w * j * j.transpose();
        atb.noalias() += w * res.r[k] * j;
      }
      Eigen::VectorXd delta = ata.ldlt().solve(-atb);
      if (!delta.allFinite()) break;

      // damped acceptance keeps sum rho(r) non-increasing
      bool accepted = false;
      for (int half = 0; half < 8; ++half) {
        MotionParams trial = theta;
        trial.a += delta;
        Residuals tres = compute_residuals(lv, trial);
        if (!tres.r.empty()) {
          const double tobj = tres.objective(c);
          if (tobj <= obj) {
            theta = trial;
            res = std::move(tres);
            obj = tobj;
            accepted = true;
            break;
          }
        }
        delta *= 0.5;
      }
      if (!accepted) break;
      if (finest) est.objective.push_back(obj);
      if (delta.norm() < cfg.convergence_eps) break;
    }
    if (li > 0) upscale_params(theta);
  }

  est.params = theta;
  est.tukey_scale = cfg.tukey_scale;

  // final residual/weight maps at full resolution
  const int h = static_cast<int>(frame_t.rows()), w = static_cast<int>(frame_t.cols());
  est.residuals = FloatImage::Zero(h, w);
  est.valid = ByteImage::Zero(h, w);
  std::vector<double> final_r;
  final_r.reserve(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d d = velocity(theta, x, y);
      bool ok = false;
      const float s = bilinear_sample(frame_t1, x + d.x(), y + d.y(), ok);
      if (!ok) continue;
      est.valid(y, x) = 1;
      est.residuals(y, x) = s - frame_t(y, x);
      final_r.push_back(est.residuals(y, x));
    }
  if (est.tukey_scale <= 0.0) est.tukey_scale = auto_scale(final_r);
  est.weights = FloatImage::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (est.valid(y, x))
        est.weights(y, x) =
            static_cast<float>(tukey_influence_ratio(est.residuals(y, x), est.tukey_scale));
  return est;
}

MotionEstimate estimate_dominant_motion(const ByteImage& frame_t, const ByteImage& frame_t1,
                                        const RobustConfig& cfg) {
  return estimate_dominant_motion(frame_t.cast<float>().eval(), frame_t1.cast<float>().eval(),
                                  cfg);
}

}  // namespace tubelet
