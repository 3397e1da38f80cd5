#pragma once

#include "tubelet/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tubelet {

enum class MotionModel { affine, quadratic };

/// Dominant 2D parametric motion for one frame pair.
/// affine:    w(p) = (a1 + a2 x + a3 y, a4 + a5 x + a6 y)
/// quadratic: adds a7, a8:
///            w(p) = (a1 + a2 x + a3 y + a7 x^2 + a8 xy,
///                    a4 + a5 x + a6 y + a7 xy + a8 y^2)
struct MotionParams {
  MotionModel model = MotionModel::affine;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(6);

  static MotionParams zero(MotionModel m = MotionModel::affine) {
    MotionParams p;
    p.model = m;
    p.a = Eigen::VectorXd::Zero(m == MotionModel::affine ? 6 : 8);
    return p;
  }
};

Eigen::Vector2d velocity(const MotionParams& params, double x, double y);

struct RobustConfig {
  MotionModel model = MotionModel::affine;
  double tukey_scale = 0.0;  // <= 0: auto, 4.6848 * MAD of residuals
  int pyramid_levels = 3;
  int irls_iterations = 20;
  double convergence_eps = 1e-6;  // on the parameter update norm
};

struct MotionEstimate {
  MotionParams params;
  FloatImage residuals;       // displaced frame difference at the solution
  ByteImage valid;            // 1 where the warped sample stays in frame
  FloatImage weights;         // psi(r)/r in [0,1]; 0 at invalid pixels
  double tukey_scale = 0.0;   // scale used for the final weights
  bool degenerate = false;    // no intensity gradient anywhere
  std::vector<double> objective;  // sum rho(r) per accepted finest-level iteration
};

/// psi(r)/r for the Tukey biweight: (1 - (r/C)^2)^2 for |r| <= C, else 0.
/// Already in [0,1]; the supremum 1 is attained at r -> 0.
double tukey_influence_ratio(double r, double scale);

/// Coarse-to-fine IRLS fit of the dominant motion between two single-channel
/// frames of equal size.
MotionEstimate estimate_dominant_motion(const FloatImage& frame_t, const FloatImage& frame_t1,
                                        const RobustConfig& cfg);

MotionEstimate estimate_dominant_motion(const ByteImage& frame_t, const ByteImage& frame_t1,
                                        const RobustConfig& cfg);

/// Bilinear sample; valid=false when (x,y) leaves [0,cols-1]x[0,rows-1].
float bilinear_sample(const FloatImage& img, double x, double y, bool& valid);

}  // namespace tubelet
