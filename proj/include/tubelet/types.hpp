#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace tubelet {

/// Row-major dense rasters; (row, col) == (y, x).
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ByteImage = Image<std::uint8_t>;
using FloatImage = Image<float>;
using LabelImage = Image<std::int32_t>;

/// Axis-aligned box with inclusive pixel coordinates. A default-constructed
/// box is the explicit empty box.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = -1;
  int y_max = -1;

  bool empty() const { return x_max < x_min || y_max < y_min; }
  std::int64_t width() const { return empty() ? 0 : x_max - x_min + 1; }
  std::int64_t height() const { return empty() ? 0 : y_max - y_min + 1; }
  std::int64_t area() const { return width() * height(); }

  void include(int x, int y) {
    if (empty()) {
      x_min = x_max = x;
      y_min = y_max = y;
    } else {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }

  void include(const BoundingBox& other) {
    if (other.empty()) return;
    include(other.x_min, other.y_min);
    include(other.x_max, other.y_max);
  }

  BoundingBox intersect(const BoundingBox& other) const {
    if (empty() || other.empty()) return {};
    BoundingBox r{std::max(x_min, other.x_min), std::max(y_min, other.y_min),
                  std::min(x_max, other.x_max), std::min(y_max, other.y_max)};
    if (r.empty()) return {};
    return r;
  }

  BoundingBox clamped(int width, int height) const {
    if (empty()) return {};
    BoundingBox r{std::clamp(x_min, 0, width - 1), std::clamp(y_min, 0, height - 1),
                  std::clamp(x_max, 0, width - 1), std::clamp(y_max, 0, height - 1)};
    if (r.empty()) return {};
    return r;
  }

  bool contains(double x, double y) const {
    return !empty() && x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Intersection-over-union on inclusive-coordinate boxes.
/// Areas use (x_max - x_min + 1) * (y_max - y_min + 1).
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a.empty() || b.empty()) return 0.0;
  const BoundingBox inter = a.intersect(b);
  if (inter.empty()) return 0.0;
  const double ia = static_cast<double>(inter.area());
  return ia / (static_cast<double>(a.area()) + static_cast<double>(b.area()) - ia);
}

/// One proposal: a contiguous frame span with one box per frame.
struct Tubelet {
  int t_begin = 0;
  std::vector<BoundingBox> boxes;

  // provenance
  std::string source;       // "vid" | "imotion"
  std::string grouping_fn;  // e.g. "motion", "all"
  std::string refinement;   // accumulated refinement flags, e.g. "TS"

  // motion content, filled by trajectory assignment
  std::int64_t traj_total = 0;
  std::vector<int> traj_profile;  // per frame in span

  int t_end() const { return t_begin + static_cast<int>(boxes.size()) - 1; }
  int length() const { return static_cast<int>(boxes.size()); }

  /// Box at absolute frame t, empty outside the span.
  BoundingBox box_at(int t) const {
    if (t < t_begin || t > t_end()) return {};
    return boxes[static_cast<std::size_t>(t - t_begin)];
  }
};

}  // namespace tubelet
