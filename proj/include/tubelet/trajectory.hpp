#pragma once

#include "tubelet/types.hpp"
#include "tubelet/video.hpp"

#include <vector>

namespace tubelet {

/// One tracked point path: one sub-pixel position per frame starting at
/// start_frame.
struct Trajectory {
  int start_frame = 0;
  std::vector<Eigen::Vector2d> points;

  int length() const { return static_cast<int>(points.size()); }
  int end_frame() const { return start_frame + length() - 1; }
};

struct TrackConfig {
  int grid_stride = 5;        // seed spacing, pixels
  int resample_interval = 5;  // frames between seeding passes
  int max_length = 15;        // frames
  double max_step = 10.0;     // px per frame; larger steps terminate the track
  double min_displacement = 2.0;  // total px; static tracks are discarded
  int window_radius = 7;      // patch half-size for alignment
  int pyramid_levels = 2;
};

/// Grid-seeded point tracks propagated by pyramidal translational
/// least-squares patch alignment.
std::vector<Trajectory> track(const VideoVolume& v, const TrackConfig& cfg = {});

struct TrajectoryAssignment {
  std::int64_t total = 0;         // member trajectories
  std::vector<int> profile;       // nrTraj per frame of the tubelet span
};

/// A trajectory belongs to a tubelet iff strictly more than half of its
/// points fall inside the tubelet's box on the corresponding frames.
/// profile[i] counts members whose point at frame i is inside box i.
TrajectoryAssignment assign(const std::vector<Trajectory>& trajs, const Tubelet& t);

}  // namespace tubelet
