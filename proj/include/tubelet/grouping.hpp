#pragma once

#include "tubelet/features.hpp"
#include "tubelet/segmentation.hpp"
#include "tubelet/types.hpp"

#include <Eigen/Dense>

#include <set>
#include <string>
#include <vector>

namespace tubelet {

/// A labeled 3D region: either an initial segment (leaf) or a merge product.
struct SuperVoxel {
  int id = -1;
  std::int64_t size = 0;
  Eigen::VectorXd h_motion;   // 76 bins, l1-normalized
  Eigen::VectorXd h_color;
  Eigen::VectorXd h_texture;
  int t_begin = 0;
  std::vector<BoundingBox> boxes;  // per frame in span
  std::set<int> neighbors;
  bool active = true;
  int child_a = -1, child_b = -1;  // -1 for leaves

  int t_end() const { return t_begin + static_cast<int>(boxes.size()) - 1; }
};

/// A sum of one or more of the five similarity measures.
struct GroupingFunction {
  bool motion = false, color = false, texture = false, size = false, fill = false;

  static GroupingFunction parse(const std::string& name);
  std::string name() const;
  int measure_count() const {
    return static_cast<int>(motion) + color + texture + size + fill;
  }
};

/// The five selected grouping functions, in canonical order:
/// motion, fill, motion+size+fill, all-but-motion, all.
std::vector<GroupingFunction> selected_grouping_functions();

struct MergeRecord {
  int a = -1, b = -1, result = -1;
  double similarity = 0.0;
};

struct MergeTree {
  int leaf_count = 0;
  std::vector<MergeRecord> merges;  // exactly leaf_count - 1 entries
};

struct GroupingConfig {
  std::int64_t discard_min_size = 500;
};

struct GroupingResult {
  MergeTree tree;
  std::vector<SuperVoxel> nodes;  // leaves then internal nodes, by id
  std::vector<int> retained;      // internal node ids kept as proposals
};

double histogram_intersection(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Sum of the selected measures; histograms by intersection, size by
/// 1 - (size_a+size_b)/video, fill by (size_a+size_b)/volume of the joint
/// tight spatiotemporal cuboid. Throws for non-neighbor pairs.
double similarity(const SuperVoxel& a, const SuperVoxel& b, const GroupingFunction& g,
                  std::int64_t video_voxels);

/// Histogram propagation: h = (size_a h_a + size_b h_b)/(size_a+size_b).
SuperVoxel merge_supervoxels(const SuperVoxel& a, const SuperVoxel& b, int new_id);

/// Leaves with histograms counted from the per-voxel feature rasters and
/// adjacency under the given connectivity.
std::vector<SuperVoxel> build_initial_supervoxels(const VoxelLabeling& labeling,
                                                  const FeatureVolume& features,
                                                  int connectivity = 6);

/// Agglomerates the globally most similar active neighbor pair until a single
/// node remains. Ties break to the lowest (min id, max id) pair.
GroupingResult run_grouping(std::vector<SuperVoxel> initial, const GroupingFunction& g,
                            std::int64_t video_voxels, const GroupingConfig& cfg = {});

/// Per-frame tight boxes of each retained super-voxel.
std::vector<Tubelet> extract_tubelets(const GroupingResult& result, const std::string& source,
                                      const std::string& grouping_fn);

/// Multiset union with exact-duplicate removal (identical box sequences).
std::vector<Tubelet> union_phi(const std::vector<std::vector<Tubelet>>& sets);

}  // namespace tubelet
