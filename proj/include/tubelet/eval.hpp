#pragma once

#include "tubelet/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace tubelet {

/// One annotated action instance: per-frame boxes, empty outside the action.
struct GroundTruthInstance {
  std::string video;
  std::string label;
  int t_begin = 0;
  std::vector<BoundingBox> boxes;

  int t_end() const { return t_begin + static_cast<int>(boxes.size()) - 1; }
  BoundingBox box_at(int t) const {
    if (t < t_begin || t > t_end()) return {};
    return boxes[static_cast<std::size_t>(t - t_begin)];
  }
};

/// Mean per-frame IoU over the frames where at least one of the two boxes is
/// non-empty; frames with exactly one box contribute 0. Throws when both
/// sequences are empty. spatial_only restricts the frame set to the ground
/// truth's frames (no penalty for temporal misalignment).
double localization_score(const GroundTruthInstance& gt, const Tubelet& dt,
                          bool spatial_only = false);

/// Same score between two tubelets (used by overlap pruning).
double localization_score(const Tubelet& a, const Tubelet& b);

/// Mean over instances of the best score over same-video proposals; the max
/// over an empty pool is 0. All instances are expected to share one class.
double average_best_overlap(const std::vector<GroundTruthInstance>& instances,
                            const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                            bool spatial_only = false);

struct EvalReport {
  std::map<std::string, double> abo_per_class;
  double mabo = 0.0;
  std::map<std::string, double> recall_per_class;
  double mean_recall = 0.0;
  double sigma = 0.5;
  std::map<std::string, std::size_t> proposals_per_video;
};

EvalReport evaluate(const std::vector<GroundTruthInstance>& gts,
                    const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                    double sigma = 0.5, bool spatial_only = false);

/// true iff the class matches and S(gt, dt) > sigma (strict).
bool correct_localization(const GroundTruthInstance& gt, const Tubelet& dt,
                          const std::string& predicted_class, double sigma);

/// Tight cuboid enveloping a tubelet (the subvolume-style overlap helper).
BoundingBox envelope_box(const Tubelet& t);

}  // namespace tubelet
