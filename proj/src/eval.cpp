#include "tubelet/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace tubelet {

namespace {

double score_sequences(int gt_begin, const std::vector<BoundingBox>& gt_boxes, int dt_begin,
                       const std::vector<BoundingBox>& dt_boxes, bool spatial_only) {
  auto gt_at = [&](int t) -> BoundingBox {
    const int i = t - gt_begin;
    if (i < 0 || i >= static_cast<int>(gt_boxes.size())) return {};
    return gt_boxes[static_cast<std::size_t>(i)];
  };
  auto dt_at = [&](int t) -> BoundingBox {
    const int i = t - dt_begin;
    if (i < 0 || i >= static_cast<int>(dt_boxes.size())) return {};
    return dt_boxes[static_cast<std::size_t>(i)];
  };

  const int lo = spatial_only ? gt_begin : std::min(gt_begin, dt_begin);
  const int hi = spatial_only
                     ? gt_begin + static_cast<int>(gt_boxes.size()) - 1
                     : std::max(gt_begin + static_cast<int>(gt_boxes.size()),
                                dt_begin + static_cast<int>(dt_boxes.size())) -
                           1;
  double sum = 0.0;
  int gamma = 0;
  for (int t = lo; t <= hi; ++t) {
    const BoundingBox g = gt_at(t), d = dt_at(t);
    if (spatial_only) {
      if (g.empty()) continue;
    } else if (g.empty() && d.empty()) {
      continue;
    }
    ++gamma;
    sum += iou(g, d);
  }
  if (gamma == 0) throw std::invalid_argument("localization_score: both sequences empty");
  return sum / gamma;
}

}  // namespace

double localization_score(const GroundTruthInstance& gt, const Tubelet& dt, bool spatial_only) {
  return score_sequences(gt.t_begin, gt.boxes, dt.t_begin, dt.boxes, spatial_only);
}

double localization_score(const Tubelet& a, const Tubelet& b) {
  return score_sequences(a.t_begin, a.boxes, b.t_begin, b.boxes, false);
}

double average_best_overlap(const std::vector<GroundTruthInstance>& instances,
                            const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                            bool spatial_only) {
  if (instances.empty())
    throw std::invalid_argument("average_best_overlap: need at least one instance");
  double sum = 0.0;
  for (const GroundTruthInstance& gt : instances) {
    double best = 0.0;
    auto it = pool_by_video.find(gt.video);
    if (it != pool_by_video.end())
      for (const Tubelet& dt : it->second)
        best = std::max(best, localization_score(gt, dt, spatial_only));
    sum += best;
  }
  return sum / static_cast<double>(instances.size());
}

EvalReport evaluate(const std::vector<GroundTruthInstance>& gts,
                    const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                    double sigma, bool spatial_only) {
  EvalReport rep;
  rep.sigma = sigma;

  std::map<std::string, std::vector<const GroundTruthInstance*>> by_class;
  for (const GroundTruthInstance& gt : gts) by_class[gt.label].push_back(&gt);

  for (const auto& [label, instances] : by_class) {
    double abo_sum = 0.0;
    int hits = 0;
    for (const GroundTruthInstance* gt : instances) {
      double best = 0.0;
      auto it = pool_by_video.find(gt->video);
      if (it != pool_by_video.end())
        for (const Tubelet& dt : it->second)
          best = std::max(best, localization_score(*gt, dt, spatial_only));
      abo_sum += best;
      if (best > sigma) ++hits;
    }
    rep.abo_per_class[label] = abo_sum / static_cast<double>(instances.size());
    rep.recall_per_class[label] =
        static_cast<double>(hits) / static_cast<double>(instances.size());
  }

  for (const auto& [label, abo] : rep.abo_per_class) rep.mabo += abo;
  for (const auto& [label, rec] : rep.recall_per_class) rep.mean_recall += rec;
  if (!by_class.empty()) {
    rep.mabo /= static_cast<double>(by_class.size());
    rep.mean_recall /= static_cast<double>(by_class.size());
  }
  for (const auto& [video, pool] : pool_by_video) rep.proposals_per_video[video] = pool.size();
  return rep;
}

bool correct_localization(const GroundTruthInstance& gt, const Tubelet& dt,
                          const std::string& predicted_class, double sigma) {
  if (predicted_class != gt.label) return false;
  return localization_score(gt, dt) > sigma;
}

BoundingBox envelope_box(const Tubelet& t) {
  BoundingBox box;
  for (const BoundingBox& b : t.boxes) box.include(b);
  return box;
}

}  // namespace tubelet
