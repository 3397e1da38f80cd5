#include "tubelet/pipeline.hpp"

#include "tubelet/features.hpp"
#include "tubelet/grouping.hpp"
#include "tubelet/refine.hpp"

#include <atomic>
#include <thread>

namespace tubelet {

namespace {

int worker_count(int configured) {
  if (configured > 0) return configured;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// index-parallel loop; order-independent bodies only
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

std::vector<Tubelet> group_all(const VoxelLabeling& labeling, const FeatureVolume& features,
                               const PipelineConfig& cfg, const std::string& source,
                               int connectivity, int threads) {
  const std::vector<SuperVoxel> initial =
      build_initial_supervoxels(labeling, features, connectivity);
  const std::int64_t voxels = labeling.voxel_count();

  const int nfn = static_cast<int>(cfg.grouping_functions.size());
  std::vector<std::vector<Tubelet>> per_fn(static_cast<std::size_t>(nfn));
  parallel_for(nfn, threads, [&](int i) {
    const GroupingFunction g =
        GroupingFunction::parse(cfg.grouping_functions[static_cast<std::size_t>(i)]);
    GroupingResult res = run_grouping(initial, g, voxels, cfg.grouping);
    per_fn[static_cast<std::size_t>(i)] = extract_tubelets(res, source, g.name());
  });
  return union_phi(per_fn);
}

}  // namespace

ProposalRun propose(const VideoVolume& video, const PipelineConfig& cfg) {
  if (video.frame_count() < 2) throw VideoError("propose: need at least 2 frames");
  const int threads = worker_count(cfg.threads);
  const VideoVolume gray = to_grayscale(video);

  // dominant motion per frame pair, in parallel
  std::vector<MotionEstimate> estimates(static_cast<std::size_t>(gray.frame_count() - 1));
  parallel_for(gray.frame_count() - 1, threads, [&](int t) {
    estimates[static_cast<std::size_t>(t)] = estimate_dominant_motion(
        gray.frames[static_cast<std::size_t>(t)].channels[0],
        gray.frames[static_cast<std::size_t>(t) + 1].channels[0], cfg.motion);
  });

  ProposalRun run;
  IMotionMap raw = evidence_map(estimates);
  raw.frames.push_back(raw.frames.back());  // one map per frame
  run.imotion = close_map(raw, cfg.imotion_se_radius);
  run.binary = binarize(run.imotion, cfg.imotion_binarize_tau);

  run.seg_vid = segment(video, cfg.segment_vid);
  run.seg_imotion = segment(as_video(run.imotion), cfg.segment_imotion);

  const FeatureVolume features = compute_features(video, run.binary, cfg.features);
  run.proposals_vid =
      group_all(run.seg_vid, features, cfg, "vid", cfg.segment_vid.connectivity, threads);
  run.proposals_imotion = group_all(run.seg_imotion, features, cfg, "imotion",
                                    cfg.segment_imotion.connectivity, threads);
  return run;
}

std::vector<Tubelet> run_full(const VideoVolume& video, const PipelineConfig& cfg) {
  ProposalRun run = propose(video, cfg);
  const std::vector<Trajectory> trajs = track(video, cfg.track);
  return refine_pipeline(std::move(run.proposals_vid), std::move(run.proposals_imotion), trajs,
                         cfg.mode, cfg.refine, video.width, video.height);
}

}  // namespace tubelet
