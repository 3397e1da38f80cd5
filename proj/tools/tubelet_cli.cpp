#include "tubelet/config.hpp"
#include "tubelet/eval.hpp"
#include "tubelet/io_json.hpp"
#include "tubelet/pipeline.hpp"
#include "tubelet/refine.hpp"
#include "tubelet/trajectory.hpp"
#include "tubelet/video.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace tubelet;
namespace fs = std::filesystem;

struct CommonOpts {
  std::string config_path;
  std::string video_path;
  std::string video_format = "image_dir";
  std::string out_path = "out";
  std::string mode;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

PipelineConfig make_config(const CommonOpts& o) {
  PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  apply_env_overrides(cfg);
  if (!o.mode.empty())
    cfg.mode = o.mode == "untrimmed" ? PipelineMode::untrimmed : PipelineMode::trimmed;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (o.seed_set) cfg.refine.seed = o.seed;
  return cfg;
}

VideoVolume load(const CommonOpts& o) {
  if (o.video_path.empty()) throw VideoError("--video is required");
  return load_video(o.video_path,
                    o.video_format == "y4m" ? VideoFormat::y4m : VideoFormat::image_dir);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_video) {
  cmd->add_option("--config", o.config_path, "pipeline config file");
  if (needs_video) {
    cmd->add_option("--video", o.video_path, "input video (frame directory or y4m)")->required();
    cmd->add_option("--format", o.video_format, "image_dir or y4m")
        ->check(CLI::IsMember({"image_dir", "y4m"}));
  }
  cmd->add_option("--out", o.out_path, "output path");
  cmd->add_option("--mode", o.mode, "trimmed or untrimmed")
      ->check(CLI::IsMember({"trimmed", "untrimmed"}));
  cmd->add_option("--threads", o.threads, "worker thread cap");
  cmd->add_option("--seed", o.seed, "RNG seed for temporal clustering")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

void save_labeling(const VoxelLabeling& l, const fs::path& dir) {
  fs::create_directories(dir);
  for (int t = 0; t < l.frame_count(); ++t) {
    // 24-bit label id packed into RGB
    ByteImage r(l.height, l.width), g(l.height, l.width), b(l.height, l.width);
    for (int y = 0; y < l.height; ++y)
      for (int x = 0; x < l.width; ++x) {
        const std::int32_t id = l.label(x, y, t);
        r(y, x) = static_cast<std::uint8_t>(id & 0xff);
        g(y, x) = static_cast<std::uint8_t>((id >> 8) & 0xff);
        b(y, x) = static_cast<std::uint8_t>((id >> 16) & 0xff);
      }
    char name[32];
    std::snprintf(name, sizeof(name), "labels_%06d.png", t);
    write_png(dir / name, {r, g, b});
  }
}

std::map<std::string, std::vector<Tubelet>> load_pools(const std::vector<std::string>& specs) {
  std::map<std::string, std::vector<Tubelet>> out;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    const std::string video = eq == std::string::npos ? "video" : s.substr(0, eq);
    const std::string path = eq == std::string::npos ? s : s.substr(eq + 1);
    std::vector<Tubelet> pool = read_proposals(path);
    auto& dst = out[video];
    dst.insert(dst.end(), std::make_move_iterator(pool.begin()),
               std::make_move_iterator(pool.end()));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised spatiotemporal action proposals from video"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* cmd_imotion = app.add_subcommand("imotion", "write iMotion maps as grayscale frames");
  add_common(cmd_imotion, o, true);

  auto* cmd_segment = app.add_subcommand("segment", "write super-voxel label rasters");
  std::string segment_on = "vid";
  add_common(cmd_segment, o, true);
  cmd_segment->add_option("--on", segment_on, "segment the video or its iMotion maps")
      ->check(CLI::IsMember({"vid", "imotion"}));

  auto* cmd_propose = app.add_subcommand("propose", "generate proposals (both sources)");
  add_common(cmd_propose, o, true);

  auto* cmd_refine = app.add_subcommand("refine", "prune and refine proposals");
  std::string refine_vid, refine_imotion, refine_trajs;
  add_common(cmd_refine, o, true);
  cmd_refine->add_option("--proposals-vid", refine_vid, "vid-sourced proposals JSON")->required();
  cmd_refine->add_option("--proposals-imotion", refine_imotion, "iMotion-sourced proposals JSON");
  cmd_refine->add_option("--trajectories", refine_trajs, "trajectories JSONL")->required();

  auto* cmd_eval = app.add_subcommand("eval", "score proposals against ground truth");
  std::vector<std::string> eval_pools;
  std::string eval_gt;
  bool eval_spatial_only = false;
  add_common(cmd_eval, o, false);
  cmd_eval->add_option("--proposals", eval_pools, "videoid=proposals.json (repeatable)")
      ->required();
  cmd_eval->add_option("--gt", eval_gt, "ground-truth JSON")->required();
  cmd_eval->add_flag("--spatial-only", eval_spatial_only,
                     "ignore temporal misalignment in the score");

  auto* cmd_overlay = app.add_subcommand("overlay", "render proposal boxes onto frames");
  std::string overlay_proposals;
  std::vector<int> overlay_select;
  add_common(cmd_overlay, o, true);
  cmd_overlay->add_option("--proposals", overlay_proposals, "proposals JSON")->required();
  cmd_overlay->add_option("--select", overlay_select, "proposal indices (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig cfg = make_config(o);

    if (cmd_imotion->parsed()) {
      const VideoVolume video = load(o);
      const IMotionMap maps =
          compute_imotion(to_grayscale(video), cfg.motion, cfg.imotion_se_radius);
      save_video(as_video(maps), o.out_path, "imotion_");
    } else if (cmd_segment->parsed()) {
      const VideoVolume video = load(o);
      VoxelLabeling labeling;
      if (segment_on == "vid") {
        labeling = segment(video, cfg.segment_vid);
      } else {
        const IMotionMap maps =
            compute_imotion(to_grayscale(video), cfg.motion, cfg.imotion_se_radius);
        labeling = segment(as_video(maps), cfg.segment_imotion);
      }
      save_labeling(labeling, o.out_path);
    } else if (cmd_propose->parsed()) {
      const VideoVolume video = load(o);
      ProposalRun run = propose(video, cfg);
      fs::create_directories(o.out_path);
      write_proposals(fs::path(o.out_path) / "proposals_vid.json", run.proposals_vid);
      write_proposals(fs::path(o.out_path) / "proposals_imotion.json", run.proposals_imotion);
      write_trajectories(fs::path(o.out_path) / "trajectories.jsonl", track(video, cfg.track));
    } else if (cmd_refine->parsed()) {
      const VideoVolume video = load(o);
      std::vector<Tubelet> vid = read_proposals(refine_vid);
      std::vector<Tubelet> imo =
          refine_imotion.empty() ? std::vector<Tubelet>{} : read_proposals(refine_imotion);
      const std::vector<Trajectory> trajs = read_trajectories(refine_trajs);
      const std::vector<Tubelet> refined =
          refine_pipeline(std::move(vid), std::move(imo), trajs, cfg.mode, cfg.refine,
                          video.width, video.height);
      write_proposals(o.out_path, refined);
    } else if (cmd_eval->parsed()) {
      const auto pools = load_pools(eval_pools);
      const auto gts = read_ground_truth(eval_gt);
      const EvalReport report = evaluate(gts, pools, cfg.eval_sigma, eval_spatial_only);
      fs::create_directories(o.out_path);
      write_report_json(fs::path(o.out_path) / "report.json", report);
      write_report_csv(fs::path(o.out_path) / "report.csv", report);
      std::vector<double> sigmas;
      for (double s = 0.1; s < 0.95; s += 0.1) sigmas.push_back(s);
      write_recall_curve_csv(fs::path(o.out_path) / "recall_curve.csv", gts, pools, sigmas);
      std::cout << "MABO " << report.mabo << " recall@" << report.sigma << " "
                << report.mean_recall << "\n";
    } else if (cmd_overlay->parsed()) {
      const VideoVolume video = load(o);
      const std::vector<Tubelet> proposals = read_proposals(overlay_proposals);
      static const std::array<std::array<std::uint8_t, 3>, 6> palette{
          {{255, 0, 0}, {0, 255, 0}, {0, 128, 255}, {255, 255, 0}, {255, 0, 255}, {0, 255, 255}}};
      std::vector<OverlayBox> boxes;
      std::vector<int> selection = overlay_select;
      if (selection.empty())
        for (int i = 0; i < static_cast<int>(proposals.size()); ++i) selection.push_back(i);
      for (std::size_t k = 0; k < selection.size(); ++k) {
        const int idx = selection[k];
        if (idx < 0 || idx >= static_cast<int>(proposals.size()))
          throw std::runtime_error("--select index out of range: " + std::to_string(idx));
        const Tubelet& t = proposals[static_cast<std::size_t>(idx)];
        const auto& c = palette[k % palette.size()];
        for (int i = 0; i < t.length(); ++i) {
          if (t.boxes[static_cast<std::size_t>(i)].empty()) continue;
          boxes.push_back({t.t_begin + i, t.boxes[static_cast<std::size_t>(i)], c[0], c[1], c[2]});
        }
      }
      render_overlay(video, boxes, o.out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
