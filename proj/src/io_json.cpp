#include "tubelet/io_json.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace tubelet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

void check_schema(const json& j, const fs::path& path) {
  const int v = j.value("schema_version", 0);
  if (v / 100 != kSchemaVersion / 100 && v != kSchemaVersion)
    throw std::runtime_error("unsupported schema_version " + std::to_string(v) + " in " +
                             path.string());
}

json boxes_to_frames(int t_begin, const std::vector<BoundingBox>& boxes) {
  json frames = json::array();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BoundingBox& b = boxes[i];
    if (b.empty()) continue;
    frames.push_back({{"t", t_begin + static_cast<int>(i)},
                      {"x_min", b.x_min},
                      {"y_min", b.y_min},
                      {"x_max", b.x_max},
                      {"y_max", b.y_max}});
  }
  return frames;
}

void frames_to_boxes(const json& frames, int& t_begin, std::vector<BoundingBox>& boxes) {
  boxes.clear();
  if (frames.empty()) {
    t_begin = 0;
    return;
  }
  int lo = frames.front().at("t").get<int>(), hi = lo;
  for (const json& f : frames) {
    const int t = f.at("t").get<int>();
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  t_begin = lo;
  boxes.assign(static_cast<std::size_t>(hi - lo + 1), BoundingBox{});
  for (const json& f : frames) {
    BoundingBox b{f.at("x_min").get<int>(), f.at("y_min").get<int>(), f.at("x_max").get<int>(),
                  f.at("y_max").get<int>()};
    boxes[static_cast<std::size_t>(f.at("t").get<int>() - lo)] = b;
  }
}

}  // namespace

void write_proposals(const fs::path& path, const std::vector<Tubelet>& proposals) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json arr = json::array();
  for (const Tubelet& t : proposals) {
    json p;
    p["source"] = t.source;
    p["grouping_fn"] = t.grouping_fn;
    p["refinement"] = t.refinement;
    p["traj_total"] = t.traj_total;
    p["frames"] = boxes_to_frames(t.t_begin, t.boxes);
    arr.push_back(std::move(p));
  }
  j["proposals"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<Tubelet> read_proposals(const fs::path& path) {
  const json j = load_json(path);
  check_schema(j, path);
  std::vector<Tubelet> out;
  for (const json& p : j.at("proposals")) {
    Tubelet t;
    t.source = p.value("source", "");
    t.grouping_fn = p.value("grouping_fn", "");
    t.refinement = p.value("refinement", "");
    t.traj_total = p.value("traj_total", std::int64_t{0});
    frames_to_boxes(p.at("frames"), t.t_begin, t.boxes);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<GroundTruthInstance> read_ground_truth(const fs::path& path) {
  const json j = load_json(path);
  std::vector<GroundTruthInstance> out;
  for (const json& g : j) {
    GroundTruthInstance gt;
    gt.video = g.at("video").get<std::string>();
    gt.label = g.at("class").get<std::string>();
    frames_to_boxes(g.at("frames"), gt.t_begin, gt.boxes);
    if (gt.boxes.empty())
      throw std::runtime_error("ground-truth instance without boxes in " + path.string());
    out.push_back(std::move(gt));
  }
  return out;
}

void write_ground_truth(const fs::path& path, const std::vector<GroundTruthInstance>& gts) {
  json j = json::array();
  for (const GroundTruthInstance& gt : gts) {
    json g;
    g["video"] = gt.video;
    g["class"] = gt.label;
    g["frames"] = boxes_to_frames(gt.t_begin, gt.boxes);
    j.push_back(std::move(g));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << j.dump(2) << "\n";
}

void write_trajectories(const fs::path& path, const std::vector<Trajectory>& trajs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  for (const Trajectory& tr : trajs) {
    json j;
    j["start_frame"] = tr.start_frame;
    json pts = json::array();
    for (const auto& p : tr.points) pts.push_back({p.x(), p.y()});
    j["points"] = std::move(pts);
    out << j.dump() << "\n";
  }
}

std::vector<Trajectory> read_trajectories(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Trajectory tr;
    tr.start_frame = j.at("start_frame").get<int>();
    for (const json& p : j.at("points"))
      tr.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    out.push_back(std::move(tr));
  }
  return out;
}

void write_report_json(const fs::path& path, const EvalReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["sigma"] = report.sigma;
  j["mabo"] = report.mabo;
  j["mean_recall"] = report.mean_recall;
  j["abo_per_class"] = report.abo_per_class;
  j["recall_per_class"] = report.recall_per_class;
  j["proposals_per_video"] = report.proposals_per_video;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << j.dump(2) << "\n";
}

void write_report_csv(const fs::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "class,abo,recall\n";
  for (const auto& [label, abo] : report.abo_per_class)
    out << label << "," << abo << "," << report.recall_per_class.at(label) << "\n";
  out << "MEAN," << report.mabo << "," << report.mean_recall << "\n";
}

void write_recall_curve_csv(const fs::path& path, const std::vector<GroundTruthInstance>& gts,
                            const std::map<std::string, std::vector<Tubelet>>& pool_by_video,
                            const std::vector<double>& sigmas) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "sigma,mean_recall\n";
  for (double s : sigmas) {
    const EvalReport r = evaluate(gts, pool_by_video, s);
    out << s << "," << r.mean_recall << "\n";
  }
}

}  // namespace tubelet
