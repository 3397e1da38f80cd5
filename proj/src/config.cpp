#include "tubelet/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tubelet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) { return std::stoi(v); }
double to_double(const std::string& v) { return std::stod(v); }

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_segment_key(SegmentationConfig& seg, const std::string& key, const std::string& value,
                       const std::string& full) {
  if (key == "sigma") seg.smoothing_sigma = to_double(value);
  else if (key == "c") seg.merge_threshold_c = to_double(value);
  else if (key == "smin") seg.min_segment_size = to_int(value);
  else if (key == "connectivity") seg.connectivity = to_int(value);
  else throw std::invalid_argument("unknown config key: " + full);
}

}  // namespace

void apply_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);

  if (section == "motion") {
    if (name == "model") {
      if (value == "affine") cfg.motion.model = MotionModel::affine;
      else if (value == "quadratic") cfg.motion.model = MotionModel::quadratic;
      else throw std::invalid_argument("motion.model must be affine or quadratic");
    } else if (name == "tukey_scale") cfg.motion.tukey_scale = to_double(value);
    else if (name == "pyramid_levels") cfg.motion.pyramid_levels = to_int(value);
    else if (name == "irls_iterations") cfg.motion.irls_iterations = to_int(value);
    else if (name == "convergence_eps") cfg.motion.convergence_eps = to_double(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "imotion") {
    if (name == "se_radius") cfg.imotion_se_radius = to_int(value);
    else if (name == "binarize_tau") cfg.imotion_binarize_tau = to_int(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "segment_vid") {
    apply_segment_key(cfg.segment_vid, name, value, key);
  } else if (section == "segment_imotion") {
    apply_segment_key(cfg.segment_imotion, name, value, key);
  } else if (section == "grouping") {
    if (name == "functions") {
      cfg.grouping_functions = split_list(value);
      for (const std::string& f : cfg.grouping_functions) GroupingFunction::parse(f);
    } else if (name == "discard_min_size") cfg.grouping.discard_min_size = to_int(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "features") {
    if (name == "color_bins_per_channel") cfg.features.color_bins_per_channel = to_int(value);
    else if (name == "texture_orientations") cfg.features.texture_orientations = to_int(value);
    else if (name == "texture_magnitudes") cfg.features.texture_magnitudes = to_int(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "track") {
    if (name == "grid_stride") cfg.track.grid_stride = to_int(value);
    else if (name == "resample_interval") cfg.track.resample_interval = to_int(value);
    else if (name == "max_length") cfg.track.max_length = to_int(value);
    else if (name == "max_step") cfg.track.max_step = to_double(value);
    else if (name == "min_displacement") cfg.track.min_displacement = to_double(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "refine") {
    if (name == "p") cfg.refine.motion_keep_p = to_int(value);
    else if (name == "overlap_threshold") cfg.refine.overlap_threshold = to_double(value);
    else if (name == "target_segments") cfg.refine.target_segments = to_int(value);
    else if (name == "min_length") cfg.refine.min_length = to_int(value);
    else if (name == "pad_fraction") cfg.refine.pad_fraction = to_double(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "eval") {
    if (name == "sigma") cfg.eval_sigma = to_double(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } else if (section == "pipeline") {
    if (name == "mode") {
      if (value == "trimmed") cfg.mode = PipelineMode::trimmed;
      else if (value == "untrimmed") cfg.mode = PipelineMode::untrimmed;
      else throw std::invalid_argument("pipeline.mode must be trimmed or untrimmed");
    } else if (name == "threads") cfg.threads = to_int(value);
    else if (name == "seed") cfg.refine.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw std::invalid_argument("unknown config key: " + key);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  PipelineConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_config_key(cfg, section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

namespace {

const char* const kKnownKeys[] = {
    "motion.model", "motion.tukey_scale", "motion.pyramid_levels", "motion.irls_iterations",
    "motion.convergence_eps", "imotion.se_radius", "imotion.binarize_tau", "segment_vid.sigma",
    "segment_vid.c", "segment_vid.smin", "segment_vid.connectivity", "segment_imotion.sigma",
    "segment_imotion.c", "segment_imotion.smin", "segment_imotion.connectivity",
    "grouping.functions", "grouping.discard_min_size", "features.color_bins_per_channel",
    "features.texture_orientations", "features.texture_magnitudes", "track.grid_stride",
    "track.resample_interval", "track.max_length", "track.max_step", "track.min_displacement",
    "refine.p", "refine.overlap_threshold", "refine.target_segments", "refine.min_length",
    "refine.pad_fraction", "eval.sigma", "pipeline.mode", "pipeline.threads", "pipeline.seed"};

}  // namespace

void apply_env_overrides(PipelineConfig& cfg) {
  for (const char* key : kKnownKeys) {
    std::string env = "TUBELET_";
    for (const char* p = key; *p; ++p) {
      char c = *p;
      if (c == '.' || c == '-') c = '_';
      env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* v = std::getenv(env.c_str())) apply_config_key(cfg, key, v);
  }
}

}  // namespace tubelet
