#include "dapc/config.hpp"

#include <fstream>

#include "dapc/error.hpp"

namespace dapc {

using nlohmann::json;

StrategySpec PipelineConfig::strategy_spec() const {
  StrategySpec spec = dapc::strategy_spec(strategy);
  spec.granularity = granularity;
  return spec;
}

namespace {

json schedule_json(const BranchSchedule& s) {
  return {{"radii", s.radii}, {"group_sizes", s.group_sizes},
          {"samples_per_group", s.samples_per_group}};
}

BranchSchedule schedule_from(const json& j, BranchSchedule s) {
  if (j.contains("radii")) s.radii = j.at("radii").get<std::vector<std::vector<double>>>();
  if (j.contains("group_sizes")) s.group_sizes = j.at("group_sizes").get<std::vector<std::size_t>>();
  if (j.contains("samples_per_group")) s.samples_per_group = j.at("samples_per_group");
  validate(s);
  return s;
}

const char* mode_name(ApMode m) { return m == ApMode::R11 ? "R11" : "R40"; }
const char* kind_name(IouKind k) { return k == IouKind::ThreeD ? "3d" : "bev"; }

json provenance() {
  return {
      {"regions.boundaries", "reported: near 0-20 m, mid 20-40 m, far 40-70 m"},
      {"regions.overlap", "reported: 5 m between adjacent regions during training"},
      {"regions.metric", "choice: forward (LiDAR x) distance"},
      {"inference_overlap", "reported: overlap shrinks to 3 m at inference"},
      {"total_points", "reported: 16,384 input points"},
      {"reference_stats", "reported: train-split means 13.8k/3.6k/1.0k, deviations 1.8k/1.1k/0.5k"},
      {"strategy", "reported: strategy 4 (mid m2+1.5 sigma2, far m3+2 sigma3)"},
      {"granularity", "derived: rounding to multiples of 1024 reproduces 9,216/5,120/2,048"},
      {"schedules.radii", "reported for single-scale branches; multi-scale layers 2-4 scaled from layer 1"},
      {"schedules.group_sizes", "reported: 2,304-576-144-36 / 1,280-320-80-20 / 512-128-32-8"},
      {"schedules.samples_per_group", "convention: 16 neighbours per group"},
      {"proposal_ratios", "reported: 0.3 near, 0.5 mid, 0.2 far"},
      {"bins", "convention: 3.0 m search range, 0.5 m bins, 12 heading bins, KITTI car prior"},
      {"focal", "convention: alpha 0.25, gamma 2.0"},
      {"augment", "convention: flip 0.5, scale 0.95-1.05, rotation +-pi/4, GT-AUG strict non-overlap"},
      {"eval", "convention: KITTI IoU 0.7, R11, easy/moderate/hard thresholds 40/25/25 px"},
  };
}

}  // namespace

json to_json(const DensityStats& stats) {
  return {{"m", stats.mean}, {"sigma", stats.sigma}, {"n_scenes", stats.n_scenes}};
}

DensityStats density_stats_from_json(const json& j) {
  DensityStats stats;
  stats.mean = j.at("m").get<std::array<double, 3>>();
  stats.sigma = j.at("sigma").get<std::array<double, 3>>();
  stats.n_scenes = j.value("n_scenes", std::size_t{0});
  return stats;
}

json config_to_json(const PipelineConfig& c) {
  json schedules = json::array();
  for (const auto& s : c.schedules) schedules.push_back(schedule_json(s));
  json levels = json::array();
  for (const auto& t : c.eval.rules.levels) {
    levels.push_back({{"min_height", t.min_height},
                      {"max_occlusion", t.max_occlusion},
                      {"max_truncation", t.max_truncation}});
  }
  return {
      {"regions",
       {{"boundaries", {c.regions.b1, c.regions.b2}},
        {"max_range", c.regions.max_range},
        {"overlap", c.regions.overlap},
        {"metric", c.regions.metric == RangeMetric::Forward ? "forward" : "euclidean"}}},
      {"inference_overlap", c.inference_overlap},
      {"total_points", c.total_points},
      {"reference_stats", to_json(c.reference_stats)},
      {"strategy", to_string(c.strategy)},
      {"granularity", c.granularity},
      {"multi_scale", c.multi_scale},
      {"schedules", schedules},
      {"proposal_ratios", c.proposal_ratios.ratios},
      {"bins",
       {{"search_range", c.bins.search_range},
        {"bin_size", c.bins.bin_size},
        {"num_angle_bins", c.bins.num_angle_bins},
        {"mean_size", {c.bins.mean_size.x(), c.bins.mean_size.y(), c.bins.mean_size.z()}}}},
      {"focal", {{"alpha_t", c.focal.alpha_t}, {"gamma", c.focal.gamma}}},
      {"augment",
       {{"flip_prob", c.augment.flip_prob},
        {"scale_range", {c.augment.scale_lo, c.augment.scale_hi}},
        {"rot_range", c.augment.rot_range},
        {"gtaug_max_inserts", c.augment.gtaug_max_inserts},
        {"gtaug_min_points", c.augment.gtaug_min_points},
        {"gtaug_iou_threshold", c.augment.gtaug_iou_threshold}}},
      {"eval",
       {{"iou_threshold", c.eval.iou_threshold},
        {"mode", mode_name(c.eval.mode)},
        {"kind", kind_name(c.eval.iou_kind)},
        {"class", c.eval.class_label},
        {"difficulty", levels}}},
      {"provenance", provenance()},
  };
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    if (j.contains("regions")) {
      const json& r = j.at("regions");
      if (r.contains("boundaries")) {
        const auto b = r.at("boundaries").get<std::array<double, 2>>();
        c.regions.b1 = b[0];
        c.regions.b2 = b[1];
      }
      c.regions.max_range = r.value("max_range", c.regions.max_range);
      c.regions.overlap = r.value("overlap", c.regions.overlap);
      if (r.contains("metric")) {
        const std::string m = r.at("metric");
        if (m != "forward" && m != "euclidean") {
          throw Error(ErrorKind::Validation, "metric must be forward or euclidean");
        }
        c.regions.metric = m == "forward" ? RangeMetric::Forward : RangeMetric::Euclidean;
      }
    }
    c.inference_overlap = j.value("inference_overlap", c.inference_overlap);
    c.total_points = j.value("total_points", c.total_points);
    if (j.contains("reference_stats")) c.reference_stats = density_stats_from_json(j.at("reference_stats"));
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    c.granularity = j.value("granularity", c.granularity);
    c.multi_scale = j.value("multi_scale", c.multi_scale);
    if (c.multi_scale) c.schedules = multi_scale_schedules();
    if (j.contains("schedules")) {
      const json& s = j.at("schedules");
      if (!s.is_array() || s.size() != 3) {
        throw Error(ErrorKind::Validation, "schedules needs three branch entries");
      }
      for (std::size_t b = 0; b < 3; ++b) c.schedules[b] = schedule_from(s[b], c.schedules[b]);
    }
    if (j.contains("proposal_ratios")) {
      c.proposal_ratios.ratios = j.at("proposal_ratios").get<std::array<double, 3>>();
    }
    if (j.contains("bins")) {
      const json& b = j.at("bins");
      c.bins.search_range = b.value("search_range", c.bins.search_range);
      c.bins.bin_size = b.value("bin_size", c.bins.bin_size);
      c.bins.num_angle_bins = b.value("num_angle_bins", c.bins.num_angle_bins);
      if (b.contains("mean_size")) {
        const auto m = b.at("mean_size").get<std::array<double, 3>>();
        c.bins.mean_size = {m[0], m[1], m[2]};
      }
    }
    if (j.contains("focal")) {
      c.focal.alpha_t = j.at("focal").value("alpha_t", c.focal.alpha_t);
      c.focal.gamma = j.at("focal").value("gamma", c.focal.gamma);
    }
    if (j.contains("augment")) {
      const json& a = j.at("augment");
      c.augment.flip_prob = a.value("flip_prob", c.augment.flip_prob);
      if (a.contains("scale_range")) {
        const auto s = a.at("scale_range").get<std::array<double, 2>>();
        c.augment.scale_lo = s[0];
        c.augment.scale_hi = s[1];
      }
      c.augment.rot_range = a.value("rot_range", c.augment.rot_range);
      c.augment.gtaug_max_inserts = a.value("gtaug_max_inserts", c.augment.gtaug_max_inserts);
      c.augment.gtaug_min_points = a.value("gtaug_min_points", c.augment.gtaug_min_points);
      c.augment.gtaug_iou_threshold = a.value("gtaug_iou_threshold", c.augment.gtaug_iou_threshold);
    }
    if (j.contains("eval")) {
      const json& e = j.at("eval");
      c.eval.iou_threshold = e.value("iou_threshold", c.eval.iou_threshold);
      if (e.contains("mode")) {
        const std::string m = e.at("mode");
        if (m != "R11" && m != "R40") throw Error(ErrorKind::Validation, "eval mode must be R11 or R40");
        c.eval.mode = m == "R40" ? ApMode::R40 : ApMode::R11;
      }
      if (e.contains("kind")) {
        const std::string k = e.at("kind");
        if (k != "3d" && k != "bev") throw Error(ErrorKind::Validation, "eval kind must be 3d or bev");
        c.eval.iou_kind = k == "bev" ? IouKind::Bev : IouKind::ThreeD;
      }
      c.eval.class_label = e.value("class", c.eval.class_label);
      if (e.contains("difficulty")) {
        const json& levels = e.at("difficulty");
        if (!levels.is_array() || levels.size() != 3) {
          throw Error(ErrorKind::Validation, "difficulty needs three levels");
        }
        for (std::size_t k = 0; k < 3; ++k) {
          auto& t = c.eval.rules.levels[k];
          t.min_height = levels[k].value("min_height", t.min_height);
          t.max_occlusion = levels[k].value("max_occlusion", t.max_occlusion);
          t.max_truncation = levels[k].value("max_truncation", t.max_truncation);
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("config: ") + e.what());
  }
  validate(c.regions);
  validate(c.inference_regions());
  validate(c.proposal_ratios);
  validate(c.bins);
  validate(c.focal);
  validate(c.augment);
  validate(c.eval.rules);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Malformed, path.string() + ": " + e.what());
  }
}

}  // namespace dapc
