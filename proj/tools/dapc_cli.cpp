// dapc: command-line front end. JSON goes to stdout, logs to stderr; the exit
// code is 0 on success and the ErrorKind value on a library error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dapc/augmentation.hpp"
#include "dapc/bench.hpp"
#include "dapc/config.hpp"
#include "dapc/error.hpp"
#include "dapc/eval.hpp"
#include "dapc/kitti_io.hpp"
#include "dapc/numeric.hpp"
#include "dapc/parallel.hpp"
#include "dapc/partition.hpp"
#include "dapc/sampling.hpp"
#include "dapc/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dapc;

namespace {

constexpr int kUsageExit = 2;

void log(const std::string& msg) { std::cerr << "[dapc] " << msg << '\n'; }

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

// KITTI object layout: <root>/velodyne/<id>.bin, label_2/<id>.txt, calib/<id>.txt.
struct KittiLayout {
  fs::path root;
  fs::path velodyne(const std::string& id) const { return root / "velodyne" / (id + ".bin"); }
  fs::path label(const std::string& id) const { return root / "label_2" / (id + ".txt"); }
  fs::path calib(const std::string& id) const { return root / "calib" / (id + ".txt"); }
};

std::vector<std::string> stems(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Scans under <dir>/velodyne when present, otherwise *.bin directly in <dir>.
std::vector<fs::path> scan_files(const fs::path& dir) {
  const fs::path base = fs::is_directory(dir / "velodyne") ? dir / "velodyne" : dir;
  std::vector<fs::path> files;
  for (const auto& id : stems(base, ".bin")) files.push_back(base / (id + ".bin"));
  return files;
}

std::string frame_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

RangeMetric parse_metric(const std::string& s) {
  if (s == "forward") return RangeMetric::Forward;
  if (s == "euclidean") return RangeMetric::Euclidean;
  throw Error(ErrorKind::Validation, "metric must be forward or euclidean");
}

json box_json(const OrientedBox3D& b) {
  return {{"center", {b.center.x(), b.center.y(), b.center.z()}},
          {"size", {b.length(), b.width(), b.height()}},
          {"yaw", b.yaw}};
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::uint64_t seed = 0;

  PipelineConfig config() const {
    return config_path.empty() ? PipelineConfig{} : load_config(config_path);
  }
};

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::size_t frames = 4;
  std::array<std::size_t, 3> cars{2, 2, 1};
  double bin_width = 5.0;
  std::string dets;  // optional: ground-truth boxes as score-1 detection files
};

void run_synth(const Common& common, const SynthArgs& a) {
  SyntheticSceneSpec spec;
  spec.n_cars = a.cars;
  spec.bin_width = a.bin_width;
  validate(spec);
  const KittiLayout layout{a.out};
  for (const char* sub : {"velodyne", "label_2", "calib"}) fs::create_directories(layout.root / sub);
  const Calibration calib = canonical_calibration();
  json frames = json::array();
  for (std::size_t i = 0; i < a.frames; ++i) {
    const std::string id = frame_name(i);
    const auto scene = generate_scene(spec, derive_seed(common.seed, i));
    write_velodyne(layout.velodyne(id), scene.cloud);
    write_labels(layout.label(id), scene.gts, calib);
    write_calibration(layout.calib(id), calib);
    if (!a.dets.empty()) {
      fs::create_directories(a.dets);
      std::vector<Detection> dets;
      for (const auto& box : boxes_of(scene.gts)) dets.push_back({box, 1.0, id});
      write_detections(fs::path(a.dets) / (id + ".txt"), dets);
    }
    frames.push_back(json{{"frame", id}, {"points", scene.cloud.points.size()}, {"cars", scene.gts.size()}});
  }
  log("wrote " + std::to_string(a.frames) + " frames to " + a.out);
  emit({{"out", a.out}, {"seed", common.seed}, {"frames", frames}});
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string dir;
  std::optional<std::vector<double>> boundaries;
  std::optional<double> max_range;
  double bin_width = 5.0;
  std::optional<std::string> metric;
  std::string csv;
};

void run_stats(const Common& common, const StatsArgs& a) {
  const PipelineConfig config = common.config();
  RegionSpec spec = config.regions;
  spec.overlap = 0.0;
  if (a.boundaries) {
    if (a.boundaries->size() != 2) throw Error(ErrorKind::Validation, "--boundaries needs two values");
    spec.b1 = (*a.boundaries)[0];
    spec.b2 = (*a.boundaries)[1];
  }
  if (a.max_range) spec.max_range = *a.max_range;
  if (a.metric) spec.metric = parse_metric(*a.metric);
  validate(spec);

  const auto files = scan_files(a.dir);
  log("reading " + std::to_string(files.size()) + " scans from " + a.dir);
  std::vector<PointCloud> clouds(files.size());
  std::vector<std::exception_ptr> failures(files.size());
  parallel_for(files.size(), default_thread_count(), [&](std::size_t i) {
    try {
      clouds[i] = read_velodyne(files[i]);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  const DensityStats stats = compute_density_stats(clouds, spec, default_thread_count());
  const auto histogram = histogram_by_range(clouds, a.bin_width, spec);
  json bins = json::array();
  for (const auto& b : histogram) bins.push_back(json{{"bin_start", b.start}, {"mean_count", b.mean_count}});
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.csv);
    out << "bin_start,mean_count\n";
    for (const auto& b : histogram) out << b.start << ',' << b.mean_count << '\n';
    log("histogram written to " + a.csv);
  }
  emit({{"stats", to_json(stats)},
        {"boundaries", {spec.b1, spec.b2}},
        {"max_range", spec.max_range},
        {"bin_width", a.bin_width},
        {"histogram", bins}});
}

// ---------------------------------------------------------------- partition

struct PartitionArgs {
  std::string input;
  std::string mode = "training";
  std::optional<double> overlap;
  std::optional<std::string> metric;
  std::string out_dir;
};

void run_partition(const Common& common, const PartitionArgs& a) {
  const PipelineConfig config = common.config();
  if (a.mode != "training" && a.mode != "inference") {
    throw Error(ErrorKind::Validation, "--mode must be training or inference");
  }
  RegionSpec spec = a.mode == "training" ? config.regions : config.inference_regions();
  if (a.overlap) spec.overlap = *a.overlap;
  if (a.metric) spec.metric = parse_metric(*a.metric);
  validate(spec);
  const PointCloud cloud = read_velodyne(a.input);
  const RegionPartition part = partition_points(cloud, spec);
  json regions = json::array();
  for (Region r : kRegions) {
    const auto& idx = part[r];
    json entry = {{"region", to_string(r)}, {"count", idx.size()}};
    if (!idx.empty()) {
      double lo = 1e300, hi = -1e300;
      for (std::uint32_t i : idx) {
        const double range = point_range(cloud.points[i], spec.metric);
        lo = std::min(lo, range);
        hi = std::max(hi, range);
      }
      entry["min_range"] = lo;
      entry["max_range"] = hi;
    }
    if (!a.out_dir.empty()) {
      fs::create_directories(a.out_dir);
      PointCloud sub;
      for (std::uint32_t i : idx) sub.points.push_back(cloud.points[i]);
      const fs::path path = fs::path(a.out_dir) / (std::string(to_string(r)) + ".bin");
      write_velodyne(path, sub);
      entry["file"] = path.string();
    }
    regions.push_back(entry);
  }
  emit({{"input", a.input},
        {"points", cloud.points.size()},
        {"overlap", spec.overlap},
        {"boundaries", {spec.b1, spec.b2}},
        {"max_range", spec.max_range},
        {"regions", regions}});
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string input;
  std::optional<std::string> strategy;
  std::optional<std::size_t> total;
  std::optional<double> overlap;
  std::optional<std::size_t> granularity;
  std::string stats;
  bool multi_scale = false;
  std::string fps_start = "seeded";
};

void run_sample(const Common& common, const SampleArgs& a) {
  PipelineConfig config = common.config();
  if (a.strategy) config.strategy = parse_strategy(*a.strategy);
  if (a.total) config.total_points = *a.total;
  if (a.overlap) config.regions.overlap = *a.overlap;
  if (a.granularity) config.granularity = *a.granularity;
  if (a.multi_scale) config.schedules = multi_scale_schedules();
  validate(config.regions);
  if (!a.stats.empty()) {
    std::ifstream in(a.stats);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + a.stats);
    try {
      json j = json::parse(in);
      config.reference_stats = density_stats_from_json(j.contains("stats") ? j.at("stats") : j);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Malformed, a.stats + ": " + e.what());
    }
  }
  PipelineOptions options;
  options.threads = default_thread_count();
  if (a.fps_start == "seeded") {
    options.fps_start = FpsStart::Seeded;
  } else if (a.fps_start == "centroid") {
    options.fps_start = FpsStart::CentroidNearest;
  } else {
    throw Error(ErrorKind::Validation, "--fps-start must be seeded or centroid");
  }

  PointCloud cloud;
  if (a.input.empty()) {
    log("no --input; using a synthetic scene");
    cloud = generate_scene({}, common.seed).cloud;
  } else {
    cloud = read_velodyne(a.input);
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const SamplingBudget budget =
      allocate_budget(config.reference_stats, config.strategy_spec(), config.total_points);
  const auto t1 = clock::now();
  const RegionPartition part = partition_points(cloud, config.regions);
  const auto t2 = clock::now();
  const PipelineResult result =
      build_branch_pipeline(cloud, part, budget, config.schedules, common.seed, options);
  const auto t3 = clock::now();
  const auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };

  json branches = json::array();
  for (const BranchResult& b : result.branches) {
    json layers = json::array();
    for (const LayerGroups& l : b.layers) {
      json groups = json::array();
      for (const BallGroups& g : l.groups) groups.push_back(json{g.num_groups, g.max_samples});
      layers.push_back(json{{"centroids", l.centroids.size()}, {"radii", l.radii}, {"groups", groups}});
    }
    branches.push_back(json{{"region", to_string(b.region)},
                        {"region_points", part[b.region].size()},
                        {"sampled", b.sample.indices.size()},
                        {"padded", b.sample.padded},
                        {"centroid_counts", b.centroid_counts()},
                        {"layers", layers}});
  }
  emit({{"strategy", to_string(config.strategy)},
        {"seed", common.seed},
        {"threads", options.threads},
        {"budget", {{"total", budget.total}, {"near", budget.counts[0]}, {"mid", budget.counts[1]},
                    {"far", budget.counts[2]}}},
        {"proposals_per_100", split_proposals(100, config.proposal_ratios)},
        {"branches", branches},
        {"timing_ms", {{"budget", ms(t1 - t0)}, {"partition", ms(t2 - t1)}, {"pipeline", ms(t3 - t2)}}}});
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  std::string root;
  std::string frame;
  std::optional<double> flip_prob;
  std::optional<std::vector<double>> scale;
  std::optional<double> rot;
  std::optional<std::size_t> gtaug;
  std::optional<std::size_t> min_points;
  std::string db;
  bool build_db = false;
  std::string out;
};

void run_augment(const Common& common, const AugmentArgs& a) {
  PipelineConfig config = common.config();
  AugmentConfig& aug = config.augment;
  if (a.flip_prob) aug.flip_prob = *a.flip_prob;
  if (a.scale) {
    if (a.scale->size() != 2) throw Error(ErrorKind::Validation, "--scale needs lo,hi");
    aug.scale_lo = (*a.scale)[0];
    aug.scale_hi = (*a.scale)[1];
  }
  if (a.rot) aug.rot_range = *a.rot;
  if (a.gtaug) aug.gtaug_max_inserts = *a.gtaug;
  if (a.min_points) aug.gtaug_min_points = *a.min_points;
  validate(aug);
  const KittiLayout layout{a.root};

  if (a.build_db) {
    if (a.db.empty()) throw Error(ErrorKind::Validation, "--build-db needs --db");
    std::vector<LabeledScene> scenes;
    for (const auto& id : stems(layout.root / "label_2", ".txt")) {
      const Calibration calib = read_calibration(layout.calib(id));
      PointCloud cloud = read_velodyne(layout.velodyne(id));
      cloud.frame_id = id;
      scenes.push_back({std::move(cloud), read_labels(layout.label(id), calib)});
    }
    const GtDatabase db = build_gt_database(scenes, aug.gtaug_min_points, config.eval.class_label);
    save_gt_database(a.db, db);
    log("database with " + std::to_string(db.entries.size()) + " entries written to " + a.db);
    emit({{"db", a.db}, {"scenes", scenes.size()}, {"entries", db.entries.size()}});
    return;
  }

  if (a.frame.empty()) throw Error(ErrorKind::Validation, "--frame is required");
  const Calibration calib = read_calibration(layout.calib(a.frame));
  Scene scene;
  scene.cloud = read_velodyne(layout.velodyne(a.frame));
  scene.cloud.frame_id = a.frame;
  for (const auto& gt : read_labels(layout.label(a.frame), calib)) {
    if (gt.box && gt.class_label == config.eval.class_label) scene.boxes.push_back(*gt.box);
  }

  json gtaug = nullptr;
  if (!a.db.empty() && aug.gtaug_max_inserts > 0) {
    const GtDatabase db = load_gt_database(a.db);
    GtAugResult inserted = gt_aug_insert(std::move(scene), db, aug, derive_seed(common.seed, 1));
    scene = std::move(inserted.scene);
    gtaug = {{"inserted", inserted.record.inserted},
             {"rejected", inserted.record.rejected},
             {"points_removed", inserted.record.points_removed},
             {"points_added", inserted.record.points_added}};
  }
  AugmentResult result = augment_scene(std::move(scene), aug, derive_seed(common.seed, 2));
  if (!a.out.empty()) write_velodyne(a.out, result.scene.cloud);
  json boxes = json::array();
  for (const auto& b : result.scene.boxes) boxes.push_back(box_json(b));
  emit({{"frame", a.frame},
        {"seed", common.seed},
        {"ops", {{"flipped", result.ops.flipped}, {"scale", result.ops.scale}, {"rotation", result.ops.rotation}}},
        {"gtaug", gtaug},
        {"points", result.scene.cloud.points.size()},
        {"max_pairwise_bev_iou", max_pairwise_bev_iou(result.scene.boxes)},
        {"boxes", boxes},
        {"out", a.out.empty() ? json(nullptr) : json(a.out)}});
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string dets;
  std::string gts;
  std::optional<double> iou;
  std::optional<std::string> mode;
  std::optional<std::string> kind;
  std::optional<std::string> class_label;
};

void run_eval(const Common& common, const EvalArgs& a) {
  EvalOptions options = common.config().eval;
  if (a.iou) options.iou_threshold = *a.iou;
  if (a.mode) {
    if (*a.mode != "R11" && *a.mode != "R40") throw Error(ErrorKind::Validation, "--mode must be R11 or R40");
    options.mode = *a.mode == "R40" ? ApMode::R40 : ApMode::R11;
  }
  if (a.kind) {
    if (*a.kind != "3d" && *a.kind != "bev") throw Error(ErrorKind::Validation, "--kind must be 3d or bev");
    options.iou_kind = *a.kind == "bev" ? IouKind::Bev : IouKind::ThreeD;
  }
  if (a.class_label) options.class_label = *a.class_label;
  if (!(options.iou_threshold > 0.0 && options.iou_threshold <= 1.0)) {
    throw Error(ErrorKind::Validation, "--iou must lie in (0, 1]");
  }

  const KittiLayout layout{a.gts};
  FrameGroundTruth gts;
  for (const auto& id : stems(layout.root / "label_2", ".txt")) {
    gts[id] = read_labels(layout.label(id), read_calibration(layout.calib(id)));
  }
  std::vector<Detection> dets;
  for (const auto& id : stems(a.dets, ".txt")) {
    auto frame = read_detections(fs::path(a.dets) / (id + ".txt"));
    dets.insert(dets.end(), frame.begin(), frame.end());
  }
  log(std::to_string(dets.size()) + " detections over " + std::to_string(gts.size()) + " frames");

  json out = {{"iou", options.iou_threshold},
              {"mode", options.mode == ApMode::R11 ? "R11" : "R40"},
              {"kind", options.iou_kind == IouKind::Bev ? "bev" : "3d"},
              {"class", options.class_label}};
  for (Difficulty level : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard}) {
    try {
      const ApResult r = average_precision(dets, gts, level, options);
      out[to_string(level)] = {{"ap", r.ap},
                               {"num_gt", r.num_valid_gt},
                               {"tp", r.true_positives},
                               {"fp", r.false_positives},
                               {"ignored", r.ignored_detections}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedMetric) throw;
      log(std::string(to_string(level)) + ": " + e.what());
      out[to_string(level)] = nullptr;
    }
  }
  emit(out);
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string stage = "all";
  std::size_t reps = 10;
  std::string input;
};

void run_bench(const Common& common, const BenchArgs& a) {
  const PointCloud cloud =
      a.input.empty() ? generate_scene({}, common.seed).cloud : read_velodyne(a.input);
  const std::vector<std::string> stages = a.stage == "all" ? bench_stages() : std::vector{a.stage};
  const std::size_t threads = default_thread_count();
  json reports = json::array();
  for (const auto& stage : stages) {
    log("bench " + stage);
    const BenchReport r = bench(stage, cloud, a.reps, threads, common.seed);
    reports.push_back(json{{"stage", r.stage},
                       {"repetitions", r.repetitions},
                       {"mean_ms", r.mean_ms},
                       {"p50_ms", r.p50_ms},
                       {"p95_ms", r.p95_ms}});
  }
  emit({{"points", cloud.points.size()}, {"threads", threads}, {"reports", reports}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-aware point-cloud pipeline tools"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON config overriding the defaults")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Seed for every random choice");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic KITTI-layout scenes");
  synth_cmd->add_option("--out", synth.out, "Output root")->required();
  synth_cmd->add_option("--frames", synth.frames, "Number of frames");
  synth_cmd->add_option("--cars", synth.cars, "Cars per region: near mid far");
  synth_cmd->add_option("--bin-width", synth.bin_width, "Density profile bin width (m)");
  synth_cmd->add_option("--dets", synth.dets, "Also write the true boxes as detection files here");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-region density statistics of a scan directory");
  stats_cmd->add_option("dir", stats.dir, "Directory of .bin scans (or KITTI root)")->required();
  stats_cmd->add_option("--boundaries", stats.boundaries, "Region boundaries b1,b2 (m)")->delimiter(',');
  stats_cmd->add_option("--max-range", stats.max_range, "Maximum range (m)");
  stats_cmd->add_option("--bin-width", stats.bin_width, "Histogram bin width (m)");
  stats_cmd->add_option("--metric", stats.metric, "forward or euclidean");
  stats_cmd->add_option("--csv", stats.csv, "Write the histogram as CSV");

  PartitionArgs partition;
  auto* partition_cmd = app.add_subcommand("partition", "Split one scan into range regions");
  partition_cmd->add_option("input", partition.input, "Velodyne .bin file")->required();
  partition_cmd->add_option("--mode", partition.mode, "training or inference overlap");
  partition_cmd->add_option("--overlap", partition.overlap, "Overlap override (m)");
  partition_cmd->add_option("--metric", partition.metric, "forward or euclidean");
  partition_cmd->add_option("--out-dir", partition.out_dir, "Write near/mid/far .bin files");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Budget allocation and layered grouping");
  sample_cmd->add_option("--input", sample.input, "Velodyne .bin file (default: synthetic scene)");
  sample_cmd->add_option("--strategy", sample.strategy, "natural, 1, 2, 3 or 4");
  sample_cmd->add_option("--total", sample.total, "Total sampled points");
  sample_cmd->add_option("--overlap", sample.overlap, "Region overlap (m)");
  sample_cmd->add_option("--granularity", sample.granularity, "Budget rounding granule");
  sample_cmd->add_option("--stats", sample.stats, "DensityStats JSON (e.g. output of stats)");
  sample_cmd->add_flag("--multi-scale", sample.multi_scale, "Two radii per layer");
  sample_cmd->add_option("--fps-start", sample.fps_start, "seeded or centroid");

  AugmentArgs augment;
  auto* augment_cmd = app.add_subcommand("augment", "Augment one frame or build a GT database");
  augment_cmd->add_option("--root", augment.root, "KITTI-layout root")->required();
  augment_cmd->add_option("--frame", augment.frame, "Frame id");
  augment_cmd->add_option("--flip-prob", augment.flip_prob, "Flip probability");
  augment_cmd->add_option("--scale", augment.scale, "Scale range lo,hi")->delimiter(',');
  augment_cmd->add_option("--rot", augment.rot, "Rotation range (rad)");
  augment_cmd->add_option("--gtaug", augment.gtaug, "Maximum GT-AUG insertions");
  augment_cmd->add_option("--min-points", augment.min_points, "Minimum points per database entry");
  augment_cmd->add_option("--db", augment.db, "GT database directory");
  augment_cmd->add_flag("--build-db", augment.build_db, "Build the database from every labelled frame");
  augment_cmd->add_option("--out", augment.out, "Write the augmented scan");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "KITTI-style average precision");
  eval_cmd->add_option("--dets", eval.dets, "Directory of per-frame detection files")->required();
  eval_cmd->add_option("--gts", eval.gts, "KITTI-layout root with label_2 and calib")->required();
  eval_cmd->add_option("--iou", eval.iou, "IoU threshold");
  eval_cmd->add_option("--mode", eval.mode, "R11 or R40");
  eval_cmd->add_option("--kind", eval.kind, "3d or bev");
  eval_cmd->add_option("--class", eval.class_label, "Evaluated class");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time pipeline stages");
  bench_cmd->add_option("--stage", bench_args.stage, "Stage name or all");
  bench_cmd->add_option("--reps", bench_args.reps, "Timed repetitions (>= 3)");
  bench_cmd->add_option("--input", bench_args.input, "Velodyne .bin file (default: synthetic scene)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (*synth_cmd) run_synth(common, synth);
    if (*stats_cmd) run_stats(common, stats);
    if (*partition_cmd) run_partition(common, partition);
    if (*sample_cmd) run_sample(common, sample);
    if (*augment_cmd) run_augment(common, augment);
    if (*eval_cmd) run_eval(common, eval);
    if (*bench_cmd) run_bench(common, bench_args);
  } catch (const Error& e) {
    log(std::string("error (") + to_string(e.kind()) + "): " + e.what());
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    log(std::string("error (io): ") + e.what());
    return static_cast<int>(ErrorKind::Io);
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return 1;
  }
  return 0;
}
