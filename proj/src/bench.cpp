#include "dapc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "dapc/error.hpp"
#include "dapc/eval.hpp"
#include "dapc/numeric.hpp"
#include "dapc/partition.hpp"
#include "dapc/sampling.hpp"

namespace dapc {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

BenchReport time_stage(const std::string& stage, std::size_t repetitions,
                       const std::function<void()>& body) {
  if (repetitions < 3) throw Error(ErrorKind::Validation, "bench needs at least 3 repetitions");
  using clock = std::chrono::steady_clock;
  body();
  BenchReport report;
  report.stage = stage;
  report.repetitions = repetitions;
  for (std::size_t i = 0; i < repetitions; ++i) {
    const auto start = clock::now();
    body();
    const std::chrono::duration<double, std::milli> elapsed = clock::now() - start;
    report.samples_ms.push_back(elapsed.count());
  }
  report.mean_ms = stable_mean(report.samples_ms);
  report.p50_ms = percentile(report.samples_ms, 0.5);
  report.p95_ms = percentile(report.samples_ms, 0.95);
  return report;
}

std::vector<std::string> bench_stages() {
  return {"partition", "budget", "sample", "iou", "nms", "fps"};
}

namespace {

std::vector<Detection> random_detections(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Detection> dets(n);
  for (auto& d : dets) {
    d.box = make_box({uniform_real(rng, 0, 40), uniform_real(rng, -10, 10), -1.0},
                     {uniform_real(rng, 3.5, 4.5), uniform_real(rng, 1.5, 1.9), 1.5},
                     uniform_real(rng, -std::numbers::pi, std::numbers::pi));
    d.score = uniform_real(rng, 0, 1);
  }
  return dets;
}

}  // namespace

BenchReport bench(const std::string& stage, const PointCloud& scene, std::size_t repetitions,
                  std::size_t threads, std::uint64_t seed) {
  const RegionSpec spec = RegionSpec::training();
  const DensityStats stats{{13800, 3600, 1000}, {1800, 1100, 500}, 3712};
  if (stage == "partition") {
    return time_stage(stage, repetitions, [&] { (void)partition_points(scene, spec); });
  }
  if (stage == "budget") {
    return time_stage(stage, repetitions, [&] {
      (void)allocate_budget(stats, strategy_spec(Strategy::S4), kDefaultTotalPoints);
    });
  }
  if (stage == "sample") {
    const RegionPartition partition = partition_points(scene, spec);
    const SamplingBudget budget =
        allocate_budget(stats, strategy_spec(Strategy::S4), kDefaultTotalPoints);
    const auto schedules = single_scale_schedules();
    PipelineOptions options;
    options.threads = threads;
    return time_stage(stage, repetitions, [&] {
      (void)build_branch_pipeline(scene, partition, budget, schedules, seed, options);
    });
  }
  if (stage == "iou" || stage == "nms") {
    const auto dets = random_detections(stage == "iou" ? 200 : 500, seed);
    if (stage == "nms") {
      return time_stage(stage, repetitions, [&] { (void)nms_bev(dets, 0.7); });
    }
    return time_stage(stage, repetitions, [&] {
      double sink = 0.0;
      for (std::size_t i = 0; i + 1 < dets.size(); ++i) sink += iou_3d(dets[i].box, dets[i + 1].box);
      (void)sink;
    });
  }
  if (stage == "fps") {
    const std::size_t k = std::min<std::size_t>(scene.size(), 4096);
    if (k == 0) throw Error(ErrorKind::Validation, "fps bench needs a nonempty scene");
    return time_stage(stage, repetitions, [&] {
      (void)farthest_point_sampling(scene.points, k, FpsStart::Seeded, seed);
    });
  }
  throw Error(ErrorKind::Validation, "unknown bench stage '" + stage + "'");
}

}  // namespace dapc
