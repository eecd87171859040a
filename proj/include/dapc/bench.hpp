#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dapc/point_cloud.hpp"

namespace dapc {

struct BenchReport {
  std::string stage;
  std::size_t repetitions = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  std::vector<double> samples_ms;
};

// Runs `body` once as warmup, then `repetitions` timed times (>= 3).
BenchReport time_stage(const std::string& stage, std::size_t repetitions,
                       const std::function<void()>& body);

// Nearest-rank percentile of the samples, q in [0, 1].
double percentile(std::vector<double> samples, double q);

// Stages: partition, budget, sample, iou, nms, fps.
std::vector<std::string> bench_stages();

BenchReport bench(const std::string& stage, const PointCloud& scene, std::size_t repetitions,
                  std::size_t threads, std::uint64_t seed);

}  // namespace dapc
