#include "dapc/partition.hpp"

#include <cmath>
#include <sstream>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"
#include "dapc/parallel.hpp"

namespace dapc {

const char* to_string(Region region) noexcept {
  switch (region) {
    case Region::Near: return "near";
    case Region::Mid: return "mid";
    case Region::Far: return "far";
  }
  return "?";
}

void validate(const RegionSpec& spec) {
  const bool ok = std::isfinite(spec.max_range) && 0.0 < spec.b1 && spec.b1 < spec.b2 &&
                  spec.b2 < spec.max_range && 0.0 <= spec.overlap &&
                  spec.overlap < spec.b2 - spec.b1;
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid region spec: boundaries (" << spec.b1 << ", " << spec.b2
        << "), max_range " << spec.max_range << ", overlap " << spec.overlap;
    throw Error(ErrorKind::Validation, msg.str());
  }
}

double point_range(const Point& p, RangeMetric metric) {
  if (metric == RangeMetric::Forward) return p.x;
  if (p.x < 0.0) return -std::hypot(p.x, p.y);
  return std::hypot(p.x, p.y);
}

std::array<bool, 3> classify_range(double r, const RegionSpec& spec) {
  if (!(r >= 0.0 && r <= spec.max_range)) return {false, false, false};
  return {r < spec.b1 + spec.overlap,
          r >= spec.b1 && r < spec.b2 + spec.overlap,
          r >= spec.b2};
}

RegionPartition partition_points(const PointCloud& cloud, const RegionSpec& spec) {
  validate(spec);
  RegionPartition partition;
  partition.spec = spec;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto in = classify_range(point_range(cloud.points[i], spec.metric), spec);
    for (std::size_t k = 0; k < 3; ++k) {
      if (in[k]) partition.regions[k].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return partition;
}

std::array<std::size_t, 3> region_counts(const PointCloud& cloud, const RegionSpec& spec) {
  std::array<std::size_t, 3> counts{};
  for (const Point& p : cloud.points) {
    const auto in = classify_range(point_range(p, spec.metric), spec);
    for (std::size_t k = 0; k < 3; ++k) counts[k] += in[k] ? 1 : 0;
  }
  return counts;
}

DensityStats density_stats_from_counts(std::span<const std::array<std::size_t, 3>> counts) {
  if (counts.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "density statistics need at least 2 scenes, got " +
                    std::to_string(counts.size()));
  }
  DensityStats stats;
  stats.n_scenes = counts.size();
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> column;
    column.reserve(counts.size());
    for (const auto& row : counts) column.push_back(static_cast<double>(row[k]));
    stats.mean[k] = stable_mean(column);
    stats.sigma[k] = population_stddev(column);
  }
  return stats;
}

DensityStats compute_density_stats(std::span<const PointCloud> clouds,
                                   const RegionSpec& spec, std::size_t threads) {
  validate(spec);
  if (spec.overlap != 0.0) {
    throw Error(ErrorKind::Validation, "density statistics require zero overlap");
  }
  if (clouds.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "density statistics need at least 2 scenes, got " +
                    std::to_string(clouds.size()));
  }
  std::vector<std::array<std::size_t, 3>> counts(clouds.size());
  parallel_for(clouds.size(), threads,
               [&](std::size_t i) { counts[i] = region_counts(clouds[i], spec); });
  return density_stats_from_counts(counts);
}

std::vector<RangeBin> histogram_by_range(std::span<const PointCloud> clouds,
                                         double bin_width, const RegionSpec& spec) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorKind::Validation, "bin width must be positive");
  }
  const auto n_bins = static_cast<std::size_t>(std::ceil(spec.max_range / bin_width));
  std::vector<RangeBin> bins(n_bins);
  if (n_bins == 0) return bins;
  std::vector<std::vector<double>> per_scene(n_bins, std::vector<double>(clouds.size()));
  for (std::size_t s = 0; s < clouds.size(); ++s) {
    for (const Point& p : clouds[s].points) {
      const double r = point_range(p, spec.metric);
      if (!(r >= 0.0 && r <= spec.max_range)) continue;
      const auto k = std::min(static_cast<std::size_t>(r / bin_width), n_bins - 1);
      per_scene[k][s] += 1.0;
    }
  }
  for (std::size_t k = 0; k < n_bins; ++k) {
    bins[k].start = static_cast<double>(k) * bin_width;
    bins[k].mean_count = stable_mean(per_scene[k]);
  }
  return bins;
}

}  // namespace dapc
