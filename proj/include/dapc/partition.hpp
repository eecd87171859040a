#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dapc/point_cloud.hpp"

namespace dapc {

enum class Region { Near = 0, Mid = 1, Far = 2 };
inline constexpr std::array<Region, 3> kRegions{Region::Near, Region::Mid, Region::Far};
const char* to_string(Region region) noexcept;

enum class RangeMetric {
  Forward,    // LiDAR +x distance
  Euclidean,  // horizontal distance sqrt(x^2 + y^2)
};

struct RegionSpec {
  double b1 = 20.0;
  double b2 = 40.0;
  double max_range = 70.0;
  double overlap = 5.0;
  RangeMetric metric = RangeMetric::Forward;

  static RegionSpec training() { return {}; }
  static RegionSpec inference() {
    RegionSpec spec;
    spec.overlap = 3.0;
    return spec;
  }
  static RegionSpec disjoint() {
    RegionSpec spec;
    spec.overlap = 0.0;
    return spec;
  }
};

// Throws Validation unless 0 < b1 < b2 < max_range and 0 <= overlap < b2 - b1.
void validate(const RegionSpec& spec);

// Range of a point under the metric; negative for points behind the sensor.
double point_range(const Point& p, RangeMetric metric);

// Membership flags of a range value: near [0, b1+o), mid [b1, b2+o),
// far [b2, max_range]. Out-of-range values belong to no region.
std::array<bool, 3> classify_range(double range, const RegionSpec& spec);

struct RegionPartition {
  std::array<std::vector<std::uint32_t>, 3> regions;  // ascending indices
  RegionSpec spec;

  const std::vector<std::uint32_t>& operator[](Region r) const {
    return regions[static_cast<std::size_t>(r)];
  }
  const std::vector<std::uint32_t>& near() const { return (*this)[Region::Near]; }
  const std::vector<std::uint32_t>& mid() const { return (*this)[Region::Mid]; }
  const std::vector<std::uint32_t>& far() const { return (*this)[Region::Far]; }
};

RegionPartition partition_points(const PointCloud& cloud, const RegionSpec& spec);

struct DensityStats {
  std::array<double, 3> mean{};
  std::array<double, 3> sigma{};
  std::size_t n_scenes = 0;
};

// Per-region mean and population standard deviation of point counts. The spec
// must have zero overlap; at least two scenes are required.
DensityStats compute_density_stats(std::span<const PointCloud> clouds,
                                   const RegionSpec& spec, std::size_t threads = 1);

// Same statistics from per-scene region counts (rows: scenes).
DensityStats density_stats_from_counts(std::span<const std::array<std::size_t, 3>> counts);

std::array<std::size_t, 3> region_counts(const PointCloud& cloud, const RegionSpec& spec);

struct RangeBin {
  double start = 0.0;
  double mean_count = 0.0;
};

// Mean per-scene point count in [k*w, (k+1)*w) bins covering [0, max_range];
// a point exactly at max_range lands in the last bin.
std::vector<RangeBin> histogram_by_range(std::span<const PointCloud> clouds,
                                         double bin_width, const RegionSpec& spec = {});

}  // namespace dapc
