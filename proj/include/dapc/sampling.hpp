#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dapc/partition.hpp"
#include "dapc/point_cloud.hpp"

namespace dapc {

// Index value marking a padded slot for a region with no points.
inline constexpr std::uint32_t kPaddedIndex = std::numeric_limits<std::uint32_t>::max();

struct SamplingBudget {
  std::size_t total = 0;
  std::array<std::size_t, 3> counts{};  // near, mid, far

  std::size_t operator[](Region r) const { return counts[static_cast<std::size_t>(r)]; }
  friend bool operator==(const SamplingBudget&, const SamplingBudget&) = default;
};

// mid = m2 + k_mid * sigma2, far = m3 + k_far * sigma3, rounded to the
// nearest multiple of `granularity`.
struct StrategySpec {
  double k_mid = 1.5;
  double k_far = 2.0;
  std::size_t granularity = 1024;
};

enum class Strategy { Natural, S1, S2, S3, S4 };
StrategySpec strategy_spec(Strategy strategy);
Strategy parse_strategy(const std::string& name);  // natural, 1..4
const char* to_string(Strategy strategy) noexcept;

inline constexpr std::size_t kDefaultTotalPoints = 16384;

// Rounds `raw` to the nearest multiple of `granularity` (halves away from
// zero), never below one granule.
std::size_t round_to_granularity(double raw, std::size_t granularity);

// Near receives the remainder; throws Infeasible when it would not stay the
// largest region.
SamplingBudget allocate_budget(const DensityStats& stats, const StrategySpec& strategy,
                               std::size_t total = kDefaultTotalPoints);

struct ProposalRatios {
  std::array<double, 3> ratios{0.3, 0.5, 0.2};
};
void validate(const ProposalRatios& ratios);

// Splits `total` proposals across regions by largest remainder.
std::array<std::size_t, 3> split_proposals(std::size_t total, const ProposalRatios& ratios);

struct RegionSample {
  std::vector<std::uint32_t> indices;  // kPaddedIndex entries when `padded`
  bool padded = false;
  friend bool operator==(const RegionSample&, const RegionSample&) = default;
};

// Uniform sample without replacement when the region is large enough;
// otherwise every point once plus uniform repeats, shuffled.
RegionSample sample_region(std::span<const std::uint32_t> region, std::size_t budget,
                           std::uint64_t seed);

// Farthest-point sampling from an explicit start index. After every point has
// been chosen once the selection repeats cyclically. Ties go to the lowest index.
std::vector<std::uint32_t> farthest_point_sampling(std::span<const Point> points,
                                                   std::size_t k, std::size_t start);

enum class FpsStart {
  CentroidNearest,  // point nearest the mean position
  Seeded,           // uniform index drawn from the seed
};

std::size_t fps_start_index(std::span<const Point> points, FpsStart mode,
                            std::uint64_t seed);

std::vector<std::uint32_t> farthest_point_sampling(std::span<const Point> points,
                                                   std::size_t k, FpsStart mode,
                                                   std::uint64_t seed);

// Row-major [num_groups x max_samples] neighbour indices.
struct BallGroups {
  std::size_t num_groups = 0;
  std::size_t max_samples = 0;
  std::vector<std::uint32_t> indices;
  std::vector<std::uint32_t> found;  // in-radius entries per group before padding

  std::span<const std::uint32_t> group(std::size_t g) const {
    return std::span<const std::uint32_t>(indices).subspan(g * max_samples, max_samples);
  }
  friend bool operator==(const BallGroups&, const BallGroups&) = default;
};

// Up to max_samples in-radius indices per centroid, ascending; short groups are
// padded with their first index, empty groups hold the nearest point.
BallGroups ball_query(std::span<const Point> centroids, std::span<const Point> cloud,
                      double radius, std::size_t max_samples, std::size_t threads = 1);

struct BranchSchedule {
  std::vector<std::vector<double>> radii;  // per layer: 1 radius (SSG) or several (MSG)
  std::vector<std::size_t> group_sizes;
  std::size_t samples_per_group = 16;
};
void validate(const BranchSchedule& schedule);

// Single-scale grouping radii per branch.
std::array<BranchSchedule, 3> single_scale_schedules();
// Multi-scale grouping radii per branch; later layers scale the base
// two-radius schedule by each branch's first-layer ratio.
std::array<BranchSchedule, 3> multi_scale_schedules();

struct LayerGroups {
  std::vector<std::uint32_t> centroids;  // indices into the previous layer's points
  std::vector<double> radii;
  std::vector<BallGroups> groups;  // one per radius
  friend bool operator==(const LayerGroups&, const LayerGroups&) = default;
};

struct BranchResult {
  Region region = Region::Near;
  RegionSample sample;
  std::vector<LayerGroups> layers;

  std::vector<std::size_t> centroid_counts() const;
  friend bool operator==(const BranchResult&, const BranchResult&) = default;
};

struct PipelineOptions {
  FpsStart fps_start = FpsStart::Seeded;
  std::size_t threads = 1;  // branch and ball-query parallelism
};

struct PipelineResult {
  std::array<BranchResult, 3> branches;
  std::vector<std::uint32_t> concatenated;  // near | mid | far sample indices
  friend bool operator==(const PipelineResult&, const PipelineResult&) = default;
};

// Coordinates of a region sample; padded slots become zero points.
std::vector<Point> gather_points(const PointCloud& cloud, const RegionSample& sample);

PipelineResult build_branch_pipeline(const PointCloud& cloud,
                                     const RegionPartition& partition,
                                     const SamplingBudget& budget,
                                     const std::array<BranchSchedule, 3>& schedules,
                                     std::uint64_t seed, const PipelineOptions& options = {});

}  // namespace dapc
