#include "dapc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"
#include "dapc/parallel.hpp"

namespace dapc {
namespace {

double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

StrategySpec strategy_spec(Strategy strategy) {
  switch (strategy) {
    case Strategy::Natural: return {0.0, 0.0, 1024};
    case Strategy::S1: return {1.0, 1.0, 1024};
    case Strategy::S2: return {1.5, 1.5, 1024};
    case Strategy::S3: return {2.0, 2.0, 1024};
    case Strategy::S4: return {1.5, 2.0, 1024};
  }
  return {};
}

Strategy parse_strategy(const std::string& name) {
  if (name == "natural") return Strategy::Natural;
  if (name == "1") return Strategy::S1;
  if (name == "2") return Strategy::S2;
  if (name == "3") return Strategy::S3;
  if (name == "4") return Strategy::S4;
  throw Error(ErrorKind::Validation, "unknown strategy '" + name + "'");
}

const char* to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Natural: return "natural";
    case Strategy::S1: return "1";
    case Strategy::S2: return "2";
    case Strategy::S3: return "3";
    case Strategy::S4: return "4";
  }
  return "?";
}

std::size_t round_to_granularity(double raw, std::size_t granularity) {
  const double g = static_cast<double>(granularity);
  const double units = std::max(1.0, std::round(raw / g));
  return static_cast<std::size_t>(units) * granularity;
}

SamplingBudget allocate_budget(const DensityStats& stats, const StrategySpec& strategy,
                               std::size_t total) {
  if (strategy.granularity == 0 || !(strategy.k_mid >= 0.0) || !(strategy.k_far >= 0.0)) {
    throw Error(ErrorKind::Validation, "strategy needs granularity > 0 and k >= 0");
  }
  if (total < 3 * strategy.granularity) {
    throw Error(ErrorKind::Validation, "total " + std::to_string(total) +
                                           " is below three granules");
  }
  const double far_raw = stats.mean[2] + strategy.k_far * stats.sigma[2];
  const double mid_raw = stats.mean[1] + strategy.k_mid * stats.sigma[1];
  const std::size_t far = round_to_granularity(far_raw, strategy.granularity);
  const std::size_t mid = round_to_granularity(mid_raw, strategy.granularity);
  if (mid + far >= total) {
    throw Error(ErrorKind::Infeasible, "mid and far budgets exhaust the total");
  }
  const std::size_t near = total - mid - far;
  if (near <= mid) {
    std::ostringstream msg;
    msg << "near budget " << near << " would not exceed mid budget " << mid;
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  return {total, {near, mid, far}};
}

void validate(const ProposalRatios& ratios) {
  double sum = 0.0;
  for (double r : ratios.ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw Error(ErrorKind::Validation, "proposal ratios must lie in (0,1)");
    }
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::Validation, "proposal ratios must sum to 1");
  }
}

std::array<std::size_t, 3> split_proposals(std::size_t total, const ProposalRatios& ratios) {
  validate(ratios);
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = ratios.ratios[k] * static_cast<double>(total);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - std::floor(exact);
    assigned += counts[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i % 3]];
  return counts;
}

RegionSample sample_region(std::span<const std::uint32_t> region, std::size_t budget,
                           std::uint64_t seed) {
  if (budget == 0) throw Error(ErrorKind::Validation, "sampling budget must be positive");
  RegionSample sample;
  if (region.empty()) {
    sample.indices.assign(budget, kPaddedIndex);
    sample.padded = true;
    return sample;
  }
  Rng rng(seed);
  std::vector<std::uint32_t> pool(region.begin(), region.end());
  if (pool.size() >= budget) {
    for (std::size_t i = 0; i < budget; ++i) {
      const std::size_t j = i + uniform_index(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(budget);
    sample.indices = std::move(pool);
    return sample;
  }
  const std::size_t n = pool.size();
  pool.reserve(budget);
  while (pool.size() < budget) pool.push_back(region[uniform_index(rng, n)]);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    std::swap(pool[i], pool[uniform_index(rng, i + 1)]);
  }
  sample.indices = std::move(pool);
  return sample;
}

std::vector<std::uint32_t> farthest_point_sampling(std::span<const Point> points,
                                                   std::size_t k, std::size_t start) {
  const std::size_t n = points.size();
  if (n == 0) throw Error(ErrorKind::Validation, "farthest point sampling on empty input");
  if (k == 0) throw Error(ErrorKind::Validation, "farthest point sampling needs k >= 1");
  if (start >= n) throw Error(ErrorKind::Validation, "start index out of range");

  std::vector<std::uint32_t> selected;
  selected.reserve(k);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::size_t current = start;
  const std::size_t distinct = std::min(k, n);
  for (std::size_t step = 0; step < distinct; ++step) {
    selected.push_back(static_cast<std::uint32_t>(current));
    taken[current] = true;
    if (step + 1 == distinct) break;
    const Point& c = points[current];
    std::size_t best = n;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(min_dist[i], squared_distance(points[i], c));
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    current = best;
  }
  for (std::size_t i = distinct; i < k; ++i) selected.push_back(selected[i % distinct]);
  return selected;
}

std::size_t fps_start_index(std::span<const Point> points, FpsStart mode,
                            std::uint64_t seed) {
  if (points.empty()) throw Error(ErrorKind::Validation, "no points to start from");
  if (mode == FpsStart::Seeded) {
    Rng rng(seed);
    return uniform_index(rng, points.size());
  }
  std::vector<double> xs, ys, zs;
  xs.reserve(points.size());
  ys.reserve(points.size());
  zs.reserve(points.size());
  for (const Point& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    zs.push_back(p.z);
  }
  const Point centroid{stable_mean(xs), stable_mean(ys), stable_mean(zs), 0.0};
  std::size_t best = 0;
  double best_dist = squared_distance(points[0], centroid);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = squared_distance(points[i], centroid);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::uint32_t> farthest_point_sampling(std::span<const Point> points,
                                                   std::size_t k, FpsStart mode,
                                                   std::uint64_t seed) {
  return farthest_point_sampling(points, k, fps_start_index(points, mode, seed));
}

BallGroups ball_query(std::span<const Point> centroids, std::span<const Point> cloud,
                      double radius, std::size_t max_samples, std::size_t threads) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Validation, "ball query radius must be > 0");
  if (max_samples == 0) throw Error(ErrorKind::Validation, "ball query needs max_samples >= 1");
  if (cloud.empty() && !centroids.empty()) {
    throw Error(ErrorKind::Validation, "ball query on an empty cloud");
  }
  BallGroups groups;
  groups.num_groups = centroids.size();
  groups.max_samples = max_samples;
  groups.indices.assign(centroids.size() * max_samples, 0);
  groups.found.assign(centroids.size(), 0);
  const double r2 = radius * radius;

  parallel_for(centroids.size(), threads, [&](std::size_t g) {
    const Point& c = centroids[g];
    std::uint32_t* out = groups.indices.data() + g * max_samples;
    std::size_t count = 0;
    std::size_t nearest = 0;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size() && count < max_samples; ++i) {
      const double d = squared_distance(cloud[i], c);
      if (d <= r2) out[count++] = static_cast<std::uint32_t>(i);
      if (d < nearest_dist) {
        nearest_dist = d;
        nearest = i;
      }
    }
    groups.found[g] = static_cast<std::uint32_t>(count);
    const std::uint32_t fill = count > 0 ? out[0] : static_cast<std::uint32_t>(nearest);
    std::fill(out + count, out + max_samples, fill);
  });
  return groups;
}

void validate(const BranchSchedule& schedule) {
  const std::size_t layers = schedule.group_sizes.size();
  if (layers == 0 || schedule.radii.size() != layers) {
    throw Error(ErrorKind::Validation, "schedule needs one radius set per layer");
  }
  if (schedule.samples_per_group == 0) {
    throw Error(ErrorKind::Validation, "samples_per_group must be >= 1");
  }
  const std::size_t arity = schedule.radii.front().size();
  for (std::size_t l = 0; l < layers; ++l) {
    if (schedule.radii[l].size() != arity || arity == 0) {
      throw Error(ErrorKind::Validation, "every layer needs the same number of radii");
    }
    if (schedule.group_sizes[l] == 0) {
      throw Error(ErrorKind::Validation, "group sizes must be positive");
    }
    for (std::size_t a = 0; a < arity; ++a) {
      if (!(schedule.radii[l][a] > 0.0)) {
        throw Error(ErrorKind::Validation, "radii must be positive");
      }
      if (l > 0 && !(schedule.radii[l][a] > schedule.radii[l - 1][a])) {
        throw Error(ErrorKind::Validation, "radii must increase across layers");
      }
    }
    if (l > 0 && !(schedule.group_sizes[l] < schedule.group_sizes[l - 1])) {
      throw Error(ErrorKind::Validation, "group sizes must decrease across layers");
    }
  }
}

namespace {

const std::array<std::vector<std::size_t>, 3> kGroupSizes{{
    {2304, 576, 144, 36},
    {1280, 320, 80, 20},
    {512, 128, 32, 8},
}};

}  // namespace

std::array<BranchSchedule, 3> single_scale_schedules() {
  return {{
      {{{0.4}, {0.8}, {1.6}, {3.2}}, kGroupSizes[0], 16},
      {{{0.8}, {1.6}, {3.2}, {4.0}}, kGroupSizes[1], 16},
      {{{1.0}, {2.0}, {3.0}, {4.0}}, kGroupSizes[2], 16},
  }};
}

std::array<BranchSchedule, 3> multi_scale_schedules() {
  const std::vector<std::vector<double>> base{{0.1, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 4.0}};
  const std::array<std::vector<double>, 3> first{{{0.1, 0.5}, {0.2, 0.6}, {0.4, 0.8}}};
  std::array<BranchSchedule, 3> schedules;
  for (std::size_t b = 0; b < 3; ++b) {
    schedules[b].group_sizes = kGroupSizes[b];
    schedules[b].samples_per_group = 16;
    for (std::size_t l = 0; l < base.size(); ++l) {
      std::vector<double> radii(2);
      for (std::size_t a = 0; a < 2; ++a) {
        radii[a] = l == 0 ? first[b][a] : base[l][a] * (first[b][a] / base[0][a]);
      }
      schedules[b].radii.push_back(std::move(radii));
    }
  }
  return schedules;
}

std::vector<std::size_t> BranchResult::centroid_counts() const {
  std::vector<std::size_t> counts;
  for (const auto& layer : layers) counts.push_back(layer.centroids.size());
  return counts;
}

std::vector<Point> gather_points(const PointCloud& cloud, const RegionSample& sample) {
  std::vector<Point> points;
  points.reserve(sample.indices.size());
  for (std::uint32_t i : sample.indices) {
    points.push_back(i == kPaddedIndex ? Point{} : cloud.points.at(i));
  }
  return points;
}

PipelineResult build_branch_pipeline(const PointCloud& cloud,
                                     const RegionPartition& partition,
                                     const SamplingBudget& budget,
                                     const std::array<BranchSchedule, 3>& schedules,
                                     std::uint64_t seed, const PipelineOptions& options) {
  for (const auto& s : schedules) validate(s);
  if (schedules[0].group_sizes.size() != schedules[1].group_sizes.size() ||
      schedules[0].group_sizes.size() != schedules[2].group_sizes.size()) {
    throw Error(ErrorKind::Validation, "branch schedules must have equal layer counts");
  }
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  const std::size_t inner_threads = std::max<std::size_t>(1, threads / 3);

  PipelineResult result;
  parallel_for(3, threads, [&](std::size_t b) {
    const BranchSchedule& schedule = schedules[b];
    const std::uint64_t branch_seed = derive_seed(seed, b);
    BranchResult& branch = result.branches[b];
    branch.region = kRegions[b];
    branch.sample = sample_region(partition.regions[b], budget.counts[b],
                                  derive_seed(branch_seed, 0));
    std::vector<Point> layer_points = gather_points(cloud, branch.sample);
    for (std::size_t l = 0; l < schedule.group_sizes.size(); ++l) {
      LayerGroups layer;
      layer.centroids = farthest_point_sampling(layer_points, schedule.group_sizes[l],
                                                options.fps_start,
                                                derive_seed(branch_seed, l + 1));
      std::vector<Point> centers;
      centers.reserve(layer.centroids.size());
      for (std::uint32_t i : layer.centroids) centers.push_back(layer_points[i]);
      layer.radii = schedule.radii[l];
      for (double r : layer.radii) {
        layer.groups.push_back(
            ball_query(centers, layer_points, r, schedule.samples_per_group, inner_threads));
      }
      branch.layers.push_back(std::move(layer));
      layer_points = std::move(centers);
    }
  });
  for (const auto& branch : result.branches) {
    result.concatenated.insert(result.concatenated.end(), branch.sample.indices.begin(),
                               branch.sample.indices.end());
  }
  return result;
}

}  // namespace dapc
