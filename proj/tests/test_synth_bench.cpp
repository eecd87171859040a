#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "dapc/bench.hpp"
#include "dapc/error.hpp"
#include "dapc/kitti_io.hpp"
#include "dapc/synth.hpp"
#include "oracles.hpp"

using namespace dapc;

TEST_CASE("synthetic scenes are deterministic and float-exact") {
  const SyntheticSceneSpec spec;
  const auto a = generate_scene(spec, 5);
  const auto b = generate_scene(spec, 5);
  REQUIRE(a.cloud.points.size() == b.cloud.points.size());
  for (std::size_t i = 0; i < a.cloud.points.size(); ++i) {
    const Point& p = a.cloud.points[i];
    CHECK(p.x == b.cloud.points[i].x);
    CHECK(static_cast<double>(static_cast<float>(p.x)) == p.x);
    CHECK(static_cast<double>(static_cast<float>(p.y)) == p.y);
    CHECK(static_cast<double>(static_cast<float>(p.z)) == p.z);
    CHECK(p.r >= 0.0);
    CHECK(p.r <= 1.0);
  }
  CHECK(generate_scene(spec, 6).cloud.points.size() != a.cloud.points.size());

  const auto path = std::filesystem::temp_directory_path() / "dapc_synth.bin";
  write_velodyne(path, a.cloud);
  const auto back = read_velodyne(path);
  REQUIRE(back.points.size() == a.cloud.points.size());
  CHECK(back.points.back().y == a.cloud.points.back().y);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic cars are separated and populated") {
  const SyntheticSceneSpec spec;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scene = generate_scene(spec, seed);
    const auto boxes = boxes_of(scene.gts);
    CHECK(boxes.size() == 5);
    CHECK(max_pairwise_bev_iou(boxes) == 0.0);
    std::array<std::size_t, 3> per_region{};
    for (const auto& gt : scene.gts) {
      CHECK(gt.class_label == "Car");
      CHECK(gt.bbox2d.height() > 0.0);
      const double x = gt.box->center.x();
      per_region[x < 20 ? 0 : x < 40 ? 1 : 2]++;
      CHECK_FALSE(points_in_box(scene.cloud, *gt.box).empty());
    }
    CHECK(per_region == spec.n_cars);
  }
  SyntheticSceneSpec crowded;
  crowded.lateral_half_width = 2.0;
  crowded.n_cars = {40, 0, 0};
  CHECK_THROWS_AS(generate_scene(crowded, 1), Error);
}

TEST_CASE("synthetic density profile reproduces the configured means") {
  std::vector<PointCloud> clouds;
  for (std::uint64_t seed = 0; seed < 40; ++seed) clouds.push_back(generate_scene({}, seed).cloud);
  const auto stats = compute_density_stats(clouds, RegionSpec::disjoint());
  const std::array<double, 3> configured{13800, 3600, 1000};
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(stats.mean[k] - configured[k]) / configured[k] < 0.15);
    CHECK(stats.sigma[k] > 0.0);
  }
  CHECK(stats.mean[0] > stats.mean[1]);
  CHECK(stats.mean[1] > stats.mean[2]);
}

TEST_CASE("percentiles use nearest rank") {
  const std::vector<double> s{5, 1, 4, 2, 3};
  CHECK(percentile(s, 0.5) == 3);
  CHECK(percentile(s, 0.95) == 5);
  CHECK(percentile(s, 0.0) == 1);
  CHECK(percentile({}, 0.5) == 0);
}

TEST_CASE("bench runs every stage") {
  const auto scene = generate_scene({}, 1).cloud;
  for (const auto& stage : bench_stages()) {
    const auto report = bench(stage, scene, 3, 1, 7);
    CHECK(report.stage == stage);
    CHECK(report.samples_ms.size() == 3);
    CHECK(report.p50_ms <= report.p95_ms);
    CHECK(report.mean_ms >= 0.0);
  }
  CHECK_THROWS_AS(bench("nope", scene, 3, 1, 7), Error);
  CHECK_THROWS_AS(time_stage("x", 2, [] {}), Error);
}

TEST_CASE("car-free scenes and range-dependent car density") {
  SyntheticSceneSpec empty;
  empty.n_cars = {0, 0, 0};
  const auto bg = generate_scene(empty, 3);
  CHECK(bg.gts.empty());
  CHECK_FALSE(bg.cloud.points.empty());

  std::size_t near_points = 0, far_points = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticSceneSpec spec;
    spec.n_cars = {1, 0, 1};
    const auto scene = generate_scene(spec, seed);
    for (const auto& gt : scene.gts) {
      const std::size_t n = points_in_box(scene.cloud, *gt.box).size();
      (gt.box->center.x() < 20 ? near_points : far_points) += n;
    }
  }
  CHECK(near_points > far_points);
}

TEST_CASE("full sample pipeline on a synthetic scene finishes within a second") {
  const auto scene = generate_scene({}, 2).cloud;
  const auto report = bench("sample", scene, 3, 1, 1);
  MESSAGE("sample pipeline p50 " << report.p50_ms << " ms");
  CHECK(report.p50_ms < 1000.0);
}
