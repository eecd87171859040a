#include <cmath>
#include <filesystem>
#include <numbers>

#include <Eigen/Geometry>

#include "doctest.h"
#include "dapc/augmentation.hpp"
#include "dapc/error.hpp"
#include "dapc/synth.hpp"
#include "oracles.hpp"

using namespace dapc;

namespace {

// Boxes with points drawn well inside or well outside each one, so membership
// is unambiguous under rounding.
Scene membership_scene(Rng& rng) {
  Scene scene;
  for (int b = 0; b < 4; ++b) {
    const OrientedBox3D box = oracle::random_box(rng, 20.0, 1.0, 4.0);
    scene.boxes.push_back(box);
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(box.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    for (int i = 0; i < 200; ++i) {
      Eigen::Vector3d u(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1));
      const bool outside = i % 2 == 1;
      if (outside) {
        const int axis = static_cast<int>(uniform_index(rng, 3));
        u[axis] = (u[axis] < 0 ? -1.0 : 1.0) * uniform_real(rng, 1.02, 1.5);
      } else {
        u *= 0.98;
      }
      const Eigen::Vector3d local = u.cwiseProduct(0.5 * box.size);
      const Eigen::Vector3d p = box.center + rot * local;
      scene.cloud.points.push_back({p.x(), p.y(), p.z(), 0.5});
    }
  }
  return scene;
}

std::vector<std::vector<bool>> membership(const Scene& s) {
  std::vector<std::vector<bool>> m;
  for (const auto& box : s.boxes) {
    std::vector<bool> row;
    for (const auto& p : s.cloud.points) row.push_back(point_in_box(box, {p.x, p.y, p.z}));
    m.push_back(row);
  }
  return m;
}

bool same_scene(const Scene& a, const Scene& b) {
  if (a.cloud.points.size() != b.cloud.points.size() || a.boxes.size() != b.boxes.size()) return false;
  for (std::size_t i = 0; i < a.cloud.points.size(); ++i) {
    const Point& p = a.cloud.points[i];
    const Point& q = b.cloud.points[i];
    if (p.x != q.x || p.y != q.y || p.z != q.z || p.r != q.r) return false;
  }
  for (std::size_t i = 0; i < a.boxes.size(); ++i) {
    if (a.boxes[i].center != b.boxes[i].center || a.boxes[i].size != b.boxes[i].size ||
        a.boxes[i].yaw != b.boxes[i].yaw)
      return false;
  }
  return true;
}

std::vector<LabeledScene> synthetic_scenes(int n) {
  std::vector<LabeledScene> scenes;
  for (int i = 0; i < n; ++i) {
    auto g = generate_scene({}, 100 + i);
    g.cloud.frame_id = std::to_string(i);
    scenes.push_back({g.cloud, g.gts});
  }
  return scenes;
}

}  // namespace

TEST_CASE("flip is an involution") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Scene s = membership_scene(rng);
    const Scene f = flip_scene(s);
    CHECK(f.cloud.points[0].y == -s.cloud.points[0].y);
    CHECK(same_scene(flip_scene(f), s));
    CHECK(membership(f) == membership(s));
  }
  Scene edge;
  edge.boxes.push_back(make_box({1, 2, 0}, {4, 2, 1.5}, std::numbers::pi));
  CHECK(same_scene(flip_scene(flip_scene(edge)), edge));
}

TEST_CASE("scale is inverted by the reciprocal factor") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Scene s = membership_scene(rng);
    const double f = uniform_real(rng, 0.95, 1.05);
    const Scene back = scale_scene(scale_scene(s, f), 1.0 / f);
    for (std::size_t i = 0; i < s.cloud.points.size(); ++i) {
      CHECK(std::abs(back.cloud.points[i].x - s.cloud.points[i].x) <= 1e-9);
      CHECK(std::abs(back.cloud.points[i].y - s.cloud.points[i].y) <= 1e-9);
      CHECK(std::abs(back.cloud.points[i].z - s.cloud.points[i].z) <= 1e-9);
    }
    for (std::size_t b = 0; b < s.boxes.size(); ++b) {
      CHECK((back.boxes[b].center - s.boxes[b].center).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((back.boxes[b].size - s.boxes[b].size).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(back.boxes[b].yaw == s.boxes[b].yaw);
    }
    CHECK(membership(scale_scene(s, f)) == membership(s));
  }
  CHECK_THROWS_AS(scale_scene(Scene{}, 0.0), Error);
}

TEST_CASE("rotation preserves box membership") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Scene s = membership_scene(rng);
    const auto before = membership(s);
    for (double angle : {-std::numbers::pi / 4, -0.3, 0.01, 0.5, std::numbers::pi / 4, 3.0}) {
      const Scene r = rotate_scene(s, angle);
      CHECK(membership(r) == before);
      for (std::size_t b = 0; b < r.boxes.size(); ++b) {
        for (std::size_t i = 0; i < r.cloud.points.size(); i += 37) {
          const Point& p = r.cloud.points[i];
          CHECK(oracle::inside_box(r.boxes[b], {p.x, p.y, p.z}, 0.0) == before[b][i]);
        }
      }
    }
  }
}

TEST_CASE("augment_scene is seeded and replayable") {
  Rng rng(4);
  const Scene s = membership_scene(rng);
  const AugmentConfig config;
  const auto a = augment_scene(s, config, 55);
  const auto b = augment_scene(s, config, 55);
  CHECK(same_scene(a.scene, b.scene));
  CHECK(same_scene(apply_ops(s, a.ops), a.scene));
  CHECK(a.ops.scale >= 0.95);
  CHECK(a.ops.scale <= 1.05);
  CHECK(std::abs(a.ops.rotation) <= std::numbers::pi / 4);
  CHECK(membership(a.scene) == membership(s));
  int flips = 0;
  for (int seed = 0; seed < 1000; ++seed) flips += augment_scene(Scene{}, config, seed).ops.flipped;
  CHECK(flips > 430);
  CHECK(flips < 570);
  AugmentConfig bad;
  bad.scale_lo = 1.2;
  CHECK_THROWS_AS(augment_scene(s, bad, 1), Error);
}

TEST_CASE("ground-truth database build, save and load") {
  const auto scenes = synthetic_scenes(3);
  const GtDatabase db = build_gt_database(scenes, 5);
  REQUIRE_FALSE(db.entries.empty());
  for (const auto& e : db.entries) {
    CHECK(e.points.points.size() >= 5);
    for (const auto& p : e.points.points) CHECK(point_in_box(e.box, {p.x, p.y, p.z}));
  }
  CHECK(build_gt_database(scenes, 1000000).entries.empty());
  CHECK(build_gt_database(scenes, 5, "Pedestrian").entries.empty());

  const auto dir = std::filesystem::temp_directory_path() / "dapc_gtdb_test";
  std::filesystem::remove_all(dir);
  save_gt_database(dir, db);
  const GtDatabase loaded = load_gt_database(dir);
  REQUIRE(loaded.entries.size() == db.entries.size());
  for (std::size_t i = 0; i < db.entries.size(); ++i) {
    CHECK(loaded.entries[i].source_frame == db.entries[i].source_frame);
    CHECK((loaded.entries[i].box.center - db.entries[i].box.center).norm() == 0.0);
    CHECK(loaded.entries[i].box.yaw == db.entries[i].box.yaw);
    REQUIRE(loaded.entries[i].points.points.size() == db.entries[i].points.points.size());
    CHECK(loaded.entries[i].points.points.front().x == db.entries[i].points.points.front().x);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_gt_database(dir), Error);
}

TEST_CASE("GT-AUG leaves no overlapping boxes") {
  const auto source = synthetic_scenes(8);
  const GtDatabase db = build_gt_database(source, 5);
  const AugmentConfig config;
  std::size_t total_inserted = 0, total_rejected = 0;
  for (int t = 0; t < 30; ++t) {
    const auto g = generate_scene({}, 1000 + t);
    const Scene scene{g.cloud, boxes_of(g.gts)};
    const auto result = gt_aug_insert(scene, db, config, t);
    const auto& rec = result.record;
    total_inserted += rec.inserted;
    total_rejected += rec.rejected;
    CHECK(rec.inserted + rec.rejected == std::min(config.gtaug_max_inserts, db.entries.size()));
    CHECK(result.scene.boxes.size() == scene.boxes.size() + rec.inserted);
    CHECK(max_pairwise_bev_iou(result.scene.boxes) == 0.0);
    CHECK(result.scene.cloud.points.size() ==
          scene.cloud.points.size() - rec.points_removed + rec.points_added);
    // inserted boxes contain only their own pasted points
    for (std::size_t b = scene.boxes.size(); b < result.scene.boxes.size(); ++b) {
      const auto inside = points_in_box(result.scene.cloud, result.scene.boxes[b]);
      CHECK(inside.front() >= scene.cloud.points.size() - rec.points_removed);
    }
    CHECK(same_scene(gt_aug_insert(scene, db, config, t).scene, result.scene));
  }
  CHECK(total_inserted > 0);
  CHECK(total_rejected > 0);
  CHECK(gt_aug_insert(Scene{}, GtDatabase{}, config, 1).record.inserted == 0);
}
