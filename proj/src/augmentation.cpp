#include "dapc/augmentation.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"

namespace dapc {

using nlohmann::json;

void validate(const AugmentConfig& c) {
  if (!(c.flip_prob >= 0.0 && c.flip_prob <= 1.0) || !(c.scale_lo > 0.0) ||
      !(c.scale_lo <= c.scale_hi) || !(c.rot_range >= 0.0) ||
      !(c.gtaug_iou_threshold >= 0.0 && c.gtaug_iou_threshold < 1.0)) {
    throw Error(ErrorKind::Validation, "invalid augmentation config");
  }
}

Scene flip_scene(Scene scene) {
  for (Point& p : scene.cloud.points) p.y = -p.y;
  for (OrientedBox3D& b : scene.boxes) {
    b.center.y() = -b.center.y();
    b.yaw = normalize_angle(-b.yaw);
  }
  return scene;
}

Scene scale_scene(Scene scene, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorKind::Validation, "scale factor must be positive");
  for (Point& p : scene.cloud.points) {
    p.x *= factor;
    p.y *= factor;
    p.z *= factor;
  }
  for (OrientedBox3D& b : scene.boxes) {
    b.center *= factor;
    b.size *= factor;
  }
  return scene;
}

Scene rotate_scene(Scene scene, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (Point& p : scene.cloud.points) {
    const double x = c * p.x - s * p.y;
    const double y = s * p.x + c * p.y;
    p.x = x;
    p.y = y;
  }
  for (OrientedBox3D& b : scene.boxes) {
    const double x = c * b.center.x() - s * b.center.y();
    const double y = s * b.center.x() + c * b.center.y();
    b.center.x() = x;
    b.center.y() = y;
    b.yaw = normalize_angle(b.yaw + angle);
  }
  return scene;
}

Scene apply_ops(Scene scene, const AppliedOps& ops) {
  if (ops.flipped) scene = flip_scene(std::move(scene));
  scene = scale_scene(std::move(scene), ops.scale);
  return rotate_scene(std::move(scene), ops.rotation);
}

AugmentResult augment_scene(Scene scene, const AugmentConfig& config, std::uint64_t seed) {
  validate(config);
  Rng rng(seed);
  AppliedOps ops;
  ops.flipped = uniform_real(rng, 0.0, 1.0) < config.flip_prob;
  ops.scale = config.scale_lo == config.scale_hi
                  ? config.scale_lo
                  : uniform_real(rng, config.scale_lo, config.scale_hi);
  ops.rotation =
      config.rot_range == 0.0 ? 0.0 : uniform_real(rng, -config.rot_range, config.rot_range);
  return {apply_ops(std::move(scene), ops), ops};
}

GtDatabase build_gt_database(const std::vector<LabeledScene>& scenes, std::size_t min_points,
                             const std::string& class_label) {
  GtDatabase db;
  for (const LabeledScene& scene : scenes) {
    for (const GroundTruth& gt : scene.gts) {
      if (gt.dont_care || !gt.box || gt.class_label != class_label) continue;
      const auto inside = points_in_box(scene.cloud, *gt.box, 0.0);
      if (inside.size() < min_points) continue;
      GtEntry entry;
      entry.box = *gt.box;
      entry.source_frame = scene.cloud.frame_id;
      entry.points.frame_id = scene.cloud.frame_id;
      entry.points.points.reserve(inside.size());
      for (std::uint32_t i : inside) entry.points.points.push_back(scene.cloud.points[i]);
      db.entries.push_back(std::move(entry));
    }
  }
  return db;
}

void save_gt_database(const std::filesystem::path& dir, const GtDatabase& db) {
  std::filesystem::create_directories(dir);
  json index = json::array();
  for (std::size_t i = 0; i < db.entries.size(); ++i) {
    const GtEntry& e = db.entries[i];
    const std::string file = std::to_string(i) + ".bin";
    write_velodyne(dir / file, e.points);
    index.push_back({{"file", file},
                     {"source_frame", e.source_frame},
                     {"center", {e.box.center.x(), e.box.center.y(), e.box.center.z()}},
                     {"size", {e.box.size.x(), e.box.size.y(), e.box.size.z()}},
                     {"yaw", e.box.yaw}});
  }
  std::ofstream out(dir / "index.json");
  if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / "index.json").string());
  out << index.dump(2) << '\n';
}

GtDatabase load_gt_database(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw Error(ErrorKind::Io, "cannot open " + (dir / "index.json").string());
  GtDatabase db;
  try {
    const json index = json::parse(in);
    for (const json& item : index) {
      GtEntry e;
      const auto c = item.at("center").get<std::vector<double>>();
      const auto s = item.at("size").get<std::vector<double>>();
      if (c.size() != 3 || s.size() != 3) {
        throw Error(ErrorKind::Malformed, "database entry needs 3-vectors");
      }
      e.box = make_box({c[0], c[1], c[2]}, {s[0], s[1], s[2]}, item.at("yaw").get<double>());
      e.source_frame = item.at("source_frame").get<std::string>();
      e.points = read_velodyne(dir / item.at("file").get<std::string>());
      e.points.frame_id = e.source_frame;
      db.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Malformed, "database index: " + std::string(e.what()));
  }
  return db;
}

GtAugResult gt_aug_insert(Scene scene, const GtDatabase& db, const AugmentConfig& config,
                          std::uint64_t seed) {
  validate(config);
  GtAugResult result;
  if (db.entries.empty() || config.gtaug_max_inserts == 0) {
    result.scene = std::move(scene);
    return result;
  }
  Rng rng(seed);
  std::vector<std::size_t> order(db.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t draws = std::min(config.gtaug_max_inserts, order.size());
  for (std::size_t i = 0; i < draws; ++i) {
    std::swap(order[i], order[i + uniform_index(rng, order.size() - i)]);
  }

  std::vector<OrientedBox3D> present = scene.boxes;
  std::vector<const GtEntry*> accepted;
  for (std::size_t i = 0; i < draws; ++i) {
    const GtEntry& candidate = db.entries[order[i]];
    bool clear = true;
    for (const OrientedBox3D& b : present) {
      if (bev_iou(candidate.box, b) > config.gtaug_iou_threshold) {
        clear = false;
        break;
      }
    }
    if (!clear) {
      ++result.record.rejected;
      continue;
    }
    present.push_back(candidate.box);
    accepted.push_back(&candidate);
  }

  PointCloud cloud;
  cloud.frame_id = scene.cloud.frame_id;
  cloud.points.reserve(scene.cloud.points.size());
  for (const Point& p : scene.cloud.points) {
    bool occluded = false;
    for (const GtEntry* e : accepted) {
      if (point_in_box(e->box, {p.x, p.y, p.z}, 0.0)) {
        occluded = true;
        break;
      }
    }
    if (occluded) {
      ++result.record.points_removed;
    } else {
      cloud.points.push_back(p);
    }
  }
  for (const GtEntry* e : accepted) {
    cloud.points.insert(cloud.points.end(), e->points.points.begin(), e->points.points.end());
    result.record.points_added += e->points.points.size();
  }
  result.record.inserted = accepted.size();
  result.scene.cloud = std::move(cloud);
  result.scene.boxes = std::move(present);
  return result;
}

}  // namespace dapc
