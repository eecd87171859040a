#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dapc/geometry.hpp"
#include "dapc/kitti_io.hpp"
#include "dapc/point_cloud.hpp"

namespace dapc {

struct AugmentConfig {
  double flip_prob = 0.5;
  double scale_lo = 0.95;
  double scale_hi = 1.05;
  double rot_range = 0.78539816339744831;  // pi/4, rotation drawn from [-rot, rot]
  std::size_t gtaug_max_inserts = 15;
  std::size_t gtaug_min_points = 5;
  // Candidates whose BEV IoU with any present box exceeds this are rejected.
  double gtaug_iou_threshold = 0.0;
};
void validate(const AugmentConfig& config);

struct Scene {
  PointCloud cloud;
  std::vector<OrientedBox3D> boxes;
};

struct AppliedOps {
  bool flipped = false;
  double scale = 1.0;
  double rotation = 0.0;
};

// Mirrors across the forward axis: y -> -y, yaw -> -yaw.
Scene flip_scene(Scene scene);
// Similarity scaling of coordinates, box centers and box sizes.
Scene scale_scene(Scene scene, double factor);
// Rotation about +z; box yaw advances by `angle`.
Scene rotate_scene(Scene scene, double angle);

struct AugmentResult {
  Scene scene;
  AppliedOps ops;
};

// Flip with probability flip_prob, then uniform scale, then uniform rotation.
AugmentResult augment_scene(Scene scene, const AugmentConfig& config, std::uint64_t seed);
// Replays recorded parameters.
Scene apply_ops(Scene scene, const AppliedOps& ops);

struct GtEntry {
  OrientedBox3D box;
  PointCloud points;  // stored at the source pose
  std::string source_frame;
};

struct GtDatabase {
  std::vector<GtEntry> entries;
};

struct LabeledScene {
  PointCloud cloud;
  std::vector<GroundTruth> gts;
};

// One entry per `class_label` box holding at least `min_points` interior points.
GtDatabase build_gt_database(const std::vector<LabeledScene>& scenes,
                             std::size_t min_points = 5,
                             const std::string& class_label = "Car");

// Layout: <dir>/index.json plus one velodyne-format <dir>/<n>.bin per entry.
void save_gt_database(const std::filesystem::path& dir, const GtDatabase& db);
GtDatabase load_gt_database(const std::filesystem::path& dir);

struct GtAugRecord {
  std::size_t inserted = 0;
  std::size_t rejected = 0;
  std::size_t points_removed = 0;
  std::size_t points_added = 0;
};

struct GtAugResult {
  Scene scene;
  GtAugRecord record;
};

// Pastes sampled database boxes at their stored poses, skipping any that
// overlap a present box; scene points inside accepted boxes are removed.
GtAugResult gt_aug_insert(Scene scene, const GtDatabase& db, const AugmentConfig& config,
                          std::uint64_t seed);

}  // namespace dapc
