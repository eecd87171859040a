#include "dapc/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"

namespace dapc {
namespace {

constexpr int kMaxPlacementTries = 1000;

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

Point f32_point(double x, double y, double z, double r) {
  return {to_f32(x), to_f32(y), to_f32(z), to_f32(r)};
}

BBox2D project_bbox(const OrientedBox3D& box, const Calibration& calib) {
  BBox2D bb{1e9, 1e9, -1e9, -1e9};
  for (const auto& corner : box_corners(box)) {
    const Eigen::Vector3d cam = calib.lidar_to_camera(corner);
    const Eigen::Vector3d uvw = calib.P2 * cam.homogeneous();
    const double depth = std::max(uvw.z(), 1e-3);
    bb.left = std::min(bb.left, uvw.x() / depth);
    bb.right = std::max(bb.right, uvw.x() / depth);
    bb.top = std::min(bb.top, uvw.y() / depth);
    bb.bottom = std::max(bb.bottom, uvw.y() / depth);
  }
  return bb;
}

// Sample on one of the four sides or the roof, just inside the box.
Point surface_point(const OrientedBox3D& box, Rng& rng) {
  const Eigen::Vector3d half = 0.5 * 0.98 * box.size;
  Eigen::Vector3d local(uniform_real(rng, -half.x(), half.x()),
                        uniform_real(rng, -half.y(), half.y()),
                        uniform_real(rng, -half.z(), half.z()));
  switch (uniform_index(rng, 5)) {
    case 0: local.x() = half.x(); break;
    case 1: local.x() = -half.x(); break;
    case 2: local.y() = half.y(); break;
    case 3: local.y() = -half.y(); break;
    default: local.z() = half.z(); break;
  }
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return f32_point(box.center.x() + c * local.x() - s * local.y(),
                   box.center.y() + s * local.x() + c * local.y(), box.center.z() + local.z(),
                   uniform_real(rng, 0.0, 1.0));
}

}  // namespace

void validate(const SyntheticSceneSpec& spec) {
  validate(spec.regions);
  const bool counts_ok = std::all_of(spec.mean_counts.begin(), spec.mean_counts.end(),
                                     [](double c) { return c >= 0.0; });
  if (!(spec.bin_width > 0.0) || !counts_ok || !(spec.count_noise >= 0.0) ||
      !(spec.lateral_half_width > 0.0) || !(spec.car_point_scale >= 0.0)) {
    throw Error(ErrorKind::Validation, "invalid synthetic scene spec");
  }
}

std::vector<OrientedBox3D> boxes_of(const std::vector<GroundTruth>& gts) {
  std::vector<OrientedBox3D> boxes;
  for (const auto& gt : gts) {
    if (gt.box) boxes.push_back(*gt.box);
  }
  return boxes;
}

GeneratedScene generate_scene(const SyntheticSceneSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  const Calibration calib = canonical_calibration();
  GeneratedScene scene;
  scene.cloud.frame_id = "synth_" + std::to_string(seed);

  const RegionSpec& rs = spec.regions;
  const std::array<std::array<double, 2>, 3> spans{{
      {5.0, rs.b1}, {rs.b1, rs.b2}, {rs.b2, rs.max_range - 3.0}}};
  const Eigen::Vector3d mean_size(3.9, 1.6, 1.56);
  std::vector<OrientedBox3D> placed;
  for (std::size_t region = 0; region < 3; ++region) {
    for (std::size_t n = 0; n < spec.n_cars[region]; ++n) {
      bool done = false;
      for (int attempt = 0; attempt < kMaxPlacementTries && !done; ++attempt) {
        const Eigen::Vector3d size =
            mean_size.array() * Eigen::Array3d(uniform_real(rng, 0.9, 1.1),
                                               uniform_real(rng, 0.9, 1.1),
                                               uniform_real(rng, 0.9, 1.1));
        const double x = uniform_real(rng, spans[region][0], spans[region][1]);
        const double y = uniform_real(rng, -0.5 * spec.lateral_half_width,
                                      0.5 * spec.lateral_half_width);
        const double yaw = uniform_real(rng, -std::numbers::pi, std::numbers::pi);
        const OrientedBox3D box =
            make_box({to_f32(x), to_f32(y), to_f32(spec.ground_z + 0.5 * size.z())},
                     {to_f32(size.x()), to_f32(size.y()), to_f32(size.z())}, yaw);
        const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const auto& b) {
          return bev_iou(box, b) > 0.0;
        });
        if (overlaps) continue;
        placed.push_back(box);
        done = true;
      }
      if (!done) {
        throw Error(ErrorKind::Placement, "could not place car " + std::to_string(n) +
                                              " in " + to_string(kRegions[region]) +
                                              " region without overlap");
      }
    }
  }

  auto inside_any = [&](const Point& p) {
    return std::any_of(placed.begin(), placed.end(), [&](const OrientedBox3D& b) {
      return point_in_box(b, {p.x, p.y, p.z}, 0.0);
    });
  };
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  for (std::size_t k = 0; k < spec.mean_counts.size(); ++k) {
    const double lo = static_cast<double>(k) * spec.bin_width;
    if (lo >= rs.max_range) break;
    const double hi = std::min(lo + spec.bin_width, rs.max_range);
    const double noisy = spec.mean_counts[k] * (1.0 + spec.count_noise * unit_normal(rng));
    const auto count = static_cast<std::size_t>(std::max(0.0, std::round(noisy)));
    for (std::size_t i = 0; i < count; ++i) {
      const Point p = f32_point(uniform_real(rng, lo, hi),
                                uniform_real(rng, -spec.lateral_half_width,
                                             spec.lateral_half_width),
                                spec.ground_z + 0.05 * unit_normal(rng),
                                uniform_real(rng, 0.0, 1.0));
      if (p.x > rs.max_range || inside_any(p)) continue;
      scene.cloud.points.push_back(p);
    }
  }

  for (const OrientedBox3D& box : placed) {
    const double range = std::max(5.0, box.center.x());
    const auto n_points =
        static_cast<std::size_t>(std::round(spec.car_point_scale / (range * range)));
    for (std::size_t i = 0; i < n_points; ++i) scene.cloud.points.push_back(surface_point(box, rng));

    GroundTruth gt;
    gt.box = box;
    gt.class_label = "Car";
    gt.bbox2d = project_bbox(box, calib);
    const Eigen::Vector3d cam = calib.lidar_to_camera(box.center);
    gt.alpha = normalize_angle(-box.yaw - 0.5 * std::numbers::pi - std::atan2(cam.x(), cam.z()));
    scene.gts.push_back(std::move(gt));
  }
  return scene;
}

}  // namespace dapc
