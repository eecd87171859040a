#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dapc/point_cloud.hpp"

namespace dapc {

// Upright box in the LiDAR frame. `center` is the 3D centroid, `size` is
// (length along heading, width, height), `yaw` is counterclockwise about +z
// from +x, kept in (-pi, pi].
struct OrientedBox3D {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;

  double length() const { return size.x(); }
  double width() const { return size.y(); }
  double height() const { return size.z(); }
  double volume() const { return size.prod(); }
  double z_min() const { return center.z() - 0.5 * size.z(); }
  double z_max() const { return center.z() + 0.5 * size.z(); }

  friend bool operator==(const OrientedBox3D& a, const OrientedBox3D& b) {
    return a.center == b.center && a.size == b.size && a.yaw == b.yaw;
  }
};

// Throws Validation unless sizes are finite and positive and yaw is normalized.
void validate(const OrientedBox3D& box);

// Builds a box with yaw normalized; validates the result.
OrientedBox3D make_box(const Eigen::Vector3d& center, const Eigen::Vector3d& size,
                       double yaw);

// Maps an angle into (-pi, pi].
double normalize_angle(double angle);

using Vec2 = Eigen::Vector2d;

// Convex polygon, vertices counterclockwise.
struct Polygon2D {
  std::vector<Vec2> vertices;
};

double signed_area(const Polygon2D& polygon);

// Bottom face counterclockwise, then top face counterclockwise (viewed from +z).
std::array<Eigen::Vector3d, 8> box_corners(const OrientedBox3D& box);

Polygon2D bev_footprint(const OrientedBox3D& box);

// Sutherland-Hodgman clip of `subject` against convex `clip`. Vertices within
// 1e-9 m of a clip edge count as inside. Degenerate results come back empty.
Polygon2D clip_convex(const Polygon2D& subject, const Polygon2D& clip);

// Expresses world point p in the box's local axes (origin at center).
Eigen::Vector3d to_box_local(const OrientedBox3D& box, const Eigen::Vector3d& p);

bool point_in_box(const OrientedBox3D& box, const Eigen::Vector3d& p,
                  double margin = 0.0);

// Indices (ascending) of points within half-size + margin on every local axis.
std::vector<std::uint32_t> points_in_box(const PointCloud& cloud,
                                         const OrientedBox3D& box,
                                         double margin = 0.0);

double bev_intersection_area(const OrientedBox3D& a, const OrientedBox3D& b);

// Both IoUs are exactly symmetric in their arguments.
double bev_iou(const OrientedBox3D& a, const OrientedBox3D& b);
double iou_3d(const OrientedBox3D& a, const OrientedBox3D& b);

enum class IouKind { ThreeD, Bev };
double box_iou(const OrientedBox3D& a, const OrientedBox3D& b, IouKind kind);

// Largest pairwise BEV IoU among `boxes`; 0 for fewer than two boxes.
double max_pairwise_bev_iou(const std::vector<OrientedBox3D>& boxes);

}  // namespace dapc
