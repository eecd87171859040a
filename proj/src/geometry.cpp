#include "dapc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "dapc/error.hpp"

namespace dapc {
namespace {

constexpr double kEdgeEpsilon = 1e-9;
constexpr double kMinArea = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Signed distance of p from the directed line a->b; positive on the left.
double side(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 edge = b - a;
  const double len = edge.norm();
  if (len == 0.0) return 0.0;
  return cross(edge, p - a) / len;
}

Vec2 line_intersection(const Vec2& s, const Vec2& e, double ds, double de) {
  const double t = ds / (ds - de);
  return s + t * (e - s);
}

void drop_duplicates(std::vector<Vec2>& v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const Vec2& p : v) {
    if (out.empty() || (p - out.back()).norm() > kEdgeEpsilon) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= kEdgeEpsilon) {
    out.pop_back();
  }
  v = std::move(out);
}

auto ordering_key(const OrientedBox3D& b) {
  return std::make_tuple(b.center.x(), b.center.y(), b.center.z(), b.size.x(),
                         b.size.y(), b.size.z(), b.yaw);
}

// Canonical argument order so both IoU routes run the same arithmetic.
std::pair<const OrientedBox3D*, const OrientedBox3D*> canonical(
    const OrientedBox3D& a, const OrientedBox3D& b) {
  if (ordering_key(b) < ordering_key(a)) return {&b, &a};
  return {&a, &b};
}

}  // namespace

double normalize_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a > std::numbers::pi) a -= two_pi;
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

void validate(const OrientedBox3D& box) {
  const bool finite = box.center.allFinite() && box.size.allFinite() &&
                      std::isfinite(box.yaw);
  if (!finite || (box.size.array() <= 0.0).any() ||
      box.yaw <= -std::numbers::pi || box.yaw > std::numbers::pi) {
    std::ostringstream msg;
    msg << "invalid box: size (" << box.size.transpose() << "), yaw " << box.yaw;
    throw Error(ErrorKind::Validation, msg.str());
  }
}

OrientedBox3D make_box(const Eigen::Vector3d& center, const Eigen::Vector3d& size,
                       double yaw) {
  OrientedBox3D box{center, size, normalize_angle(yaw)};
  validate(box);
  return box;
}

double signed_area(const Polygon2D& polygon) {
  const auto& v = polygon.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

std::array<Eigen::Vector3d, 8> box_corners(const OrientedBox3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.length();
  const double hw = 0.5 * box.width();
  const double hh = 0.5 * box.height();
  constexpr std::array<std::array<double, 2>, 4> local{
      {{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}};
  std::array<Eigen::Vector3d, 8> corners;
  for (std::size_t i = 0; i < 4; ++i) {
    const double lx = local[i][0] * hl;
    const double ly = local[i][1] * hw;
    const double wx = box.center.x() + c * lx - s * ly;
    const double wy = box.center.y() + s * lx + c * ly;
    corners[i] = {wx, wy, box.center.z() - hh};
    corners[i + 4] = {wx, wy, box.center.z() + hh};
  }
  return corners;
}

Polygon2D bev_footprint(const OrientedBox3D& box) {
  const auto corners = box_corners(box);
  Polygon2D poly;
  poly.vertices.reserve(4);
  for (std::size_t i = 0; i < 4; ++i) poly.vertices.push_back(corners[i].head<2>());
  return poly;
}

Polygon2D clip_convex(const Polygon2D& subject, const Polygon2D& clip) {
  std::vector<Vec2> output = subject.vertices;
  const auto& edges = clip.vertices;
  for (std::size_t i = 0; i < edges.size() && !output.empty(); ++i) {
    const Vec2& a = edges[i];
    const Vec2& b = edges[(i + 1) % edges.size()];
    std::vector<Vec2> input = std::move(output);
    output.clear();
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Vec2& s = input[j];
      const Vec2& e = input[(j + 1) % input.size()];
      const double ds = side(a, b, s);
      const double de = side(a, b, e);
      const bool s_in = ds >= -kEdgeEpsilon;
      if (s_in) output.push_back(s);
      // Only a crossing strictly between the endpoints adds a vertex.
      if ((ds > kEdgeEpsilon && de < -kEdgeEpsilon) ||
          (ds < -kEdgeEpsilon && de > kEdgeEpsilon)) {
        output.push_back(line_intersection(s, e, ds, de));
      }
    }
    drop_duplicates(output);
  }
  Polygon2D result{std::move(output)};
  if (result.vertices.size() < 3 || std::abs(signed_area(result)) < kMinArea) {
    return {};
  }
  return result;
}

Eigen::Vector3d to_box_local(const OrientedBox3D& box, const Eigen::Vector3d& p) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Eigen::Vector3d d = p - box.center;
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
}

bool point_in_box(const OrientedBox3D& box, const Eigen::Vector3d& p, double margin) {
  const Eigen::Vector3d local = to_box_local(box, p);
  return std::abs(local.x()) <= 0.5 * box.length() + margin &&
         std::abs(local.y()) <= 0.5 * box.width() + margin &&
         std::abs(local.z()) <= 0.5 * box.height() + margin;
}

std::vector<std::uint32_t> points_in_box(const PointCloud& cloud,
                                         const OrientedBox3D& box, double margin) {
  if (margin < 0.0) throw Error(ErrorKind::Validation, "margin must be >= 0");
  std::vector<std::uint32_t> inside;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point& p = cloud.points[i];
    if (point_in_box(box, {p.x, p.y, p.z}, margin)) {
      inside.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return inside;
}

double bev_intersection_area(const OrientedBox3D& a, const OrientedBox3D& b) {
  const auto [first, second] = canonical(a, b);
  const double reach = 0.5 * (first->size.head<2>().norm() + second->size.head<2>().norm());
  if ((first->center.head<2>() - second->center.head<2>()).norm() > reach) return 0.0;
  const Polygon2D overlap = clip_convex(bev_footprint(*first), bev_footprint(*second));
  return std::abs(signed_area(overlap));
}

double bev_iou(const OrientedBox3D& a, const OrientedBox3D& b) {
  const double inter = bev_intersection_area(a, b);
  if (inter < kMinArea) return 0.0;
  // Sum in canonical order so the result is symmetric bit-for-bit.
  const auto [first, second] = canonical(a, b);
  const double sum = first->length() * first->width() + second->length() * second->width();
  return std::clamp(inter / (sum - inter), 0.0, 1.0);
}

double iou_3d(const OrientedBox3D& a, const OrientedBox3D& b) {
  const double overlap_z =
      std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
  if (overlap_z <= 0.0) return 0.0;
  const double area = bev_intersection_area(a, b);
  if (area < kMinArea) return 0.0;
  const double inter = area * overlap_z;
  const auto [first, second] = canonical(a, b);
  const double sum = first->volume() + second->volume();
  return std::clamp(inter / (sum - inter), 0.0, 1.0);
}

double box_iou(const OrientedBox3D& a, const OrientedBox3D& b, IouKind kind) {
  return kind == IouKind::ThreeD ? iou_3d(a, b) : bev_iou(a, b);
}

double max_pairwise_bev_iou(const std::vector<OrientedBox3D>& boxes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      worst = std::max(worst, bev_iou(boxes[i], boxes[j]));
    }
  }
  return worst;
}

}  // namespace dapc
