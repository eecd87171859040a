#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dapc {

// Coordinates are held in double; every value read from a velodyne scan is an
// exactly representable float, so writing back to f32 is lossless.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double r = 0.0;  // reflectance in [0, 1]

  friend bool operator==(const Point&, const Point&) = default;
};

struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

}  // namespace dapc
