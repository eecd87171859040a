#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dapc/geometry.hpp"
#include "dapc/point_cloud.hpp"

namespace dapc {

struct BBox2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double height() const { return bottom - top; }
};

struct GroundTruth {
  std::optional<OrientedBox3D> box;  // LiDAR frame; unset for DontCare rows
  std::string class_label;
  double truncation = 0.0;
  int occlusion = 0;
  BBox2D bbox2d;
  double alpha = 0.0;
  bool dont_care = false;
};

struct Calibration {
  Eigen::Matrix<double, 3, 4> P2 = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix3d R0_rect = Eigen::Matrix3d::Identity();
  Eigen::Matrix<double, 3, 4> Tr_velo_to_cam = Eigen::Matrix<double, 3, 4>::Identity();

  // Rectified camera coordinates of a LiDAR point: R0_rect * Tr_velo_to_cam * [p; 1].
  Eigen::Vector3d lidar_to_camera(const Eigen::Vector3d& p) const;
  Eigen::Vector3d camera_to_lidar(const Eigen::Vector3d& p) const;
};

// Throws Validation if either rotation block deviates from orthonormal by
// more than 1e-3 (max-abs entry of R R^T - I).
void validate(const Calibration& calib);

// Camera-frame KITTI box parameters as they appear in a label row.
struct CameraBox {
  Eigen::Vector3d bottom_center;  // x, y, z in rectified camera coordinates
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double ry = 0.0;
};

// Box in LiDAR frame: centroid lifted by h/2, yaw = -ry - pi/2.
OrientedBox3D camera_box_to_lidar(const CameraBox& cam, const Calibration& calib);
CameraBox lidar_box_to_camera(const OrientedBox3D& box, const Calibration& calib);

PointCloud read_velodyne(const std::filesystem::path& path);
void write_velodyne(const std::filesystem::path& path, const PointCloud& cloud);

std::vector<GroundTruth> parse_labels(const std::string& text, const Calibration& calib);
std::vector<GroundTruth> read_labels(const std::filesystem::path& path,
                                     const Calibration& calib);
// Writes 15-column KITTI rows; DontCare rows keep KITTI's placeholder values.
void write_labels(const std::filesystem::path& path, const std::vector<GroundTruth>& gts,
                  const Calibration& calib);

Calibration parse_calibration(const std::string& text);
Calibration read_calibration(const std::filesystem::path& path);
void write_calibration(const std::filesystem::path& path, const Calibration& calib);

// Calibration with the standard KITTI axis permutation (camera x = -LiDAR y,
// camera y = -LiDAR z, camera z = LiDAR x) and no offsets.
Calibration canonical_calibration();

}  // namespace dapc
