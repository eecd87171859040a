#pragma once

// Independent reference implementations used to freeze expected values.
// None of these call into the library code paths they check.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dapc/eval.hpp"
#include "dapc/geometry.hpp"
#include "dapc/kitti_io.hpp"
#include "dapc/numeric.hpp"
#include "dapc/partition.hpp"
#include "dapc/point_cloud.hpp"
#include "dapc/targets.hpp"

namespace oracle {

// Half-space containment built from a rotation matrix and face planes.
bool inside_box(const dapc::OrientedBox3D& box, const Eigen::Vector3d& p, double margin);

// Stratified uniform samples (one per grid cell) over the bounding box of both
// footprints (or volumes).
double monte_carlo_bev_iou(const dapc::OrientedBox3D& a, const dapc::OrientedBox3D& b,
                           std::size_t samples, std::uint64_t seed);
double monte_carlo_iou_3d(const dapc::OrientedBox3D& a, const dapc::OrientedBox3D& b,
                          std::size_t samples, std::uint64_t seed);

// O(n^2 k): recomputes every candidate's distance to the chosen set each step.
std::vector<std::uint32_t> brute_force_fps(const std::vector<dapc::Point>& points,
                                           std::size_t k, std::size_t start);

// Full pairwise distance filter.
std::vector<std::vector<std::uint32_t>> brute_force_ball_query(
    const std::vector<dapc::Point>& centroids, const std::vector<dapc::Point>& cloud,
    double radius, std::size_t max_samples);

// Region membership by explicit interval tests.
std::array<bool, 3> classify_range(double r, double b1, double b2, double max_range,
                                   double overlap);

// Integer-arithmetic budget allocation; nullopt when infeasible.
std::optional<std::array<long, 3>> budget(double m2, double s2, double m3, double s3,
                                          double k_mid, double k_far, long total, long g);

// Reference NMS: keep a box iff no previously kept box overlaps it.
std::vector<std::size_t> brute_force_nms(const std::vector<dapc::Detection>& dets,
                                         double threshold);

// Difficulty by separate predicate per level; -1 when none applies.
int difficulty(double height, int occlusion, double truncation);

// Camera-frame corners of a KITTI label box (x right, y down, z forward).
std::array<Eigen::Vector3d, 8> kitti_camera_corners(const Eigen::Vector3d& bottom_center,
                                                    double h, double w, double l, double ry);

// Scalar loss pieces written out term by term.
double log_softmax_ce(const std::vector<double>& logits, int target);
double huber(double x);
double bin_loss(const dapc::BinPrediction& pred, const dapc::EncodedTarget& t);

double randn(dapc::Rng& rng);
dapc::OrientedBox3D random_box(dapc::Rng& rng, double spread, double min_size = 0.5,
                               double max_size = 5.0);
std::vector<dapc::Point> random_points(dapc::Rng& rng, std::size_t n, double extent);

}  // namespace oracle
