#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dapc/kitti_io.hpp"
#include "dapc/partition.hpp"

namespace dapc {

// Synthetic scenes with a range-decaying density profile, for running the
// pipeline without KITTI data.
struct SyntheticSceneSpec {
  double bin_width = 5.0;
  // Mean background points per range bin starting at 0 m.
  std::vector<double> mean_counts{4800, 3800, 2900, 2300, 1300, 1000, 750,
                                  550,  300,  230,  170,  130,  100,  70};
  double count_noise = 0.1;  // relative standard deviation of each bin count
  std::array<std::size_t, 3> n_cars{2, 2, 1};
  RegionSpec regions = RegionSpec::disjoint();
  double lateral_half_width = 30.0;
  double ground_z = -1.7;
  // A car at range r receives about car_point_scale / max(r, 5)^2 points.
  double car_point_scale = 40000.0;
};
void validate(const SyntheticSceneSpec& spec);

struct GeneratedScene {
  PointCloud cloud;
  std::vector<GroundTruth> gts;  // LiDAR-frame cars, 2D boxes from canonical_calibration()
};

// Coordinates are rounded to f32 so scenes survive velodyne serialization.
// Throws Placement if a car cannot be placed without BEV overlap in 1000 tries.
GeneratedScene generate_scene(const SyntheticSceneSpec& spec, std::uint64_t seed);

std::vector<OrientedBox3D> boxes_of(const std::vector<GroundTruth>& gts);

}  // namespace dapc
