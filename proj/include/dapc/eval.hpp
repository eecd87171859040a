#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dapc/geometry.hpp"
#include "dapc/kitti_io.hpp"

namespace dapc {

struct Detection {
  OrientedBox3D box;
  double score = 0.0;
  std::string frame_id;
};

// Greedy by descending score (ties: lower index first); drops any detection
// whose BEV IoU with a kept one exceeds the threshold. Returns kept indices in
// the order they were kept.
std::vector<std::size_t> nms_bev(std::span<const Detection> dets, double iou_threshold);

enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2 };
const char* to_string(Difficulty level) noexcept;

struct DifficultyThresholds {
  double min_height = 0.0;  // pixels
  int max_occlusion = 0;
  double max_truncation = 0.0;
};

struct DifficultyRules {
  std::array<DifficultyThresholds, 3> levels{{
      {40.0, 0, 0.15},
      {25.0, 1, 0.30},
      {25.0, 2, 0.50},
  }};
};
void validate(const DifficultyRules& rules);

// Easiest level whose thresholds the box satisfies, or nullopt.
std::optional<Difficulty> assign_difficulty(const GroundTruth& gt, const DifficultyRules& rules);

enum class ApMode { R11, R40 };

struct EvalOptions {
  double iou_threshold = 0.7;
  ApMode mode = ApMode::R11;
  IouKind iou_kind = IouKind::ThreeD;
  std::string class_label = "Car";
  // Classes whose boxes absorb matching detections without counting either way.
  std::vector<std::string> neighbor_classes{"Van"};
  DifficultyRules rules;
};

using FrameGroundTruth = std::map<std::string, std::vector<GroundTruth>>;

struct PrPoint {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct ApResult {
  double ap = 0.0;  // percent
  std::size_t num_valid_gt = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t ignored_detections = 0;
  std::vector<PrPoint> curve;  // one point per counted detection, score-descending
};

// Interpolated AP in [0, 100] from a precision/recall curve.
double interpolated_ap(std::span<const PrPoint> curve, ApMode mode);

// Throws UndefinedMetric when no ground truth is valid at this level, and
// Validation when a detection names a frame absent from `gts`.
ApResult average_precision(std::span<const Detection> dets, const FrameGroundTruth& gts,
                           Difficulty level, const EvalOptions& options = {});

// Detection file: one line per box, "score x y z l w h yaw" in the LiDAR frame.
std::vector<Detection> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets);

}  // namespace dapc
