#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "dapc/geometry.hpp"

namespace dapc {

struct FocalParams {
  double alpha_t = 0.25;
  double gamma = 2.0;
};
void validate(const FocalParams& params);

// -alpha_t * (1 - p_t)^gamma * log(p_t); throws Domain for p_t outside (0, 1).
double focal_loss(double p_t, const FocalParams& params);
// d focal_loss / d p_t.
double focal_loss_grad(double p_t, const FocalParams& params);

// Bin layout for box regression. The two horizontal offsets (LiDAR x, y) are
// binned over [-search_range, search_range); vertical offset and log size
// ratios are plain residuals.
struct BinConfig {
  double search_range = 3.0;
  double bin_size = 0.5;
  int num_angle_bins = 12;
  Eigen::Vector3d mean_size{3.9, 1.6, 1.56};  // l, w, h

  int num_location_bins() const;
};
void validate(const BinConfig& config);

struct EncodedTarget {
  int bin_x = 0;
  double res_x = 0.0;  // in bin units, [-0.5, 0.5)
  int bin_y = 0;
  double res_y = 0.0;
  double res_z = 0.0;  // meters
  int bin_yaw = 0;
  double res_yaw = 0.0;  // in bin units, [-0.5, 0.5)
  Eigen::Vector3d res_size = Eigen::Vector3d::Zero();  // log(size / mean_size)
  bool ignore = false;  // horizontal offset outside the search range
};

EncodedTarget encode_bin_targets(const Eigen::Vector3d& proposal_center,
                                 const OrientedBox3D& gt, const BinConfig& config);

// Throws Validation on out-of-range bin indices.
OrientedBox3D decode_bin_targets(const Eigen::Vector3d& proposal_center,
                                 const EncodedTarget& encoded, const BinConfig& config);

// Network-style prediction for one point or proposal: logits and a residual per
// bin for x, y and yaw, plus direct vertical and size residuals.
struct BinPrediction {
  std::vector<double> x_logits, x_res;
  std::vector<double> y_logits, y_res;
  std::vector<double> yaw_logits, yaw_res;
  double res_z = 0.0;
  Eigen::Vector3d res_size = Eigen::Vector3d::Zero();

  static BinPrediction zeros(const BinConfig& config);
};

// The prediction that scores zero loss against `target` (logit margin large
// enough that cross-entropy rounds to 0).
BinPrediction perfect_prediction(const EncodedTarget& target, const BinConfig& config);

double smooth_l1(double x, double beta = 1.0);
double smooth_l1_grad(double x, double beta = 1.0);

// -log softmax(logits)[target], computed with the max-shift.
double cross_entropy(std::span<const double> logits, int target);
std::vector<double> cross_entropy_grad(std::span<const double> logits, int target);

struct BinLoss {
  double bin = 0.0;  // cross-entropy terms (x, y, yaw)
  double res = 0.0;  // smooth-L1 terms on the target-bin residuals, z and sizes
  double total() const { return bin + res; }
};

BinLoss bin_loss(const BinPrediction& pred, const EncodedTarget& target,
                 const BinConfig& config);
// Gradient of bin_loss(...).total() with respect to every prediction entry.
BinPrediction bin_loss_grad(const BinPrediction& pred, const EncodedTarget& target,
                            const BinConfig& config);

struct RpnPoint {
  double fg_prob = 0.5;  // predicted foreground probability
  bool foreground = false;
  BinPrediction prediction;  // used only for foreground points
  EncodedTarget target;
};

struct RpnLoss {
  double focal = 0.0;  // summed focal loss over all points / max(|P|, 1)
  double reg = 0.0;    // (1/|P|) sum over P of (L_bin + L_res); 0 when P is empty
};

RpnLoss rpn_loss(std::span<const RpnPoint> points, const FocalParams& focal,
                 const BinConfig& config);

struct Proposal {
  double prob = 0.5;  // predicted probability of the positive class
  int label = 0;      // 0 or 1
  bool regress = false;  // member of the positive set R
  BinPrediction prediction;
  EncodedTarget target;
};

struct RefineLoss {
  double cls = 0.0;  // mean binary cross-entropy over O
  double reg = 0.0;  // mean (L_bin + L_res) over R; 0 when R is empty
  double total() const { return cls + reg; }
};

// Throws Validation if `proposals` is empty.
RefineLoss refine_loss(std::span<const Proposal> proposals, const BinConfig& config);

double binary_cross_entropy(double prob, int label);
double binary_cross_entropy_grad(double prob, int label);

}  // namespace dapc
