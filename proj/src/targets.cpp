#include "dapc/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"

namespace dapc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Logit margin that drives softmax cross-entropy to exactly 0 in double.
constexpr double kConfidentLogit = 1000.0;

int bin_of(double shifted, double width, int n_bins) {
  return std::clamp(static_cast<int>(std::floor(shifted / width)), 0, n_bins - 1);
}

double angle_bin_width(const BinConfig& config) {
  return kTwoPi / static_cast<double>(config.num_angle_bins);
}

void check_bin(int bin, int n_bins, const char* what) {
  if (bin < 0 || bin >= n_bins) {
    throw Error(ErrorKind::Validation, std::string(what) + " bin " + std::to_string(bin) +
                                           " outside [0, " + std::to_string(n_bins) + ")");
  }
}

void check_prediction(const BinPrediction& pred, const BinConfig& config) {
  const auto nloc = static_cast<std::size_t>(config.num_location_bins());
  const auto nang = static_cast<std::size_t>(config.num_angle_bins);
  if (pred.x_logits.size() != nloc || pred.x_res.size() != nloc ||
      pred.y_logits.size() != nloc || pred.y_res.size() != nloc ||
      pred.yaw_logits.size() != nang || pred.yaw_res.size() != nang) {
    throw Error(ErrorKind::Validation, "prediction shape does not match bin config");
  }
}

}  // namespace

void validate(const FocalParams& params) {
  if (!(params.alpha_t > 0.0 && params.alpha_t <= 1.0) || !(params.gamma >= 0.0)) {
    throw Error(ErrorKind::Validation, "focal params need alpha_t in (0,1] and gamma >= 0");
  }
}

double focal_loss(double p_t, const FocalParams& params) {
  if (!(p_t > 0.0 && p_t < 1.0)) {
    throw Error(ErrorKind::Domain, "focal loss needs p_t in (0,1), got " + std::to_string(p_t));
  }
  return -params.alpha_t * std::pow(1.0 - p_t, params.gamma) * std::log(p_t);
}

double focal_loss_grad(double p_t, const FocalParams& params) {
  if (!(p_t > 0.0 && p_t < 1.0)) {
    throw Error(ErrorKind::Domain, "focal loss needs p_t in (0,1), got " + std::to_string(p_t));
  }
  const double q = 1.0 - p_t;
  const double modulating = params.gamma == 0.0
                                ? 0.0
                                : params.gamma * std::pow(q, params.gamma - 1.0) * std::log(p_t);
  return params.alpha_t * (modulating - std::pow(q, params.gamma) / p_t);
}

int BinConfig::num_location_bins() const {
  return static_cast<int>(std::lround(2.0 * search_range / bin_size));
}

void validate(const BinConfig& config) {
  const double bins = 2.0 * config.search_range / config.bin_size;
  if (!(config.search_range > 0.0) || !(config.bin_size > 0.0) ||
      std::abs(bins - std::round(bins)) > 1e-9 || config.num_angle_bins < 1 ||
      !(config.mean_size.array() > 0.0).all()) {
    throw Error(ErrorKind::Validation,
                "bin config needs 2*search_range a multiple of bin_size, positive sizes");
  }
}

EncodedTarget encode_bin_targets(const Eigen::Vector3d& proposal_center,
                                 const OrientedBox3D& gt, const BinConfig& config) {
  validate(config);
  EncodedTarget t;
  const double s = config.search_range;
  const double dx = gt.center.x() - proposal_center.x();
  const double dy = gt.center.y() - proposal_center.y();
  if (!(dx >= -s && dx < s && dy >= -s && dy < s)) {
    t.ignore = true;
    return t;
  }
  const int n = config.num_location_bins();
  const double delta = config.bin_size;
  const double sx = dx + s;
  const double sy = dy + s;
  t.bin_x = bin_of(sx, delta, n);
  t.res_x = (sx - (t.bin_x + 0.5) * delta) / delta;
  t.bin_y = bin_of(sy, delta, n);
  t.res_y = (sy - (t.bin_y + 0.5) * delta) / delta;
  t.res_z = gt.center.z() - proposal_center.z();

  // Bins are shifted by half a bin so that bin 0 is centred on yaw 0.
  const double width = angle_bin_width(config);
  double heading = std::fmod(gt.yaw, kTwoPi);
  if (heading < 0.0) heading += kTwoPi;
  const double shifted = std::fmod(heading + 0.5 * width, kTwoPi);
  t.bin_yaw = bin_of(shifted, width, config.num_angle_bins);
  t.res_yaw = (shifted - (t.bin_yaw + 0.5) * width) / width;

  t.res_size = (gt.size.array() / config.mean_size.array()).log();
  return t;
}

OrientedBox3D decode_bin_targets(const Eigen::Vector3d& proposal_center,
                                 const EncodedTarget& encoded, const BinConfig& config) {
  validate(config);
  const int n = config.num_location_bins();
  check_bin(encoded.bin_x, n, "x");
  check_bin(encoded.bin_y, n, "y");
  check_bin(encoded.bin_yaw, config.num_angle_bins, "yaw");
  const double delta = config.bin_size;
  const double s = config.search_range;
  const Eigen::Vector3d center(
      proposal_center.x() + (encoded.bin_x + 0.5 + encoded.res_x) * delta - s,
      proposal_center.y() + (encoded.bin_y + 0.5 + encoded.res_y) * delta - s,
      proposal_center.z() + encoded.res_z);
  const double yaw = (encoded.bin_yaw + encoded.res_yaw) * angle_bin_width(config);
  const Eigen::Vector3d size = config.mean_size.array() * encoded.res_size.array().exp();
  return make_box(center, size, yaw);
}

BinPrediction BinPrediction::zeros(const BinConfig& config) {
  const auto nloc = static_cast<std::size_t>(config.num_location_bins());
  const auto nang = static_cast<std::size_t>(config.num_angle_bins);
  BinPrediction p;
  p.x_logits.assign(nloc, 0.0);
  p.x_res.assign(nloc, 0.0);
  p.y_logits.assign(nloc, 0.0);
  p.y_res.assign(nloc, 0.0);
  p.yaw_logits.assign(nang, 0.0);
  p.yaw_res.assign(nang, 0.0);
  return p;
}

BinPrediction perfect_prediction(const EncodedTarget& target, const BinConfig& config) {
  BinPrediction p = BinPrediction::zeros(config);
  p.x_logits[target.bin_x] = kConfidentLogit;
  p.x_res[target.bin_x] = target.res_x;
  p.y_logits[target.bin_y] = kConfidentLogit;
  p.y_res[target.bin_y] = target.res_y;
  p.yaw_logits[target.bin_yaw] = kConfidentLogit;
  p.yaw_res[target.bin_yaw] = target.res_yaw;
  p.res_z = target.res_z;
  p.res_size = target.res_size;
  return p;
}

double smooth_l1(double x, double beta) {
  const double a = std::abs(x);
  return a < beta ? 0.5 * x * x / beta : a - 0.5 * beta;
}

double smooth_l1_grad(double x, double beta) {
  if (std::abs(x) < beta) return x / beta;
  return x > 0.0 ? 1.0 : -1.0;
}

double cross_entropy(std::span<const double> logits, int target) {
  check_bin(target, static_cast<int>(logits.size()), "class");
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max);
  return std::log(sum) - (logits[static_cast<std::size_t>(target)] - max);
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, int target) {
  check_bin(target, static_cast<int>(logits.size()), "class");
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> grad(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    grad[i] = std::exp(logits[i] - max);
    sum += grad[i];
  }
  for (double& g : grad) g /= sum;
  grad[static_cast<std::size_t>(target)] -= 1.0;
  return grad;
}

BinLoss bin_loss(const BinPrediction& pred, const EncodedTarget& target,
                 const BinConfig& config) {
  check_prediction(pred, config);
  BinLoss loss;
  loss.bin = cross_entropy(pred.x_logits, target.bin_x) +
             cross_entropy(pred.y_logits, target.bin_y) +
             cross_entropy(pred.yaw_logits, target.bin_yaw);
  loss.res = smooth_l1(pred.x_res[target.bin_x] - target.res_x) +
             smooth_l1(pred.y_res[target.bin_y] - target.res_y) +
             smooth_l1(pred.res_z - target.res_z) +
             smooth_l1(pred.yaw_res[target.bin_yaw] - target.res_yaw);
  for (int k = 0; k < 3; ++k) loss.res += smooth_l1(pred.res_size[k] - target.res_size[k]);
  return loss;
}

BinPrediction bin_loss_grad(const BinPrediction& pred, const EncodedTarget& target,
                            const BinConfig& config) {
  check_prediction(pred, config);
  BinPrediction g = BinPrediction::zeros(config);
  g.x_logits = cross_entropy_grad(pred.x_logits, target.bin_x);
  g.y_logits = cross_entropy_grad(pred.y_logits, target.bin_y);
  g.yaw_logits = cross_entropy_grad(pred.yaw_logits, target.bin_yaw);
  g.x_res[target.bin_x] = smooth_l1_grad(pred.x_res[target.bin_x] - target.res_x);
  g.y_res[target.bin_y] = smooth_l1_grad(pred.y_res[target.bin_y] - target.res_y);
  g.yaw_res[target.bin_yaw] = smooth_l1_grad(pred.yaw_res[target.bin_yaw] - target.res_yaw);
  g.res_z = smooth_l1_grad(pred.res_z - target.res_z);
  for (int k = 0; k < 3; ++k) g.res_size[k] = smooth_l1_grad(pred.res_size[k] - target.res_size[k]);
  return g;
}

RpnLoss rpn_loss(std::span<const RpnPoint> points, const FocalParams& focal,
                 const BinConfig& config) {
  validate(focal);
  std::vector<double> focal_terms;
  std::vector<double> reg_terms;
  focal_terms.reserve(points.size());
  for (const RpnPoint& p : points) {
    const double p_t = p.foreground ? p.fg_prob : 1.0 - p.fg_prob;
    const FocalParams weighted{p.foreground ? focal.alpha_t : 1.0 - focal.alpha_t, focal.gamma};
    focal_terms.push_back(weighted.alpha_t == 0.0 ? 0.0 : focal_loss(p_t, weighted));
    if (p.foreground && !p.target.ignore) {
      reg_terms.push_back(bin_loss(p.prediction, p.target, config).total());
    }
  }
  RpnLoss loss;
  const double positives = static_cast<double>(std::max<std::size_t>(reg_terms.size(), 1));
  loss.focal = stable_sum(std::move(focal_terms)) / positives;
  loss.reg = reg_terms.empty() ? 0.0 : stable_sum(reg_terms) / static_cast<double>(reg_terms.size());
  return loss;
}

double binary_cross_entropy(double prob, int label) {
  if (!(prob >= 0.0 && prob <= 1.0) || (label != 0 && label != 1)) {
    throw Error(ErrorKind::Domain, "binary cross-entropy needs prob in [0,1], label 0/1");
  }
  return label == 1 ? -std::log(prob) : -std::log1p(-prob);
}

double binary_cross_entropy_grad(double prob, int label) {
  if (!(prob > 0.0 && prob < 1.0) || (label != 0 && label != 1)) {
    throw Error(ErrorKind::Domain, "binary cross-entropy gradient needs prob in (0,1)");
  }
  return label == 1 ? -1.0 / prob : 1.0 / (1.0 - prob);
}

RefineLoss refine_loss(std::span<const Proposal> proposals, const BinConfig& config) {
  if (proposals.empty()) throw Error(ErrorKind::Validation, "refine loss needs proposals");
  std::vector<double> cls_terms;
  std::vector<double> reg_terms;
  cls_terms.reserve(proposals.size());
  for (const Proposal& o : proposals) {
    cls_terms.push_back(binary_cross_entropy(o.prob, o.label));
    if (o.regress) reg_terms.push_back(bin_loss(o.prediction, o.target, config).total());
  }
  RefineLoss loss;
  loss.cls = stable_sum(std::move(cls_terms)) / static_cast<double>(proposals.size());
  loss.reg = reg_terms.empty() ? 0.0 : stable_sum(reg_terms) / static_cast<double>(reg_terms.size());
  return loss;
}

}  // namespace dapc
