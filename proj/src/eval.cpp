#include "dapc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"

namespace dapc {

std::vector<std::size_t> nms_bev(std::span<const Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw Error(ErrorKind::Validation, "NMS threshold must lie in (0,1)");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  std::vector<std::size_t> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (!suppressed[j] && bev_iou(dets[i].box, dets[j].box) > iou_threshold) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

const char* to_string(Difficulty level) noexcept {
  switch (level) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

void validate(const DifficultyRules& rules) {
  for (std::size_t k = 1; k < 3; ++k) {
    const auto& prev = rules.levels[k - 1];
    const auto& cur = rules.levels[k];
    if (cur.min_height > prev.min_height || cur.max_occlusion < prev.max_occlusion ||
        cur.max_truncation < prev.max_truncation) {
      throw Error(ErrorKind::Validation, "difficulty thresholds must loosen from easy to hard");
    }
  }
}

std::optional<Difficulty> assign_difficulty(const GroundTruth& gt, const DifficultyRules& rules) {
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& t = rules.levels[k];
    if (gt.bbox2d.height() >= t.min_height && gt.occlusion <= t.max_occlusion &&
        gt.truncation <= t.max_truncation) {
      return static_cast<Difficulty>(k);
    }
  }
  return std::nullopt;
}

double interpolated_ap(std::span<const PrPoint> curve, ApMode mode) {
  const int samples = mode == ApMode::R11 ? 11 : 40;
  std::vector<double> interpolated;
  for (int i = 0; i < samples; ++i) {
    const double recall = mode == ApMode::R11 ? i / 10.0 : (i + 1) / 40.0;
    double best = 0.0;
    for (const PrPoint& p : curve) {
      if (p.recall >= recall) best = std::max(best, p.precision);
    }
    interpolated.push_back(best);
  }
  // Compensated sum keeps hand-computable fixtures exact (3 * 2/3 -> 2).
  return 100.0 * stable_sum(std::move(interpolated)) / samples;
}

namespace {

enum class GtRole { Valid, Ignored, Skip };

struct FrameState {
  std::vector<const OrientedBox3D*> boxes;
  std::vector<GtRole> roles;
  std::vector<bool> matched;
};

GtRole classify(const GroundTruth& gt, Difficulty level, const EvalOptions& options) {
  if (gt.dont_care || !gt.box) return GtRole::Skip;
  if (gt.class_label == options.class_label) {
    const auto d = assign_difficulty(gt, options.rules);
    return d && *d <= level ? GtRole::Valid : GtRole::Ignored;
  }
  const auto& n = options.neighbor_classes;
  return std::find(n.begin(), n.end(), gt.class_label) != n.end() ? GtRole::Ignored
                                                                   : GtRole::Skip;
}

// Best unmatched gt of the given role with IoU >= threshold, or -1.
long best_match(const FrameState& frame, const OrientedBox3D& box, GtRole role,
                const EvalOptions& options) {
  long best = -1;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < frame.boxes.size(); ++g) {
    if (frame.roles[g] != role || frame.matched[g]) continue;
    const double iou = box_iou(box, *frame.boxes[g], options.iou_kind);
    if (iou >= options.iou_threshold && iou > best_iou) {
      best_iou = iou;
      best = static_cast<long>(g);
    }
  }
  return best;
}

}  // namespace

ApResult average_precision(std::span<const Detection> dets, const FrameGroundTruth& gts,
                           Difficulty level, const EvalOptions& options) {
  validate(options.rules);
  std::map<std::string, FrameState> frames;
  ApResult result;
  for (const auto& [frame_id, frame_gts] : gts) {
    FrameState& state = frames[frame_id];
    for (const GroundTruth& gt : frame_gts) {
      const GtRole role = classify(gt, level, options);
      if (role == GtRole::Skip) continue;
      state.boxes.push_back(&*gt.box);
      state.roles.push_back(role);
      state.matched.push_back(false);
      if (role == GtRole::Valid) ++result.num_valid_gt;
    }
  }
  if (result.num_valid_gt == 0) {
    throw Error(ErrorKind::UndefinedMetric,
                std::string("no valid ground truth at level ") + to_string(level));
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    if (dets[a].frame_id != dets[b].frame_id) return dets[a].frame_id < dets[b].frame_id;
    return a < b;
  });

  std::size_t tp = 0;
  std::size_t fp = 0;
  const double npos = static_cast<double>(result.num_valid_gt);
  for (std::size_t i : order) {
    const Detection& det = dets[i];
    if (!std::isfinite(det.score)) throw Error(ErrorKind::Validation, "non-finite score");
    const auto it = frames.find(det.frame_id);
    if (it == frames.end()) {
      throw Error(ErrorKind::Validation, "detection frame '" + det.frame_id +
                                             "' has no ground truth entry");
    }
    FrameState& frame = it->second;
    long g = best_match(frame, det.box, GtRole::Valid, options);
    if (g >= 0) {
      frame.matched[static_cast<std::size_t>(g)] = true;
      ++tp;
    } else if ((g = best_match(frame, det.box, GtRole::Ignored, options)) >= 0) {
      frame.matched[static_cast<std::size_t>(g)] = true;
      ++result.ignored_detections;
      continue;
    } else {
      ++fp;
    }
    result.curve.push_back({det.score, static_cast<double>(tp) / static_cast<double>(tp + fp),
                            static_cast<double>(tp) / npos});
  }
  result.true_positives = tp;
  result.false_positives = fp;
  result.ap = interpolated_ap(result.curve, options.mode);
  return result;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<Detection> dets;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::istringstream row(line);
    std::vector<double> v;
    for (double x; row >> x;) v.push_back(x);
    if (v.empty() && row.eof()) continue;
    if (!row.eof() || v.size() != 8) {
      throw Error(ErrorKind::Malformed, path.string() + ": line " + std::to_string(line_no) +
                                            " needs 8 numbers (score x y z l w h yaw)");
    }
    Detection d;
    d.score = v[0];
    d.box = make_box({v[1], v[2], v[3]}, {v[4], v[5], v[6]}, v[7]);
    d.frame_id = path.stem().string();
    dets.push_back(std::move(d));
  }
  return dets;
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> dets) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (const Detection& d : dets) {
    out << d.score << ' ' << d.box.center.x() << ' ' << d.box.center.y() << ' '
        << d.box.center.z() << ' ' << d.box.length() << ' ' << d.box.width() << ' '
        << d.box.height() << ' ' << d.box.yaw << '\n';
  }
}

}  // namespace dapc
