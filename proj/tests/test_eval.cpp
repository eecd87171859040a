#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>

#include "doctest.h"
#include "dapc/error.hpp"
#include "dapc/eval.hpp"
#include "oracles.hpp"

using namespace dapc;

namespace {

GroundTruth car(const OrientedBox3D& box, double height = 60, int occlusion = 0,
                double truncation = 0.0, const std::string& label = "Car") {
  GroundTruth gt;
  gt.box = box;
  gt.class_label = label;
  gt.occlusion = occlusion;
  gt.truncation = truncation;
  gt.bbox2d = {100, 100, 200, 100 + height};
  return gt;
}

Detection det(const OrientedBox3D& box, double score, const std::string& frame) {
  return {box, score, frame};
}

OrientedBox3D shifted(const OrientedBox3D& b, double dx) {
  return make_box(b.center + Eigen::Vector3d(dx, 0, 0), b.size, b.yaw);
}

// Three frames with one valid car each.
struct Fixture {
  FrameGroundTruth gts;
  std::vector<OrientedBox3D> cars;
  Fixture() {
    for (int f = 0; f < 3; ++f) {
      cars.push_back(make_box({10.0 + 10 * f, 2.0 * f, -0.9}, {3.9, 1.6, 1.56}, 0.1 * f));
      gts[std::to_string(f)] = {car(cars.back())};
    }
  }
};

}  // namespace

TEST_CASE("NMS matches the brute-force oracle") {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<Detection> dets;
    const int n = 5 + static_cast<int>(uniform_index(rng, 60));
    for (int i = 0; i < n; ++i) {
      // coarse scores force ties
      dets.push_back({oracle::random_box(rng, 8.0, 1.0, 4.0), std::round(uniform_real(rng, 0, 10)) / 10, "0"});
    }
    for (double thr : {0.01, 0.1, 0.5, 0.9}) {
      const auto kept = nms_bev(dets, thr);
      CHECK(kept == oracle::brute_force_nms(dets, thr));
      for (std::size_t i = 1; i < kept.size(); ++i) CHECK(dets[kept[i - 1]].score >= dets[kept[i]].score);
    }
  }
  const auto box = make_box({0, 0, 0}, {4, 2, 1.5}, 0.0);
  const std::vector<Detection> same{{box, 0.5, "0"}, {box, 0.9, "0"}};
  CHECK(nms_bev(same, 0.5) == std::vector<std::size_t>{1});
}

TEST_CASE("difficulty levels agree with per-level predicates") {
  const DifficultyRules rules;
  for (double h : {10.0, 24.9, 25.0, 30.0, 39.9, 40.0, 80.0}) {
    for (int occ : {0, 1, 2, 3}) {
      for (double tr : {0.0, 0.15, 0.2, 0.3, 0.45, 0.5, 0.8}) {
        const auto got = assign_difficulty(car(make_box({0, 0, 0}, {1, 1, 1}, 0), h, occ, tr), rules);
        const int expected = oracle::difficulty(h, occ, tr);
        CHECK((got ? static_cast<int>(*got) : -1) == expected);
      }
    }
  }
  DifficultyRules bad;
  bad.levels[2].min_height = 50;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("hand-computed precision/recall fixture") {
  Fixture fx;
  // score 0.9 hits frame 0, 0.8 misses in frame 1, 0.7 hits frame 2; frame 1's car is never found
  const std::vector<Detection> dets{
      det(fx.cars[0], 0.9, "0"),
      det(shifted(fx.cars[1], 5.0), 0.8, "1"),
      det(fx.cars[2], 0.7, "2"),
  };
  EvalOptions r11;
  const auto res = average_precision(dets, fx.gts, Difficulty::Easy, r11);
  CHECK(res.true_positives == 2);
  CHECK(res.false_positives == 1);
  REQUIRE(res.curve.size() == 3);
  CHECK(res.curve[1].precision == 0.5);
  // recall 0.0-0.3 at precision 1, 0.4-0.6 at precision 2/3, rest 0
  CHECK(res.ap == 600.0 / 11.0);

  EvalOptions r40;
  r40.mode = ApMode::R40;
  // 13 recall points at precision 1, 13 at 2/3
  CHECK(average_precision(dets, fx.gts, Difficulty::Easy, r40).ap ==
        doctest::Approx(100.0 * 65.0 / 120.0).epsilon(1e-14));
}

TEST_CASE("perfect and empty detection sets") {
  Fixture fx;
  std::vector<Detection> perfect;
  for (int f = 0; f < 3; ++f) perfect.push_back(det(fx.cars[f], 0.5 + 0.1 * f, std::to_string(f)));
  for (auto mode : {ApMode::R11, ApMode::R40}) {
    for (auto kind : {IouKind::ThreeD, IouKind::Bev}) {
      EvalOptions o;
      o.mode = mode;
      o.iou_kind = kind;
      CHECK(average_precision(perfect, fx.gts, Difficulty::Easy, o).ap == 100.0);
      CHECK(average_precision({}, fx.gts, Difficulty::Hard, o).ap == 0.0);
    }
  }
  // a duplicate of a matched box is a false positive
  perfect.push_back(det(fx.cars[0], 0.1, "0"));
  const auto dup = average_precision(perfect, fx.gts, Difficulty::Easy);
  CHECK(dup.false_positives == 1);
  CHECK(dup.ap == 100.0);
}

TEST_CASE("ignored ground truth absorbs detections") {
  FrameGroundTruth gts;
  const auto easy = make_box({10, 0, -0.9}, {3.9, 1.6, 1.56}, 0);
  const auto hard = make_box({20, 5, -0.9}, {3.9, 1.6, 1.56}, 0);
  const auto van = make_box({30, -5, -0.9}, {5, 2, 2}, 0);
  GroundTruth dc;
  dc.class_label = "DontCare";
  dc.dont_care = true;
  gts["0"] = {car(easy), car(hard, 30, 2, 0.4), car(van, 60, 0, 0, "Van"), dc};
  const std::vector<Detection> dets{det(easy, 0.9, "0"), det(hard, 0.8, "0"), det(van, 0.7, "0")};
  const auto at_easy = average_precision(dets, gts, Difficulty::Easy);
  CHECK(at_easy.num_valid_gt == 1);
  CHECK(at_easy.ignored_detections == 2);
  CHECK(at_easy.false_positives == 0);
  CHECK(at_easy.ap == 100.0);
  const auto at_hard = average_precision(dets, gts, Difficulty::Hard);
  CHECK(at_hard.num_valid_gt == 2);
  CHECK(at_hard.true_positives == 2);
  CHECK(at_hard.ignored_detections == 1);
}

TEST_CASE("evaluation errors") {
  Fixture fx;
  FrameGroundTruth none{{"0", {}}};
  CHECK_THROWS_AS(average_precision({}, none, Difficulty::Hard), Error);
  try {
    average_precision({}, none, Difficulty::Hard);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedMetric);
  }
  const std::vector<Detection> stray{det(fx.cars[0], 0.5, "42")};
  CHECK_THROWS_AS(average_precision(stray, fx.gts, Difficulty::Easy), Error);
}

TEST_CASE("AP properties on random detections") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    FrameGroundTruth gts;
    std::vector<Detection> dets;
    for (int f = 0; f < 4; ++f) {
      const std::string id = std::to_string(f);
      for (int c = 0; c < 3; ++c) {
        const auto box = make_box({10.0 + 12 * c, uniform_real(rng, -10, 10), -0.9}, {3.9, 1.6, 1.56},
                                  uniform_real(rng, -3, 3));
        gts[id].push_back(car(box, uniform_real(rng, 20, 80), static_cast<int>(uniform_index(rng, 3)),
                              uniform_real(rng, 0, 0.5)));
        if (uniform_real(rng, 0, 1) < 0.7)
          dets.push_back(det(shifted(box, uniform_real(rng, -0.3, 0.3)), uniform_real(rng, 0, 1), id));
        if (uniform_real(rng, 0, 1) < 0.3)
          dets.push_back(det(oracle::random_box(rng, 30, 1, 4), uniform_real(rng, 0, 1), id));
      }
    }
    for (auto level : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard}) {
      try {
        const auto r = average_precision(dets, gts, level);
        CHECK(r.ap >= 0.0);
        CHECK(r.ap <= 100.0);
        CHECK(r.true_positives <= r.num_valid_gt);
        for (std::size_t i = 1; i < r.curve.size(); ++i) CHECK(r.curve[i].recall >= r.curve[i - 1].recall);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedMetric);
      }
    }
    // a new top-scoring true positive (for a car nothing detects yet) never lowers AP
    for (const auto& [id, frame] : gts) {
      for (const auto& gt : frame) {
        if (assign_difficulty(gt, DifficultyRules{}) != Difficulty::Easy) continue;
        const bool detected = std::any_of(dets.begin(), dets.end(), [&](const Detection& d) {
          return d.frame_id == id && iou_3d(d.box, *gt.box) >= 0.7;
        });
        if (detected) continue;
        auto more = dets;
        more.push_back(det(*gt.box, 2.0, id));
        try {
          CHECK(average_precision(more, gts, Difficulty::Hard).ap >=
                average_precision(dets, gts, Difficulty::Hard).ap - 1e-12);
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::UndefinedMetric);
        }
        break;
      }
    }
    // reordering the input does not change the result
    auto shuffled = dets;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(average_precision(shuffled, gts, Difficulty::Hard).ap ==
          average_precision(dets, gts, Difficulty::Hard).ap);
  }
}

TEST_CASE("detection files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "dapc_det_test";
  std::filesystem::create_directories(dir);
  Rng rng(3);
  std::vector<Detection> dets;
  for (int i = 0; i < 10; ++i) dets.push_back({oracle::random_box(rng, 20), uniform_real(rng, 0, 1), "000007"});
  write_detections(dir / "000007.txt", dets);
  const auto back = read_detections(dir / "000007.txt");
  REQUIRE(back.size() == dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CHECK(back[i].frame_id == "000007");
    CHECK(back[i].score == dets[i].score);
    CHECK(back[i].box.center == dets[i].box.center);
    CHECK(back[i].box.yaw == dets[i].box.yaw);
  }
  {
    std::ofstream bad(dir / "bad.txt");
    bad << "0.5 1 2 3 4 5\n";
  }
  CHECK_THROWS_AS(read_detections(dir / "bad.txt"), Error);
  CHECK_THROWS_AS(read_detections(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}
