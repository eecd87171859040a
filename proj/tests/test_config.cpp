#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dapc/config.hpp"
#include "dapc/error.hpp"

using namespace dapc;

namespace {

ErrorKind kind_of(const nlohmann::json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("defaults") {
  const PipelineConfig c;
  CHECK(c.regions.b1 == 20);
  CHECK(c.regions.b2 == 40);
  CHECK(c.regions.max_range == 70);
  CHECK(c.regions.overlap == 5);
  CHECK(c.inference_regions().overlap == 3);
  CHECK(c.total_points == 16384);
  CHECK(c.strategy == Strategy::S4);
  CHECK(allocate_budget(c.reference_stats, c.strategy_spec(), c.total_points).counts ==
        std::array<std::size_t, 3>{9216, 5120, 2048});
  CHECK(split_proposals(100, c.proposal_ratios) == std::array<std::size_t, 3>{30, 50, 20});
}

TEST_CASE("json round trip") {
  const auto j = config_to_json(PipelineConfig{});
  CHECK(j.contains("provenance"));
  CHECK(j.at("provenance").contains("strategy"));
  CHECK(config_to_json(config_from_json(j)) == j);

  nlohmann::json overlay = {{"strategy", "2"},
                            {"multi_scale", true},
                            {"regions", {{"overlap", 4.0}}},
                            {"eval", {{"mode", "R40"}, {"kind", "bev"}}}};
  const auto c = config_from_json(overlay);
  CHECK(c.strategy == Strategy::S2);
  CHECK(c.regions.overlap == 4.0);
  CHECK(c.regions.b1 == 20);
  CHECK(c.schedules[1].radii[0] == std::vector<double>{0.2, 0.6});
  CHECK(c.eval.mode == ApMode::R40);
  CHECK(c.eval.iou_kind == IouKind::Bev);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("invalid configurations") {
  CHECK(kind_of({{"regions", {{"boundaries", {40, 20}}}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"regions", {{"metric", "radial"}}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"proposal_ratios", {0.5, 0.5, 0.5}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"bins", {{"bin_size", 0.7}}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"focal", {{"alpha_t", 0.0}}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"eval", {{"mode", "R12"}}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"schedules", {1, 2}}}) == ErrorKind::Validation);
  CHECK(kind_of({{"total_points", "many"}}) == ErrorKind::Validation);
  CHECK_THROWS_AS(parse_strategy("5"), Error);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "dapc_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"strategy": "natural"})";
    std::ofstream(dir / "broken.json") << "{ strategy";
  }
  CHECK(load_config(dir / "ok.json").strategy == Strategy::Natural);
  try {
    load_config(dir / "broken.json");
    FAIL("expected parse failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Malformed);
  }
  try {
    load_config(dir / "absent.json");
    FAIL("expected io failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  std::filesystem::remove_all(dir);

  const DensityStats s{{1, 2, 3}, {4, 5, 6}, 7};
  const auto back = density_stats_from_json(to_json(s));
  CHECK(back.mean == s.mean);
  CHECK(back.sigma == s.sigma);
  CHECK(back.n_scenes == 7);
}
