#pragma once

#include <array>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "dapc/augmentation.hpp"
#include "dapc/eval.hpp"
#include "dapc/partition.hpp"
#include "dapc/sampling.hpp"
#include "dapc/targets.hpp"

namespace dapc {

// Every tunable constant of the pipeline in one place.
struct PipelineConfig {
  RegionSpec regions = RegionSpec::training();
  double inference_overlap = 3.0;
  std::size_t total_points = kDefaultTotalPoints;
  DensityStats reference_stats{{13800.0, 3600.0, 1000.0}, {1800.0, 1100.0, 500.0}, 3712};
  Strategy strategy = Strategy::S4;
  std::size_t granularity = 1024;
  bool multi_scale = false;
  std::array<BranchSchedule, 3> schedules = single_scale_schedules();
  ProposalRatios proposal_ratios;
  BinConfig bins;
  FocalParams focal;
  AugmentConfig augment;
  EvalOptions eval;

  RegionSpec inference_regions() const {
    RegionSpec spec = regions;
    spec.overlap = inference_overlap;
    return spec;
  }
  StrategySpec strategy_spec() const;
};

// Serialized form carries a "provenance" object describing where each
// default comes from.
nlohmann::json config_to_json(const PipelineConfig& config);
// Fields absent from `j` keep their defaults. Throws Validation on bad values.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const DensityStats& stats);
DensityStats density_stats_from_json(const nlohmann::json& j);

}  // namespace dapc
