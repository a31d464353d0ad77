#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cgame/costs.h"
#include "cgame/geometry.h"
#include "cgame/grid.h"
#include "cgame/presets.h"
#include "cgame/solver.h"

namespace cgame {

struct GridConfig {
  double x_max = 3.0;
  int nodes_per_axis = 201;
  std::size_t budget = kDefaultNodeBudget;
};

/// Everything one CLI run needs. Either `network` or both `geometry` and
/// `cost` must be present; an explicit geometry/cost overrides the preset's.
struct RunConfig {
  std::optional<NetworkSpec> network;
  std::optional<ConstraintGeometry> geometry;
  std::optional<CostFamily> cost;
  GridConfig grid;
  int horizon_steps = 400;
  double stopping_scale = 1.0;
  MintimeOptions mintime;
  CandidateOptions candidates;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  nlohmann::json source;  // the parsed document, echoed into manifests
};

/// Throws Error(kParse) on malformed documents and kInvalidGeometry /
/// kInvalidSpec on semantically invalid sections.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json geometry_to_json(const ConstraintGeometry& g);
ConstraintGeometry geometry_from_json(const nlohmann::json& j);

nlohmann::json cost_to_json(const CostFamily& f);
CostFamily cost_from_json(const nlohmann::json& j, int dim);

nlohmann::json network_to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(const nlohmann::json& j);

struct ResolvedModel {
  ConstraintGeometry geometry;
  std::optional<CostFamily> family;
};

/// Geometry and costs implied by a configuration; `family` is empty only for
/// geometry-only documents.
ResolvedModel resolve_model(const RunConfig& cfg);

OrthantGrid make_grid(const RunConfig& cfg, int dim);

}  // namespace cgame
