#pragma once

#include <string>
#include <vector>

#include "cgame/costs.h"
#include "cgame/geometry.h"

namespace cgame {

enum class Topology { kSingle, kTandem, kLuKumar };
enum class CostMode { kFixed, kRobust, kRisk };

const char* to_string(Topology t);
const char* to_string(CostMode m);

/// Queueing network description. `arrival`/`service` hold the fixed rates
/// (fixed mode) or the nominal rates (risk mode); robust mode reads the boxes.
struct NetworkSpec {
  Topology topology = Topology::kSingle;
  int stations = 1;  // tandem length; forced to 1 for single and 4 for lu_kumar
  CostMode mode = CostMode::kFixed;
  double c = 1.0;
  double arrival = 0.0;
  std::vector<double> service;
  RateBox arrival_box;
  std::vector<RateBox> service_boxes;

  int dim() const;
};

struct Preset {
  ConstraintGeometry geometry;
  CostFamily family;
};

/// Throws kInvalidSpec when rates are not positive, boxes are inverted or the
/// number of service rates does not match the topology.
Preset build(const NetworkSpec& spec);

/// Served queue pairs (server A, server B), 1-based, in branch order.
const std::vector<std::pair<int, int>>& lu_kumar_assignments();

enum class Verdict { kPass, kFail, kNotVerified };
const char* to_string(Verdict v);

struct GeometryReport {
  Verdict independent = Verdict::kFail;
  Verdict completely_s = Verdict::kFail;
  // The contraction proxy is sufficient only: a miss is kNotVerified.
  Verdict contraction_proxy = Verdict::kNotVerified;
  double contraction_bound = 0.0;

  bool acceptable() const {
    return independent == Verdict::kPass && completely_s == Verdict::kPass;
  }
};

GeometryReport verify_geometry(const ConstraintGeometry& g);
GeometryReport verify_preset_geometry(const NetworkSpec& spec);

}  // namespace cgame
