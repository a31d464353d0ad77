#include "cgame/presets.h"

#include <algorithm>
#include <string>

#include "cgame/error.h"

namespace cgame {
namespace {

// Velocity contribution of serving queue q (0-based) in a line network:
// one customer leaves q and joins q + 1, or leaves the system after the last.
Eigen::VectorXd service_column(int q, int d) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(d);
  col(q) = -1.0;
  if (q + 1 < d) col(q + 1) = 1.0;
  return col;
}

Eigen::VectorXd arrival_column(int d) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(d);
  col(0) = 1.0;
  return col;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, what);
}

// Branch over the given served queues (0-based): rate columns are the arrival
// followed by one service column per served queue.
CostBranch make_branch(const NetworkSpec& spec, const std::string& label,
                       const std::vector<int>& served) {
  const int d = spec.dim();
  const int r = 1 + static_cast<int>(served.size());
  Eigen::MatrixXd map(d, r);
  map.col(0) = arrival_column(d);
  for (int q = 0; q < static_cast<int>(served.size()); ++q) {
    map.col(q + 1) = service_column(served[q], d);
  }
  switch (spec.mode) {
    case CostMode::kFixed: {
      Eigen::VectorXd rates(r);
      rates(0) = spec.arrival;
      for (int q = 0; q < static_cast<int>(served.size()); ++q) {
        rates(q + 1) = spec.service[served[q]];
      }
      return CostBranch::velocity_set(label, {map * rates}, spec.c);
    }
    case CostMode::kRobust: {
      Eigen::VectorXd lo(r), hi(r);
      lo(0) = spec.arrival_box.lo;
      hi(0) = spec.arrival_box.hi;
      for (int q = 0; q < static_cast<int>(served.size()); ++q) {
        lo(q + 1) = spec.service_boxes[served[q]].lo;
        hi(q + 1) = spec.service_boxes[served[q]].hi;
      }
      return CostBranch::rate_box(label, map, lo, hi, spec.c);
    }
    case CostMode::kRisk: {
      Eigen::VectorXd nominal(r);
      nominal(0) = spec.arrival;
      for (int q = 0; q < static_cast<int>(served.size()); ++q) {
        nominal(q + 1) = spec.service[served[q]];
      }
      return CostBranch::risk_sensitive(label, map, nominal, spec.c);
    }
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown cost mode");
}

void validate(const NetworkSpec& spec) {
  const int d = spec.dim();
  require(d >= 1, "network needs at least one station");
  require(spec.c > 0.0, "cost scale c must be positive");
  if (spec.mode == CostMode::kRobust) {
    require(static_cast<int>(spec.service_boxes.size()) == d,
            "robust mode needs one service box per queue");
    auto check_box = [](const RateBox& b) {
      require(b.lo > 0.0 && b.lo <= b.hi, "rate boxes need 0 < lower <= upper");
    };
    check_box(spec.arrival_box);
    for (const RateBox& b : spec.service_boxes) check_box(b);
  } else {
    require(static_cast<int>(spec.service.size()) == d,
            "network needs one service rate per queue");
    require(spec.arrival > 0.0, "arrival rate must be positive");
    for (double mu : spec.service) require(mu > 0.0, "service rates must be positive");
  }
}

}  // namespace

const char* to_string(Topology t) {
  switch (t) {
    case Topology::kSingle: return "single";
    case Topology::kTandem: return "tandem";
    case Topology::kLuKumar: return "lu_kumar";
  }
  return "unknown";
}

const char* to_string(CostMode m) {
  switch (m) {
    case CostMode::kFixed: return "fixed";
    case CostMode::kRobust: return "robust";
    case CostMode::kRisk: return "risk";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kNotVerified: return "not verified";
  }
  return "unknown";
}

int NetworkSpec::dim() const {
  switch (topology) {
    case Topology::kSingle: return 1;
    case Topology::kTandem: return stations;
    case Topology::kLuKumar: return 4;
  }
  return 0;
}

const std::vector<std::pair<int, int>>& lu_kumar_assignments() {
  static const std::vector<std::pair<int, int>> kAssignments = {
      {1, 2}, {1, 3}, {4, 2}, {4, 3}};
  return kAssignments;
}

Preset build(const NetworkSpec& spec) {
  validate(spec);
  const int d = spec.dim();
  // Every topology here routes queue i into queue i + 1, so the reflection
  // directions are those of a tandem line.
  ConstraintGeometry geometry = ConstraintGeometry::tandem(d);
  std::vector<CostBranch> branches;
  if (spec.topology == Topology::kLuKumar) {
    for (const auto& [a, b] : lu_kumar_assignments()) {
      std::vector<int> served = {a - 1, b - 1};
      std::sort(served.begin(), served.end());
      branches.push_back(make_branch(
          spec, "(" + std::to_string(a) + "," + std::to_string(b) + ")", served));
    }
  } else {
    std::vector<int> served(d);
    for (int q = 0; q < d; ++q) served[q] = q;
    branches.push_back(make_branch(spec, "all", served));
  }
  return Preset{std::move(geometry), CostFamily(d, std::move(branches))};
}

GeometryReport verify_geometry(const ConstraintGeometry& g) {
  GeometryReport rep;
  rep.independent = check_linear_independence(g) ? Verdict::kPass : Verdict::kFail;
  rep.completely_s = check_completely_s(g) ? Verdict::kPass : Verdict::kFail;
  rep.contraction_bound = contraction_radius_bound(g);
  rep.contraction_proxy =
      rep.contraction_bound < 1.0 ? Verdict::kPass : Verdict::kNotVerified;
  return rep;
}

GeometryReport verify_preset_geometry(const NetworkSpec& spec) {
  return verify_geometry(build(spec).geometry);
}

}  // namespace cgame
