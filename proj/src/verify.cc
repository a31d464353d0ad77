#include "cgame/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cgame/error.h"

namespace cgame {

TimeToGoReport verify_time_to_go_identity(const ValueField& finite,
                                          const ValueField& stationary) {
  if (finite.stationary || !stationary.stationary) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected a finite-horizon field and a stationary field");
  }
  const OrthantGrid& grid = finite.grid;
  if (grid.dim() != stationary.grid.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "fields have different dimensions");
  }
  TimeToGoReport rep;
  rep.worst_point = Eigen::VectorXd::Zero(grid.dim());
  for (int k = 0; k < finite.slices(); ++k) {
    const double t = finite.times[k];
    for (std::size_t node = 0; node < grid.size(); ++node) {
      if (finite.clamped[node]) continue;
      const Eigen::VectorXd x = grid.point(node);
      bool clamped = false;
      const double w = stationary.value_at(0, x, &clamped);
      if (clamped) continue;
      const double expected = std::min(w, 1.0 - t);
      const double diff = std::abs(finite.values[k][node] - (node == 0 ? 0.0 : expected));
      ++rep.checked;
      if (diff > rep.max_discrepancy) {
        rep.max_discrepancy = diff;
        rep.worst_slice = k;
        rep.worst_time = t;
        rep.worst_point = x;
      }
    }
  }
  return rep;
}

namespace {

bool usable(const ValueField& v, std::size_t node) {
  return !v.clamped[node] && v.values[0][node] < v.v_max - 1e-9;
}

}  // namespace

StationaryConditionReport verify_stationary_conditions(
    const ValueField& stationary, const ConstraintGeometry& g,
    const CostFamily& f, double tol_factor, double smooth_factor) {
  if (!stationary.stationary) {
    throw Error(ErrorCode::kInvalidArgument, "expected a stationary field");
  }
  const OrthantGrid& grid = stationary.grid;
  const int d = grid.dim();
  if (g.dim() != d || f.dim() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "geometry/costs/field dimension");
  }
  const double h = grid.spacing();
  const int n = grid.nodes_per_axis();
  const std::vector<double>& v = stationary.values[0];

  StationaryConditionReport rep;
  rep.tol = tol_factor * h;
  rep.min_b_scan = std::numeric_limits<double>::infinity();

  for (std::size_t node = 1; node < grid.size(); ++node) {
    if (!usable(stationary, node)) continue;
    Eigen::VectorXd p(d);
    std::vector<int> faces;
    bool ok = true;
    bool smooth = true;
    for (int i = 0; i < d && ok; ++i) {
      const int idx = grid.coordinate_index(node, i);
      const std::size_t s = grid.stride(i);
      if (idx == n - 1) {
        ok = false;
        break;
      }
      const std::size_t up = node + s;
      if (!usable(stationary, up)) {
        ok = false;
        break;
      }
      const double fwd = (v[up] - v[node]) / h;
      if (idx == 0) {
        faces.push_back(i);
        p(i) = fwd;
        continue;
      }
      const std::size_t down = node - s;
      if (down != 0 && !usable(stationary, down)) {
        ok = false;
        break;
      }
      const double bwd = (v[node] - v[down]) / h;
      if (std::abs(fwd - bwd) > smooth_factor * h) smooth = false;
      p(i) = 0.5 * (fwd + bwd);
    }
    if (!ok) continue;
    if (!smooth) {
      ++rep.kink_nodes;
      continue;
    }

    if (faces.empty()) {
      ++rep.smooth_nodes;
      const double res = std::abs(hamiltonian(f, p).value);
      rep.worst_interior_residual = std::max(rep.worst_interior_residual, res);
      if (res <= rep.tol) ++rep.interior_within_tol;
      for (int q = 0; q <= 10; ++q) {
        const double b = 0.1 * q;
        const double val = hamiltonian(f, b * p).value - (1.0 - b);
        rep.min_b_scan = std::min(rep.min_b_scan, val);
        if (val < -rep.tol) ++rep.b_scan_violations;
      }
      continue;
    }

    ++rep.boundary_nodes;
    double min_face = std::numeric_limits<double>::infinity();
    for (int i : faces) min_face = std::min(min_face, p.dot(g.gamma().col(i)));
    const double sub = std::min(hamiltonian(f, p).value, min_face);
    rep.worst_boundary_residual = std::max(rep.worst_boundary_residual, sub);
    if (sub > rep.tol) ++rep.boundary_violations_sub;
    bool super_ok = true;
    for (int q = 0; q <= 10; ++q) {
      const double b = 0.1 * q;
      const Eigen::VectorXd bp = b * p;
      double max_face = -std::numeric_limits<double>::infinity();
      for (int i : faces) max_face = std::max(max_face, bp.dot(g.gamma().col(i)));
      const double val = std::max(hamiltonian(f, bp).value - (1.0 - b), max_face);
      rep.worst_boundary_residual = std::max(rep.worst_boundary_residual, -val);
      if (val < -rep.tol) super_ok = false;
    }
    if (!super_ok) ++rep.boundary_violations_super;
  }
  if (rep.smooth_nodes == 0) rep.min_b_scan = 0.0;
  rep.interior_fraction =
      rep.smooth_nodes ? static_cast<double>(rep.interior_within_tol) / rep.smooth_nodes : 0.0;
  return rep;
}

double estimate_slope_1d(const ValueField& v, int slice, double lo, double hi) {
  if (v.grid.dim() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "estimate_slope_1d needs d = 1");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t node = 0; node < v.grid.size(); ++node) {
    const double x = v.grid.point(node)(0);
    if (x < lo - 1e-12 || x > hi + 1e-12) continue;
    const double y = v.values.at(slice)[node];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "slope window holds < 2 nodes");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace cgame
