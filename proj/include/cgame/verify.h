#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "cgame/costs.h"
#include "cgame/geometry.h"
#include "cgame/solver.h"

namespace cgame {

struct TimeToGoReport {
  double max_discrepancy = 0.0;
  int worst_slice = 0;
  double worst_time = 0.0;
  Eigen::VectorXd worst_point;
  std::size_t checked = 0;
};

/// Compares a finite-horizon field solved with g = 1 - t, f = 0 against
/// min(W(x), 1 - t) built from the stationary min-time field W, over every
/// slice and every node whose Euler targets stayed inside the box.
TimeToGoReport verify_time_to_go_identity(const ValueField& finite,
                                          const ValueField& stationary);

struct StationaryConditionReport {
  double tol = 0.0;  // tol_factor * h
  // Interior nodes where one-sided differences agree (smooth detector).
  std::size_t smooth_nodes = 0;
  std::size_t kink_nodes = 0;
  std::size_t interior_within_tol = 0;  // |H(p)| <= tol
  double interior_fraction = 0.0;
  double worst_interior_residual = 0.0;
  // min over scanned (node, b) of H(b p) - (1 - b).
  double min_b_scan = 0.0;
  std::size_t b_scan_violations = 0;
  // Boundary nodes (some x_i = 0, x != 0), one-sided differences.
  std::size_t boundary_nodes = 0;
  std::size_t boundary_violations_sub = 0;    // H(p) ^ min <p, gamma_i> > tol
  std::size_t boundary_violations_super = 0;  // [H(bp)-(1-b)] v max <bp, gamma_i> < -tol
  double worst_boundary_residual = 0.0;
};

/// Differential checks of the stationary optimality conditions on a min-time
/// field: H(p) ^ min_{i in I(x)} <p, gamma_i> <= 0 and, for b in
/// {0, 0.1, ..., 1}, [H(bp) - (1 - b)] v max_{i in I(x)} <bp, gamma_i> >= 0.
/// At smooth interior nodes these force H(p) = 0. Nodes at the cap, next to
/// it, or with clamped targets are skipped.
StationaryConditionReport verify_stationary_conditions(
    const ValueField& stationary, const ConstraintGeometry& g,
    const CostFamily& f, double tol_factor = 5.0, double smooth_factor = 3.0);

/// Least-squares slope of a one-dimensional slice over nodes in [lo, hi].
double estimate_slope_1d(const ValueField& v, int slice, double lo, double hi);

}  // namespace cgame
