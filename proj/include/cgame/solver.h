#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cgame/costs.h"
#include "cgame/geometry.h"
#include "cgame/grid.h"

namespace cgame {

using StoppingCost = std::function<double(double t, const Eigen::VectorXd& x)>;
using TerminalCost = std::function<double(const Eigen::VectorXd& x)>;

/// Stopping cost g(t, x) and terminal cost f(x) of the finite-horizon game on
/// [0, 1]. Solvers require f(x) = g(1, x).
struct FiniteProblem {
  StoppingCost stopping;
  TerminalCost terminal;
};

/// g(t, x) = scale * (1 - t), f = 0: the data that ties the finite-horizon
/// value to the minimum-time value.
FiniteProblem time_to_go_problem(double scale = 1.0);

struct SolveStats {
  bool converged = true;
  int iterations = 0;         // slices (finite) or sweeps (min-time)
  double final_change = 0.0;  // last sup-norm change (min-time)
  double dt = 0.0;
  std::size_t targets = 0;          // Euler targets evaluated per slice/sweep
  std::size_t clamped_targets = 0;  // ... of which left the box
  double clamp_fraction = 0.0;
  bool domain_escape = false;       // clamp_fraction above the warning level
  std::size_t capped_nodes = 0;     // min-time nodes stuck at the cap
};

/// Value function on an orthant grid. Finite-horizon fields hold N+1 slices
/// at t_k = k / N; stationary fields hold one slice.
struct ValueField {
  OrthantGrid grid;
  bool stationary = false;
  int branch_count = 1;
  std::vector<double> times;
  std::vector<std::vector<double>> values;    // [slice][node]
  std::vector<std::vector<int>> branch;       // [slice][node] minimizer argmin
  std::vector<std::vector<std::uint8_t>> stop;  // [slice][node]
  std::vector<std::vector<int>> response;     // [slice][node * J + j] argmax
  std::vector<std::uint8_t> clamped;          // per node: some target clamped
  double v_max = 0.0;                         // min-time cap
  SolveStats stats;

  explicit ValueField(OrthantGrid g) : grid(std::move(g)) {}

  int slices() const { return static_cast<int>(values.size()); }
  double time_step() const {
    return times.size() > 1 ? times[1] - times[0] : stats.dt;
  }
  double value_at(int slice, const Eigen::VectorXd& x, bool* clamped = nullptr) const {
    return grid.interpolate(values.at(slice), x, clamped);
  }
};

struct SolverOptions {
  int threads = 1;
  CandidateOptions candidates;
  double domain_escape_fraction = 0.05;
};

/// Backward semi-Lagrangian recursion for the obstacle problem with oblique
/// reflection:
///   V_N = f off the origin, V_k(0) = 0,
///   V_k(x) = min(g(t_k, x),
///                min_j max_beta [-dt L_j(beta) + V_{k+1}(pi(x + dt beta))]).
/// Throws kGeometryUnverified when the directions are not completely-S and
/// kIncompatibleData when f != g(1, .) on the grid.
ValueField solve_finite(const ConstraintGeometry& g, const CostFamily& f,
                        const OrthantGrid& grid, int time_steps,
                        const FiniteProblem& problem,
                        const SolverOptions& opts = {});

enum class SweepMode { kGaussSeidelForwardFirst, kGaussSeidelBackwardFirst, kJacobi };

struct MintimeOptions {
  double dt = 0.0;  // 0 selects spacing / max candidate speed
  double v_max = 100.0;
  double tol = 1e-6;
  int max_sweeps = 200000;
  SweepMode sweep = SweepMode::kGaussSeidelForwardFirst;
  int threads = 1;  // used by the Jacobi mode only
  double domain_escape_fraction = 0.05;
};

/// Value iteration for the minimum-time game:
///   W(x) = min(v_max, min_j max_beta [c dt + W(pi(x + dt beta))]), W(0) = 0,
/// started from W = v_max. Non-convergence is reported through
/// stats.converged. Throws kNotCondition41 for risk-sensitive families.
ValueField solve_mintime(const ConstraintGeometry& g, const CostFamily& f,
                         const OrthantGrid& grid,
                         const MintimeOptions& opts = {});

/// Evaluates a stationary field anywhere in the orthant using radial
/// linearity: points outside the half-box [0, x_max / 2]^d are scaled into it.
double radial_extend(const ValueField& v, const Eigen::VectorXd& x);

/// Default min-time step: grid spacing over the largest candidate speed.
double default_mintime_step(const CostFamily& f, const OrthantGrid& grid);

}  // namespace cgame
