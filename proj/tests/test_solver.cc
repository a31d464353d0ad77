#include <random>

#include <gtest/gtest.h>

#include "cgame/error.h"
#include "cgame/presets.h"
#include "cgame/solver.h"
#include "oracles.h"

namespace cgame {
namespace {

using Eigen::Vector2d;
using Eigen::VectorXd;

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

NetworkSpec single_fixed() {
  NetworkSpec s;
  s.arrival = 0.5;
  s.service = {1.0};
  return s;
}

NetworkSpec single_robust() {
  NetworkSpec s;
  s.mode = CostMode::kRobust;
  s.arrival_box = {0.4, 0.6};
  s.service_boxes = {{0.9, 1.1}};
  return s;
}

NetworkSpec tandem_robust() {
  NetworkSpec s;
  s.topology = Topology::kTandem;
  s.stations = 2;
  s.mode = CostMode::kRobust;
  s.arrival_box = {0.4, 0.6};
  s.service_boxes = {{0.9, 1.1}, {1.3, 1.7}};
  return s;
}

// Two branches with different drifts on a non-tandem geometry.
CostFamily two_branch_family() {
  return CostFamily(2, {CostBranch::velocity_set("a", {Vector2d(-1.0, 0.3), Vector2d(-0.6, -0.4)}),
                        CostBranch::velocity_set("b", {Vector2d(0.2, -0.9), Vector2d(-0.3, -0.5)})});
}

ConstraintGeometry skew_geometry() {
  Eigen::Matrix2d m;
  m << 1.0, 0.3, -0.5, 1.0;
  return ConstraintGeometry(m);
}

TEST(Mintime, SingleQueueDrainTime) {
  const auto p = build(single_fixed());
  const OrthantGrid grid(1, 3.0, 201);
  const auto v = solve_mintime(p.geometry, p.family, grid);
  EXPECT_TRUE(v.stats.converged);
  EXPECT_EQ(v.values[0][0], 0.0);
  EXPECT_NEAR(v.value_at(0, scalar(1.0)), oracle::drain_time(1.0, 0.5, 1.0), 0.02);
  EXPECT_NEAR(radial_extend(v, scalar(5.0)), 10.0, 0.1);
  EXPECT_EQ(v.stats.capped_nodes, 0u);
}

TEST(Mintime, RobustSingleQueueWorstRates) {
  const auto p = build(single_robust());
  const OrthantGrid grid(1, 3.0, 201);
  const auto v = solve_mintime(p.geometry, p.family, grid);
  EXPECT_TRUE(v.stats.converged);
  // The worst drift is 0.6 - 0.9.
  EXPECT_NEAR(v.value_at(0, scalar(1.0)), oracle::drain_time(1.0, 0.6, 0.9), 0.04);
}

TEST(Mintime, TandemDrainTime) {
  NetworkSpec s;
  s.topology = Topology::kTandem;
  s.stations = 2;
  s.arrival = 0.5;
  s.service = {1.0, 1.5};
  const auto p = build(s);
  const OrthantGrid grid(2, 3.0, 61);
  const auto v = solve_mintime(p.geometry, p.family, grid);
  ASSERT_TRUE(v.stats.converged);
  // From (1, 1) both queues drain at rate 1/2 and empty together at t = 2.
  EXPECT_NEAR(v.value_at(0, Vector2d(1, 1)), 2.0, 0.05);
  // Queue 2 alone drains at rate 1.
  EXPECT_NEAR(v.value_at(0, Vector2d(0, 1)), 1.0, 0.05);
}

TEST(Mintime, RadialExtension) {
  const auto p = build(single_fixed());
  const OrthantGrid grid(1, 3.0, 201);
  const auto v = solve_mintime(p.geometry, p.family, grid);
  const double h = grid.spacing();
  for (std::size_t node = 1; node < grid.size(); ++node) {
    const VectorXd x = grid.point(node);
    if (x(0) > 0.75 + 1e-12) break;
    EXPECT_NEAR(radial_extend(v, 2 * x), 2 * radial_extend(v, x), 2 * h);
    EXPECT_EQ(radial_extend(v, x), v.values[0][node]);
  }
}

TEST(Mintime, SweepOrderAndJacobiAgree) {
  const auto p = build(tandem_robust());
  const OrthantGrid grid(2, 3.0, 31);
  MintimeOptions fwd, bwd, jac;
  bwd.sweep = SweepMode::kGaussSeidelBackwardFirst;
  jac.sweep = SweepMode::kJacobi;
  jac.threads = 3;
  const auto a = solve_mintime(p.geometry, p.family, grid, fwd);
  const auto b = solve_mintime(p.geometry, p.family, grid, bwd);
  const auto c = solve_mintime(p.geometry, p.family, grid, jac);
  ASSERT_TRUE(a.stats.converged && b.stats.converged && c.stats.converged);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    EXPECT_NEAR(a.values[0][n], b.values[0][n], fwd.tol);
    EXPECT_NEAR(a.values[0][n], c.values[0][n], 10 * fwd.tol);
  }
}

TEST(Mintime, RejectsRiskFamilies) {
  NetworkSpec s = single_fixed();
  s.mode = CostMode::kRisk;
  s.c = 0.05;
  const auto p = build(s);
  try {
    solve_mintime(p.geometry, p.family, OrthantGrid(1, 3.0, 11));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotCondition41);
  }
}

TEST(Mintime, ReportsNonConvergence) {
  const auto p = build(single_fixed());
  MintimeOptions o;
  o.max_sweeps = 1;
  o.dt = 0.001;
  const auto v = solve_mintime(p.geometry, p.family, OrthantGrid(1, 3.0, 101), o);
  EXPECT_FALSE(v.stats.converged);
}

TEST(Finite, TimeToGoSingleQueue) {
  const auto p = build(single_fixed());
  const OrthantGrid grid(1, 3.0, 201);
  const auto v = solve_finite(p.geometry, p.family, grid, 400, time_to_go_problem());
  EXPECT_NEAR(v.value_at(0, scalar(0.3)), 0.6, 0.02);
  EXPECT_EQ(v.slices(), 401);
  for (int k = 0; k <= 400; ++k) {
    EXPECT_EQ(v.values[k][0], 0.0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      EXPECT_LE(v.values[k][n], 1.0 - v.times[k] + 1e-12);
    }
  }
  for (std::size_t n = 1; n < grid.size(); ++n) EXPECT_EQ(v.values[400][n], 0.0);
}

TEST(Finite, RejectsIncompatibleData) {
  const auto p = build(single_fixed());
  FiniteProblem bad{[](double t, const VectorXd&) { return 1.0 - t; },
                    [](const VectorXd&) { return 0.5; }};
  try {
    solve_finite(p.geometry, p.family, OrthantGrid(1, 3.0, 11), 10, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleData);
  }
}

TEST(Finite, RejectsUnverifiedGeometry) {
  Eigen::Matrix2d m;
  m << 1, -2, -2, 1;
  const ConstraintGeometry g(m);
  try {
    solve_finite(g, two_branch_family(), OrthantGrid(2, 1.0, 5), 4, time_to_go_problem());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeometryUnverified);
  }
}

TEST(Finite, OptimalStoppingMatchesEnumeration) {
  // One branch, one velocity: the game reduces to choosing a stop time.
  const double speed = 0.5, c = 1.0;
  const auto g = ConstraintGeometry::tandem(1);
  const CostFamily f(1, {CostBranch::velocity_set("drain", {scalar(-speed)}, c)});
  auto gfun = [](double t, double x) { return 0.4 * (1.0 - t) + 0.6 * x; };
  auto ffun = [](double x) { return 0.6 * x; };
  FiniteProblem prob{[&](double t, const VectorXd& x) { return gfun(t, x(0)); },
                     [&](const VectorXd& x) { return ffun(x(0)); }};
  const int n = 51, N = 50;
  const OrthantGrid grid(1, 1.0, n);
  const auto v = solve_finite(g, f, grid, N, prob);
  const double h = grid.spacing(), dt = 1.0 / N;
  // Lipschitz bound of the value in (t, x): stopping data slopes plus the
  // drain-time slope c / speed.
  const double lip = 0.4 + 0.6 + c / speed + c;
  double worst = 0.0;
  for (int k = 0; k <= N; k += 5) {
    for (std::size_t node = 0; node < grid.size(); ++node) {
      const double x = grid.point(node)(0);
      const double ref = oracle::stopping_value_1d(x, k, N, speed, c, gfun, ffun);
      worst = std::max(worst, std::abs(v.values[k][node] - ref));
    }
  }
  EXPECT_LE(worst, 2 * (h + dt) * lip);
}

TEST(Finite, DiscreteComparison) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = build(tandem_robust());
  const OrthantGrid grid(2, 2.0, 17);
  for (int pair = 0; pair < 10; ++pair) {
    const double a0 = u(rng), a1 = u(rng), a2 = u(rng), s0 = u(rng), s1 = u(rng);
    const double d0 = u(rng), d1 = u(rng), e0 = u(rng);
    // g = f(x) + (1 - t) s(x), ordered through f1 <= f2 and s1 <= s2.
    auto f1 = [=](const VectorXd& x) { return a0 + a1 * x(0) + a2 * x(1) * x(1); };
    auto f2 = [=](const VectorXd& x) { return f1(x) + d0 + d1 * x(0) * x(1); };
    auto sc1 = [=](const VectorXd& x) { return s0 + s1 * x(1); };
    auto sc2 = [=](const VectorXd& x) { return sc1(x) + e0 * x(0); };
    FiniteProblem p1{[=](double t, const VectorXd& x) { return f1(x) + (1 - t) * sc1(x); }, f1};
    FiniteProblem p2{[=](double t, const VectorXd& x) { return f2(x) + (1 - t) * sc2(x); }, f2};
    const auto v1 = solve_finite(p.geometry, p.family, grid, 16, p1);
    const auto v2 = solve_finite(p.geometry, p.family, grid, 16, p2);
    for (int k = 0; k < v1.slices(); ++k) {
      for (std::size_t n = 0; n < grid.size(); ++n) {
        EXPECT_LE(v1.values[k][n], v2.values[k][n] + 1e-9);
      }
    }
  }
}

TEST(Finite, MeshRefinementReducesDrainTimeError) {
  const auto p = build(single_fixed());
  std::vector<double> point_err, mean_err;
  for (int level = 0; level < 3; ++level) {
    const int n = 51 * (1 << level) - ((1 << level) - 1);  // 51, 101, 201
    const int N = 100 << level;
    const OrthantGrid grid(1, 3.0, n);
    const auto v = solve_finite(p.geometry, p.family, grid, N, time_to_go_problem());
    point_err.push_back(std::abs(v.value_at(0, scalar(0.3)) - 0.6));
    double sum = 0.0;
    for (std::size_t node = 0; node < grid.size(); ++node) {
      const double x = grid.point(node)(0);
      sum += std::abs(v.values[0][node] - std::min(2.0 * x, 1.0));
    }
    mean_err.push_back(sum / grid.size());
  }
  for (int level = 0; level < 2; ++level) {
    EXPECT_GE(point_err[level] / point_err[level + 1], 1.5);
    EXPECT_GE(mean_err[level] / mean_err[level + 1], 1.5);
  }
}

TEST(Finite, ThreadCountDoesNotChangeValues) {
  const auto g = skew_geometry();
  const auto f = two_branch_family();
  const OrthantGrid grid(2, 2.0, 41);
  SolverOptions one, many;
  many.threads = 4;
  const auto a = solve_finite(g, f, grid, 30, time_to_go_problem(), one);
  const auto b = solve_finite(g, f, grid, 30, time_to_go_problem(), many);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.branch, b.branch);
  EXPECT_EQ(a.stop, b.stop);
}

TEST(Finite, BranchTieBreakIsLowestIndex) {
  // Two identical branches: every recorded argmin must be branch 0.
  const auto g = ConstraintGeometry::tandem(1);
  const CostFamily f(1, {CostBranch::velocity_set("a", {scalar(-0.5)}),
                         CostBranch::velocity_set("b", {scalar(-0.5)})});
  const auto v = solve_finite(g, f, OrthantGrid(1, 2.0, 21), 20, time_to_go_problem());
  for (const auto& slice : v.branch) {
    for (int b : slice) EXPECT_EQ(b, 0);
  }
}

TEST(Finite, ClampTelemetry) {
  // Arrivals outpace service: targets leave the box at the top.
  const auto g = ConstraintGeometry::tandem(1);
  const CostFamily f(1, {CostBranch::velocity_set("grow", {scalar(0.5)})});
  const auto v = solve_finite(g, f, OrthantGrid(1, 1.0, 21), 20, time_to_go_problem());
  EXPECT_GT(v.stats.clamped_targets, 0u);
  EXPECT_GT(v.stats.clamp_fraction, 0.0);
  EXPECT_TRUE(v.clamped.back());
  EXPECT_FALSE(v.clamped.front());
}

TEST(Grid, BudgetAndLocate) {
  EXPECT_THROW(OrthantGrid(4, 1.0, 40, 1000), Error);
  EXPECT_THROW(OrthantGrid(1, 1.0, 2), Error);
  const OrthantGrid grid(2, 2.0, 5);
  EXPECT_EQ(grid.size(), 25u);
  std::vector<double> vals(25);
  for (std::size_t n = 0; n < 25; ++n) vals[n] = grid.point(n).sum();
  // Multilinear interpolation reproduces affine data.
  EXPECT_NEAR(grid.interpolate(vals, Vector2d(0.3, 1.7)), 2.0, 1e-14);
  bool clamped = false;
  EXPECT_NEAR(grid.interpolate(vals, Vector2d(3.0, 1.0), &clamped), 3.0, 1e-14);
  EXPECT_TRUE(clamped);
}

}  // namespace
}  // namespace cgame
