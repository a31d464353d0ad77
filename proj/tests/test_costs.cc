#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "cgame/costs.h"
#include "cgame/error.h"
#include "cgame/presets.h"
#include "oracles.h"

namespace cgame {
namespace {

using Eigen::Vector4d;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

NetworkSpec lu_kumar_fixed() {
  NetworkSpec s;
  s.topology = Topology::kLuKumar;
  s.mode = CostMode::kFixed;
  s.arrival = 1.0;
  s.service = {2, 2, 2, 2};
  return s;
}

NetworkSpec single(CostMode mode) {
  NetworkSpec s;
  s.topology = Topology::kSingle;
  s.mode = mode;
  s.arrival = 0.5;
  s.service = {1.0};
  s.arrival_box = {0.4, 0.6};
  s.service_boxes = {{0.9, 1.1}};
  s.c = mode == CostMode::kRisk ? 0.05 : 1.0;
  return s;
}

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

TEST(Entropy, Values) {
  EXPECT_EQ(entropy_penalty(0.0), 1.0);
  EXPECT_EQ(entropy_penalty(1.0), 0.0);
  EXPECT_EQ(entropy_penalty(-0.1), kInf);
  EXPECT_NEAR(entropy_penalty(2.0), 2 * std::log(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(entropy_dual(0.3), std::exp(0.3) - 1.0, 1e-15);
}

TEST(Hamiltonian, LuKumarBranchValues) {
  const auto f = build(lu_kumar_fixed()).family;
  const Vector4d alpha(1, 0, 0, 0);
  const double expected[] = {0, 0, 2, 2};
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(hamiltonian_branch(f.branch(j), alpha), expected[j]);
  const auto h = hamiltonian(f, alpha);
  EXPECT_EQ(h.value, 0.0);
  EXPECT_EQ(h.branch, 0);
  EXPECT_EQ(f.branch(h.branch).label, "(1,2)");
}

TEST(Hamiltonian, ValueAtZeroIsC) {
  for (const auto& spec : {lu_kumar_fixed(), single(CostMode::kFixed), single(CostMode::kRobust)}) {
    const auto f = build(spec).family;
    EXPECT_TRUE(f.satisfies_condition_4_1());
    EXPECT_EQ(hamiltonian(f, VectorXd::Zero(f.dim())).value, 1.0);
  }
  const auto risk = build(single(CostMode::kRisk)).family;
  EXPECT_FALSE(risk.satisfies_condition_4_1());
  EXPECT_DOUBLE_EQ(hamiltonian(risk, scalar(0.0)).value, 0.05);
}

TEST(Hamiltonian, DimensionMismatch) {
  const auto f = build(lu_kumar_fixed()).family;
  EXPECT_THROW(hamiltonian(f, scalar(1.0)), Error);
  EXPECT_THROW(running_cost(f.branch(0), scalar(1.0)), Error);
}

TEST(RunningCost, LuKumarBranch) {
  const auto f = build(lu_kumar_fixed()).family;
  EXPECT_EQ(running_cost(f.branch(0), Vector4d(-1, 0, 2, 0)), -1.0);
  EXPECT_EQ(running_cost(f.branch(0), Vector4d::Zero()), kInf);
}

TEST(RunningCost, RiskNominalAndOffNominal) {
  const auto f = build(single(CostMode::kRisk)).family;
  EXPECT_NEAR(running_cost(f.branch(0), scalar(-0.5)), -0.05, 1e-12);
  // Oracle: minimize 0.5 l(a / 0.5) + l(m) over a - m = beta by a fine scan.
  for (double beta : {-0.9, -0.3, 0.0, 0.4}) {
    double best = kInf;
    for (int k = 0; k <= 400000; ++k) {
      const double a = 1e-6 + 4.0 * k / 400000.0;
      const double m = a - beta;
      if (m < 0) continue;
      best = std::min(best, 0.5 * entropy_penalty(a / 0.5) + entropy_penalty(m));
    }
    EXPECT_NEAR(running_cost(f.branch(0), scalar(beta)), -0.05 + best, 1e-6) << beta;
  }
}

TEST(RunningCost, RobustSingleQueueInterval) {
  const auto f = build(single(CostMode::kRobust)).family;
  EXPECT_EQ(running_cost(f.branch(0), scalar(-0.3)), -1.0);
  EXPECT_EQ(running_cost(f.branch(0), scalar(-0.7)), -1.0);
  EXPECT_EQ(running_cost(f.branch(0), scalar(-0.5)), -1.0);
  EXPECT_EQ(running_cost(f.branch(0), scalar(-0.2)), kInf);
  EXPECT_EQ(running_cost(f.branch(0), scalar(-0.8)), kInf);
}

TEST(RunningCost, VelocitySetHull) {
  const auto b = CostBranch::velocity_set(
      "hull", {Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, -1), Eigen::Vector2d(1, 1)}, 2.0);
  EXPECT_EQ(running_cost(b, Eigen::Vector2d(0, 0)), -2.0);
  EXPECT_EQ(running_cost(b, Eigen::Vector2d(-0.5, -0.5)), -2.0);
  EXPECT_EQ(running_cost(b, Eigen::Vector2d(1, -1)), kInf);
}

TEST(RobustHamiltonian, ClosedFormAtZero) {
  const std::array<RateBox, 4> s{{{1, 2}, {1, 2}, {1, 2}, {1, 2}}};
  EXPECT_EQ(lu_kumar_robust_hamiltonian(Vector4d::Zero(), {0.5, 1}, s, 1.0), 1.0);
}

TEST(RobustHamiltonian, DegenerateBoxesMatchFixedFamily) {
  const auto fixed = build(lu_kumar_fixed()).family;
  const std::array<RateBox, 4> s{{{2, 2}, {2, 2}, {2, 2}, {2, 2}}};
  std::mt19937_64 rng(77);
  for (int k = 0; k < 100; ++k) {
    const VectorXd a = oracle::random_vector(rng, 4, -3, 3);
    EXPECT_NEAR(lu_kumar_robust_hamiltonian(a, {1, 1}, s, 1.0), hamiltonian(fixed, a).value, 1e-12);
  }
}

TEST(RobustHamiltonian, GenericBoxesMatchVertexFamily) {
  NetworkSpec spec;
  spec.topology = Topology::kLuKumar;
  spec.mode = CostMode::kRobust;
  spec.arrival_box = {0.8, 1.2};
  spec.service_boxes = {{1.5, 2.5}, {1.0, 3.0}, {2.0, 2.2}, {1.7, 2.9}};
  const auto f = build(spec).family;
  const std::array<RateBox, 4> s{{{1.5, 2.5}, {1.0, 3.0}, {2.0, 2.2}, {1.7, 2.9}}};
  std::mt19937_64 rng(78);
  for (int k = 0; k < 100; ++k) {
    const VectorXd a = oracle::random_vector(rng, 4, -3, 3);
    EXPECT_NEAR(lu_kumar_robust_hamiltonian(a, spec.arrival_box, s, 1.0), hamiltonian(f, a).value,
                1e-12);
  }
}

TEST(Hamiltonian, BranchesAreConvex) {
  NetworkSpec robust;
  robust.topology = Topology::kLuKumar;
  robust.mode = CostMode::kRobust;
  robust.arrival_box = {0.8, 1.2};
  robust.service_boxes = {{1.5, 2.5}, {1.0, 3.0}, {2.0, 2.2}, {1.7, 2.9}};
  NetworkSpec risk = lu_kumar_fixed();
  risk.mode = CostMode::kRisk;
  risk.c = 0.05;
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& spec : {lu_kumar_fixed(), robust, risk}) {
    const auto f = build(spec).family;
    for (const auto& b : f.branches()) {
      for (int k = 0; k < 200; ++k) {
        const VectorXd a1 = oracle::random_vector(rng, 4, -1.5, 1.5);
        const VectorXd a2 = oracle::random_vector(rng, 4, -1.5, 1.5);
        const double t = u(rng);
        EXPECT_LE(hamiltonian_branch(b, t * a1 + (1 - t) * a2),
                  t * hamiltonian_branch(b, a1) + (1 - t) * hamiltonian_branch(b, a2) + 1e-9);
      }
    }
  }
}

TEST(Hamiltonian, LegendreConsistencyForVelocitySets) {
  const auto f = build(lu_kumar_fixed()).family;
  std::mt19937_64 rng(80);
  for (const auto& b : f.branches()) {
    for (int k = 0; k < 50; ++k) {
      const VectorXd a = oracle::random_vector(rng, 4, -2, 2);
      double sup = -kInf;
      for (const auto& v : b.velocity_candidates) sup = std::max(sup, a.dot(v) - running_cost(b, v));
      EXPECT_EQ(sup, hamiltonian_branch(b, a));
    }
  }
}

TEST(Hamiltonian, RiskMatchesRateGridSup) {
  NetworkSpec spec = lu_kumar_fixed();
  spec.mode = CostMode::kRisk;
  spec.c = 0.05;
  const auto f = build(spec).family;
  const auto one = build(single(CostMode::kRisk)).family;
  std::mt19937_64 rng(81);
  auto grid_sup = [](const CostBranch& b, const VectorXd& a) {
    // Separable over rates: sup_r sum_k [r_k <a, col_k> - n_k l(r_k / n_k)].
    const int r = static_cast<int>(b.rate_map.cols());
    double total = b.c;
    for (int k = 0; k < r; ++k) {
      const double slope = a.dot(b.rate_map.col(k));
      double best = -kInf;
      for (int q = 0; q < 41; ++q) {
        const double rate = 0.01 + (5 * b.nominal(k) - 0.01) * q / 40.0;
        best = std::max(best, rate * slope - b.nominal(k) * entropy_penalty(rate / b.nominal(k)));
      }
      total += best;
    }
    return total;
  };
  // Lu-Kumar flow columns pair two coordinates, so |<a, col>| reaches 2|a|;
  // the optimal rate n e^{slope} stays inside the 5n grid box only for
  // slopes below log 5, hence the smaller range there.
  for (int k = 0; k < 50; ++k) {
    const VectorXd a = oracle::random_vector(rng, 4, -0.8, 0.8);
    for (const auto& b : f.branches()) EXPECT_NEAR(hamiltonian_branch(b, a), grid_sup(b, a), 2e-2);
    const VectorXd a1 = oracle::random_vector(rng, 1, -1, 1);
    EXPECT_NEAR(hamiltonian_branch(one.branch(0), a1), grid_sup(one.branch(0), a1), 2e-2);
  }
}

TEST(Candidates, RiskGridSupApproximatesHamiltonian) {
  const auto f = build(single(CostMode::kRisk)).family;
  const auto cands = candidate_set(f.branch(0));
  EXPECT_EQ(cands.size(), 21u * 21u);
  for (double p : {-0.5, 0.0, 0.12, 0.5}) {
    double sup = -kInf;
    for (const auto& c : cands) sup = std::max(sup, p * c.velocity(0) - c.running_cost);
    EXPECT_NEAR(sup, hamiltonian_branch(f.branch(0), scalar(p)), 2e-2) << p;
    EXPECT_LE(sup, hamiltonian_branch(f.branch(0), scalar(p)) + 1e-9);
  }
}

TEST(Candidates, RobustVertexCount) {
  const auto f = build(single(CostMode::kRobust)).family;
  EXPECT_EQ(candidate_set(f.branch(0)).size(), 4u);
  NetworkSpec spec = single(CostMode::kRobust);
  spec.service_boxes = {{1.0, 1.0}};
  EXPECT_EQ(candidate_set(build(spec).family.branch(0)).size(), 2u);
}

TEST(CostBranch, RejectsInvalidInput) {
  EXPECT_THROW(CostBranch::velocity_set("e", {}, 1.0), Error);
  EXPECT_THROW(CostBranch::rate_box("b", Eigen::MatrixXd::Ones(1, 2), Eigen::Vector2d(1, 0),
                                    Eigen::Vector2d(0, 1), 1.0),
               Error);
  EXPECT_THROW(CostBranch::risk_sensitive("r", Eigen::MatrixXd::Ones(1, 2), Eigen::Vector2d(1, 0), 1.0),
               Error);
  EXPECT_THROW(CostFamily(1, {}), Error);
}

}  // namespace
}  // namespace cgame
