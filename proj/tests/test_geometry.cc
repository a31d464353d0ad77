#include <random>

#include <gtest/gtest.h>

#include "cgame/error.h"
#include "cgame/geometry.h"
#include "oracles.h"

namespace cgame {
namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

ConstraintGeometry from_columns(std::initializer_list<std::initializer_list<double>> cols) {
  const int d = static_cast<int>(cols.size());
  MatrixXd m(d, d);
  int c = 0;
  for (const auto& col : cols) {
    int r = 0;
    for (double v : col) m(r++, c) = v;
    ++c;
  }
  return ConstraintGeometry(m);
}

ConstraintGeometry random_geometry(std::mt19937_64& rng, int d, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  MatrixXd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = r == c ? 1.0 : u(rng);
  return ConstraintGeometry(m);
}

TEST(ConstraintGeometry, RejectsNonUnitDiagonal) {
  MatrixXd m = MatrixXd::Identity(2, 2);
  m(1, 1) = 2.0;
  EXPECT_THROW(ConstraintGeometry{m}, Error);
  EXPECT_THROW(ConstraintGeometry{MatrixXd::Ones(2, 3)}, Error);
  m(1, 1) = 1.0;
  m(0, 1) = std::nan("");
  EXPECT_THROW(ConstraintGeometry{m}, Error);
}

TEST(ConstraintGeometry, TandemColumns) {
  const auto g = ConstraintGeometry::tandem(4);
  MatrixXd expected = MatrixXd::Identity(4, 4);
  for (int i = 0; i < 3; ++i) expected(i + 1, i) = -1.0;
  EXPECT_EQ(g.gamma(), expected);
}

TEST(LinearIndependence, Examples) {
  EXPECT_TRUE(check_linear_independence(ConstraintGeometry::tandem(1)));
  EXPECT_TRUE(check_linear_independence(ConstraintGeometry::tandem(4)));
  EXPECT_FALSE(check_linear_independence(from_columns({{1, -1}, {-1, 1}})));
}

TEST(CompletelyS, Examples) {
  EXPECT_TRUE(check_completely_s(ConstraintGeometry::tandem(4)));
  EXPECT_TRUE(check_completely_s(ConstraintGeometry::tandem(1)));
  EXPECT_FALSE(check_completely_s(from_columns({{1, -2}, {-2, 1}})));
}

TEST(CompletelyS, TandemWitness) {
  // b = (1, 2, 3, 4) pushes every coordinate up by one.
  const auto g = ConstraintGeometry::tandem(4);
  const VectorXd v = g.gamma() * Eigen::Vector4d(1, 2, 3, 4);
  EXPECT_TRUE(v.isApprox(VectorXd::Ones(4)));
  EXPECT_GT(completely_s_margin(g, 0xF), 0.0);
}

TEST(CompletelyS, RejectsLargeDimension) {
  EXPECT_THROW(check_completely_s(ConstraintGeometry::tandem(17)), Error);
}

TEST(CompletelyS, AgreesWithSimplexGrid) {
  std::mt19937_64 rng(2024);
  int positives = 0;
  for (int sample = 0; sample < 100; ++sample) {
    const int d = 1 + sample % 3;
    const auto g = random_geometry(rng, d, 2.0);
    const bool lp = check_completely_s(g);
    positives += lp;
    EXPECT_EQ(lp, oracle::completely_s_grid(g.gamma())) << "sample " << sample << "\n"
                                                        << g.gamma();
  }
  // The sample should exercise both outcomes.
  EXPECT_GT(positives, 10);
  EXPECT_LT(positives, 90);
}

TEST(ContractionProxy, Examples) {
  EXPECT_TRUE(check_contraction_proxy(ConstraintGeometry::tandem(4)));
  EXPECT_TRUE(check_contraction_proxy(ConstraintGeometry::tandem(1)));
  const auto bad = from_columns({{1, -2}, {-2, 1}});
  EXPECT_FALSE(check_contraction_proxy(bad));
  EXPECT_NEAR(contraction_radius_bound(bad), 2.0, 1e-6);
  EXPECT_LT(contraction_radius_bound(ConstraintGeometry::tandem(4)), 1e-2);
}

TEST(ContractionProxy, BoundDominatesSpectralRadius) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 50; ++s) {
    const auto g = random_geometry(rng, 2 + s % 3, 0.8);
    const MatrixXd q = (g.gamma() - MatrixXd::Identity(g.dim(), g.dim())).cwiseAbs();
    const double rho = q.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(contraction_radius_bound(g), rho - 1e-9);
  }
}

TEST(Project, Examples) {
  const auto g = ConstraintGeometry::tandem(2);
  auto r = project(g, Vector2d(0.5, 0.5));
  EXPECT_EQ(r.z, Vector2d(0.5, 0.5));
  EXPECT_EQ(r.a, Vector2d::Zero());

  r = project(g, Vector2d(-1, 2));
  EXPECT_TRUE(r.z.isApprox(Vector2d(0, 1)));
  EXPECT_TRUE(r.a.isApprox(Vector2d(1, 0)));

  r = project(g, Vector2d(-1, -1));
  EXPECT_NEAR((r.z - Vector2d(0, 0)).norm(), 0.0, 1e-14);
  EXPECT_TRUE(r.a.isApprox(Vector2d(1, 2)));
  EXPECT_FALSE(r.degenerate);
}

TEST(Project, NoSolutionWithoutCompletelyS) {
  const auto g = from_columns({{1, -2}, {-2, 1}});
  EXPECT_THROW(project(g, Vector2d(-1, -1)), Error);
}

TEST(Project, MatchesBruteForceAndInvariants) {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 4; ++d) {
    const auto g = ConstraintGeometry::tandem(d);
    for (int s = 0; s < 200; ++s) {
      const VectorXd x = oracle::random_vector(rng, d, -2.0, 2.0);
      const ProjectionResult r = project(g, x);
      const auto z = oracle::projection(g.gamma(), x);
      ASSERT_TRUE(z.has_value());
      EXPECT_LE((r.z - *z).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE((x + g.gamma() * r.a - r.z).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(r.residual, 1e-10);
      EXPECT_TRUE((r.z.array() >= 0.0).all());
      EXPECT_TRUE((r.a.array() >= 0.0).all());
      for (int i = 0; i < d; ++i) {
        if (r.a(i) > 0.0) {
          EXPECT_LE(r.z(i), 1e-10);
        }
      }
      // Idempotent: the second call takes the identity branch.
      EXPECT_EQ(project(g, r.z).z, r.z);
    }
  }
}

TEST(Project, RandomCompletelySGeometries) {
  std::mt19937_64 rng(99);
  int tested = 0;
  while (tested < 40) {
    const auto g = random_geometry(rng, 3, 0.45);
    if (!check_completely_s(g)) continue;
    ++tested;
    for (int s = 0; s < 25; ++s) {
      const VectorXd x = oracle::random_vector(rng, 3, -2.0, 2.0);
      const auto r = project(g, x);
      EXPECT_LE((x + g.gamma() * r.a - r.z).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(r.a.dot(r.z), 1e-10);
    }
  }
}

TEST(ProjectedVelocity, Examples) {
  const auto g2 = ConstraintGeometry::tandem(2);
  EXPECT_EQ(projected_velocity(g2, Vector2d(1, 1), Vector2d(-3, 4)), Vector2d(-3, 4));
  EXPECT_TRUE(projected_velocity(g2, Vector2d(0, 1), Vector2d(-2, 0)).isApprox(Vector2d(0, -2)));
  const auto g1 = ConstraintGeometry::tandem(1);
  EXPECT_EQ(projected_velocity(g1, VectorXd::Zero(1), VectorXd::Constant(1, -1.0))(0), 0.0);
}

TEST(ProjectedVelocity, PositivelyHomogeneous) {
  std::mt19937_64 rng(3);
  const auto g = ConstraintGeometry::tandem(3);
  for (int s = 0; s < 100; ++s) {
    VectorXd x = oracle::random_vector(rng, 3, 0.0, 1.0);
    x(s % 3) = 0.0;
    if (s % 5 == 0) x((s + 1) % 3) = 0.0;
    const VectorXd v = oracle::random_vector(rng, 3, -1.0, 1.0);
    const VectorXd w = projected_velocity(g, x, v);
    for (double c : {0.5, 2.0, 10.0}) {
      EXPECT_LE((projected_velocity(g, x, c * v) - c * w).cwiseAbs().maxCoeff(), 1e-9);
    }
    EXPECT_LE(w.norm(), projected_velocity_bound(g) * (1.0 + v.norm()) + 1e-12);
  }
}

TEST(ProjectedVelocity, DifferenceQuotientsConverge) {
  std::mt19937_64 rng(8);
  const auto g = ConstraintGeometry::tandem(3);
  for (int s = 0; s < 50; ++s) {
    VectorXd x = oracle::random_vector(rng, 3, 0.0, 1.0);
    x(s % 3) = 0.0;
    const VectorXd v = oracle::random_vector(rng, 3, -1.0, 1.0);
    const VectorXd w = projected_velocity(g, x, v);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1e-3, 1e-4, 1e-5}) {
      const double err = ((project(g, x + delta * v).z - x) / delta - w).norm();
      EXPECT_LE(err, prev + 1e-9);
      prev = err;
    }
    EXPECT_LE(prev, 1e-6);
  }
}

}  // namespace
}  // namespace cgame
