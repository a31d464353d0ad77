#pragma once

#include <Eigen/Dense>

namespace cgame {

/// Reflection directions for the nonnegative orthant R^d_+. Column i of
/// `gamma()` is the direction gamma_i pushed along on face {x_i = 0}; the
/// diagonal is normalized to one.
class ConstraintGeometry {
 public:
  /// Throws kInvalidGeometry unless gamma is square, finite, d >= 1 and has a
  /// unit diagonal.
  explicit ConstraintGeometry(Eigen::MatrixXd gamma);

  /// Tandem routing e_i - e_{i+1}, last column e_d.
  static ConstraintGeometry tandem(int d);

  int dim() const { return static_cast<int>(gamma_.rows()); }
  const Eigen::MatrixXd& gamma() const { return gamma_; }
  Eigen::VectorXd direction(int i) const { return gamma_.col(i); }

 private:
  Eigen::MatrixXd gamma_;
};

/// Face-activity cutoff for I(x) = {i : x_i <= kFaceTol}.
inline constexpr double kFaceTol = 1e-12;
/// Complementarity / reconstruction tolerance for projections.
inline constexpr double kComplementarityTol = 1e-10;
/// Upper bound on d for subset enumeration.
inline constexpr int kMaxEnumerationDim = 16;

struct ProjectionResult {
  Eigen::VectorXd z;  // point in the orthant
  Eigen::VectorXd a;  // multipliers per face, z = x + gamma * a
  double residual = 0.0;
  // Set when a second face subset produced a different complementary
  // solution; z/a hold the first one found.
  bool degenerate = false;
};

bool check_linear_independence(const ConstraintGeometry& g);

/// Completely-S test: every nonempty face subset kappa admits b >= 0 with
/// (sum_{i in kappa} b_i gamma_i)_k > 0 for all k in kappa. Decided per subset
/// by a small linear program. Throws kDimensionTooLarge for d > 16.
bool check_completely_s(const ConstraintGeometry& g);

/// Optimal value of the completely-S program for one subset (bitmask):
/// max_b min_{k in kappa} (sum b_i gamma_i)_k over the simplex.
double completely_s_margin(const ConstraintGeometry& g, unsigned mask);

/// Sufficient test for the contraction-type condition on the directions:
/// spectral radius of |gamma - I| below one. `false` means "not verified".
bool check_contraction_proxy(const ConstraintGeometry& g);

/// Certified upper bound on the spectral radius of |gamma - I|
/// (Collatz-Wielandt bound along a shifted power iteration).
double contraction_radius_bound(const ConstraintGeometry& g);

/// Oblique projection onto the orthant: solves z = x + gamma a, z >= 0, a >= 0,
/// z'a = 0 by enumerating face subsets in order of size. Points already in
/// the orthant are returned unchanged with a = 0.
/// Throws kNoSolution when no subset gives a complementary solution.
ProjectionResult project(const ConstraintGeometry& g, const Eigen::VectorXd& x);

/// Projected velocity pi(x, v) at an orthant point.
Eigen::VectorXd projected_velocity(const ConstraintGeometry& g,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v);

/// Constant M with |pi(x, v)| <= M (1 + |v|) for all x, v.
double projected_velocity_bound(const ConstraintGeometry& g);

}  // namespace cgame
