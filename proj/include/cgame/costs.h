#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cgame {

enum class BranchKind { kVelocitySet, kRateBoxRobust, kRiskSensitive };

const char* to_string(BranchKind kind);

/// One running-cost branch L_j.
///
///  - kVelocitySet: L_j = -c on the convex hull of `velocity_candidates`,
///    +inf elsewhere.
///  - kRateBoxRobust: velocities are `rate_map * r` for rates r in the box
///    [rate_lower, rate_upper]; L_j = -c there, +inf elsewhere. The vertex
///    velocities are precomputed into `velocity_candidates`.
///  - kRiskSensitive: L_j(beta) = -c + sum_k nominal_k l(r_k / nominal_k) with
///    l(z) = z log z - z + 1 and r the (unique) rates with rate_map r = beta.
struct CostBranch {
  BranchKind kind = BranchKind::kVelocitySet;
  std::string label;
  double c = 1.0;
  std::vector<Eigen::VectorXd> velocity_candidates;
  Eigen::MatrixXd rate_map;  // d x (number of rates)
  Eigen::VectorXd rate_lower;
  Eigen::VectorXd rate_upper;
  Eigen::VectorXd nominal;

  static CostBranch velocity_set(std::string label,
                                 std::vector<Eigen::VectorXd> velocities,
                                 double c = 1.0);
  static CostBranch rate_box(std::string label, Eigen::MatrixXd rate_map,
                             Eigen::VectorXd lower, Eigen::VectorXd upper,
                             double c = 1.0);
  static CostBranch risk_sensitive(std::string label, Eigen::MatrixXd rate_map,
                                   Eigen::VectorXd nominal, double c);

  int dim() const;
};

/// The J branches of the minimizer; H = min_j H_j.
class CostFamily {
 public:
  CostFamily(int dim, std::vector<CostBranch> branches);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(branches_.size()); }
  const CostBranch& branch(int j) const { return branches_.at(j); }
  const std::vector<CostBranch>& branches() const { return branches_; }

  /// Every branch is an indicator-type cost (velocity set or rate box).
  bool satisfies_condition_4_1() const;
  bool has_risk_sensitive() const;

 private:
  int dim_;
  std::vector<CostBranch> branches_;
};

/// l(z) = z log z - z + 1 for z >= 0 (0 log 0 = 0), +inf for z < 0.
double entropy_penalty(double z);
/// Legendre dual of l: h(a) = e^a - 1.
double entropy_dual(double a);

double hamiltonian_branch(const CostBranch& b, const Eigen::VectorXd& alpha);

struct HamiltonianValue {
  double value = 0.0;
  int branch = 0;  // argmin, lowest index on ties
};
HamiltonianValue hamiltonian(const CostFamily& f, const Eigen::VectorXd& alpha);

/// L_j(beta); +inf off the admissible set.
double running_cost(const CostBranch& b, const Eigen::VectorXd& beta);

/// Finite action set the maximizer chooses from in the discrete schemes.
struct Candidate {
  Eigen::VectorXd velocity;
  double running_cost = 0.0;  // L_j(velocity)
};

struct CandidateOptions {
  int risk_grid_points = 21;        // per rate axis
  double risk_grid_min = 0.01;      // lower end of each rate axis
  double risk_grid_max_factor = 4;  // upper end = factor * nominal
};

/// Vertices for indicator-type branches; a tensor rate grid for
/// risk-sensitive branches.
std::vector<Candidate> candidate_set(const CostBranch& b,
                                     const CandidateOptions& opts = {});

struct RateBox {
  double lo = 0.0;
  double hi = 0.0;
};

/// Closed-form lattice Hamiltonian of the four-queue, two-server network with
/// rate boxes (arrival box, then service boxes for queues 1..4):
///   c + [a x1 v A x1] + [m1 (x2-x1) v M1 (x2-x1)] ^ [m4 (-x4) v M4 (-x4)]
///     + [m2 (x3-x2) v M2 (x3-x2)] ^ [m3 (x4-x3) v M3 (x4-x3)]
double lu_kumar_robust_hamiltonian(const Eigen::VectorXd& alpha,
                                   const RateBox& arrival,
                                   const std::array<RateBox, 4>& service,
                                   double c = 1.0);

}  // namespace cgame
