#include "cgame/costs.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgame/error.h"
#include "cgame/lp.h"

namespace cgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMembershipTol = 1e-9;

void require_dim(const Eigen::VectorXd& v, int d, const char* what) {
  if (v.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(d) +
                    ", got " + std::to_string(v.size()));
  }
}

void require_rates(const Eigen::MatrixXd& map) {
  if (map.rows() == 0 || map.cols() == 0 || !map.allFinite()) {
    throw Error(ErrorCode::kInvalidSpec, "rate map must be a finite nonempty matrix");
  }
}

bool full_column_rank(const Eigen::MatrixXd& map) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(map);
  qr.setThreshold(1e-10);
  return qr.rank() == map.cols();
}

// Rates r with rate_map r = beta for an injective map; false when beta is
// outside its range.
bool recover_rates(const Eigen::MatrixXd& map, const Eigen::VectorXd& beta,
                   Eigen::VectorXd* rates) {
  *rates = map.colPivHouseholderQr().solve(beta);
  const double scale = 1.0 + beta.cwiseAbs().maxCoeff();
  return (map * *rates - beta).cwiseAbs().maxCoeff() <= kMembershipTol * scale;
}

// Some r in [lo, hi] with map r = beta. Written as an LP in s = r - lo >= 0
// with slacks for the upper bounds.
bool in_rate_box(const Eigen::MatrixXd& map, const Eigen::VectorXd& lo,
                 const Eigen::VectorXd& hi, const Eigen::VectorXd& beta) {
  const Eigen::Index d = map.rows(), r = map.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + r, 2 * r);
  A.topLeftCorner(d, r) = map;
  A.bottomLeftCorner(r, r).setIdentity();
  A.bottomRightCorner(r, r).setIdentity();
  Eigen::VectorXd b(d + r);
  b.head(d) = beta - map * lo;
  b.tail(r) = hi - lo;
  return lp::minimize_standard_form(A, b, Eigen::VectorXd::Zero(2 * r)).status ==
         lp::Status::kOptimal;
}

// inf { sum_k n_k l(r_k / n_k) : map r = beta, r >= 0 } through its concave
// dual sup_y <y, beta> - sum_k n_k (exp(<y, col_k>) - 1), maximized by damped
// Newton. The optimal rates are r_k = n_k exp(<y, col_k>).
double entropy_fiber_cost(const Eigen::MatrixXd& map, const Eigen::VectorXd& nominal,
                          const Eigen::VectorXd& beta) {
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(map);
  const Eigen::VectorXd particular = cod.solve(beta);
  const double scale = 1.0 + beta.cwiseAbs().maxCoeff();
  if ((map * particular - beta).cwiseAbs().maxCoeff() > kMembershipTol * scale) return kInf;

  const Eigen::Index d = map.rows();
  auto dual = [&](const Eigen::VectorXd& y) {
    const Eigen::ArrayXd e = (map.transpose() * y).array().exp();
    return y.dot(beta) - (nominal.array() * (e - 1.0)).sum();
  };
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  double value = dual(y);
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::ArrayXd e = (map.transpose() * y).array().exp();
    const Eigen::VectorXd rates = (nominal.array() * e).matrix();
    const Eigen::VectorXd grad = beta - map * rates;
    if (grad.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    const Eigen::MatrixXd hess = map * rates.asDiagonal() * map.transpose();
    const Eigen::VectorXd step =
        hess.completeOrthogonalDecomposition().solve(grad);
    double t = 1.0;
    double next = dual(y + step);
    while (!(next >= value) && t > 1e-12) {
      t *= 0.5;
      next = dual(y + t * step);
    }
    if (!(next >= value)) break;
    y += t * step;
    value = next;
    // An unbounded dual means beta lies outside the cone of nonnegative rates.
    if (value > 1e12) return kInf;
  }
  return value;
}

bool in_convex_hull(const std::vector<Eigen::VectorXd>& pts,
                    const Eigen::VectorXd& beta) {
  if (pts.size() == 1) {
    return (pts.front() - beta).cwiseAbs().maxCoeff() <= kMembershipTol;
  }
  const int d = static_cast<int>(beta.size());
  const int m = static_cast<int>(pts.size());
  Eigen::MatrixXd A(d + 1, m);
  Eigen::VectorXd b(d + 1);
  for (int k = 0; k < m; ++k) {
    A.block(0, k, d, 1) = pts[k];
    A(d, k) = 1.0;
  }
  b.head(d) = beta;
  b(d) = 1.0;
  const lp::Solution sol =
      lp::minimize_standard_form(A, b, Eigen::VectorXd::Zero(m));
  return sol.status == lp::Status::kOptimal;
}

}  // namespace

const char* to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::kVelocitySet: return "velocity_set";
    case BranchKind::kRateBoxRobust: return "rate_box_robust";
    case BranchKind::kRiskSensitive: return "risk_sensitive";
  }
  return "unknown";
}

CostBranch CostBranch::velocity_set(std::string label,
                                    std::vector<Eigen::VectorXd> velocities,
                                    double c) {
  if (velocities.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "velocity_set branch needs candidates");
  }
  CostBranch b;
  b.kind = BranchKind::kVelocitySet;
  b.label = std::move(label);
  b.c = c;
  b.velocity_candidates = std::move(velocities);
  return b;
}

CostBranch CostBranch::rate_box(std::string label, Eigen::MatrixXd rate_map,
                                Eigen::VectorXd lower, Eigen::VectorXd upper,
                                double c) {
  const Eigen::Index r = rate_map.cols();
  if (lower.size() != r || upper.size() != r) {
    throw Error(ErrorCode::kInvalidSpec, "rate box bounds do not match rate map");
  }
  for (Eigen::Index k = 0; k < r; ++k) {
    if (!(lower(k) <= upper(k))) {
      throw Error(ErrorCode::kInvalidSpec, "rate box with lower > upper");
    }
  }
  require_rates(rate_map);
  CostBranch b;
  b.kind = BranchKind::kRateBoxRobust;
  b.label = std::move(label);
  b.c = c;
  b.rate_map = std::move(rate_map);
  b.rate_lower = std::move(lower);
  b.rate_upper = std::move(upper);

  // Vertices over the non-degenerate axes only.
  std::vector<int> free_axes;
  for (Eigen::Index k = 0; k < r; ++k) {
    if (b.rate_lower(k) < b.rate_upper(k)) free_axes.push_back(static_cast<int>(k));
  }
  const unsigned count = 1u << free_axes.size();
  for (unsigned mask = 0; mask < count; ++mask) {
    Eigen::VectorXd rates = b.rate_lower;
    for (std::size_t q = 0; q < free_axes.size(); ++q) {
      if (mask & (1u << q)) rates(free_axes[q]) = b.rate_upper(free_axes[q]);
    }
    b.velocity_candidates.push_back(b.rate_map * rates);
  }
  return b;
}

CostBranch CostBranch::risk_sensitive(std::string label, Eigen::MatrixXd rate_map,
                                      Eigen::VectorXd nominal, double c) {
  if (nominal.size() != rate_map.cols()) {
    throw Error(ErrorCode::kInvalidSpec, "nominal rates do not match rate map");
  }
  if (!(nominal.array() > 0.0).all()) {
    throw Error(ErrorCode::kInvalidSpec, "nominal rates must be strictly positive");
  }
  require_rates(rate_map);
  CostBranch b;
  b.kind = BranchKind::kRiskSensitive;
  b.label = std::move(label);
  b.c = c;
  b.rate_map = std::move(rate_map);
  b.nominal = std::move(nominal);
  return b;
}

int CostBranch::dim() const {
  if (kind == BranchKind::kRiskSensitive) return static_cast<int>(rate_map.rows());
  return static_cast<int>(velocity_candidates.front().size());
}

CostFamily::CostFamily(int dim, std::vector<CostBranch> branches)
    : dim_(dim), branches_(std::move(branches)) {
  if (branches_.empty()) throw Error(ErrorCode::kInvalidSpec, "cost family needs J >= 1");
  for (const CostBranch& b : branches_) {
    if (b.dim() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "branch '" + b.label + "' has dimension " + std::to_string(b.dim()));
    }
    for (const Eigen::VectorXd& v : b.velocity_candidates) {
      if (v.size() != dim_) {
        throw Error(ErrorCode::kDimensionMismatch, "branch '" + b.label + "' candidate");
      }
    }
  }
}

bool CostFamily::satisfies_condition_4_1() const {
  return !has_risk_sensitive();
}

bool CostFamily::has_risk_sensitive() const {
  return std::any_of(branches_.begin(), branches_.end(), [](const CostBranch& b) {
    return b.kind == BranchKind::kRiskSensitive;
  });
}

double entropy_penalty(double z) {
  if (z < 0.0) return kInf;
  if (z == 0.0) return 1.0;
  return z * std::log(z) - z + 1.0;
}

double entropy_dual(double a) { return std::expm1(a); }

double hamiltonian_branch(const CostBranch& b, const Eigen::VectorXd& alpha) {
  require_dim(alpha, b.dim(), "hamiltonian_branch");
  if (b.kind == BranchKind::kRiskSensitive) {
    // sup over rates separates per rate: n_k h(<alpha, column_k>).
    double h = b.c;
    for (Eigen::Index k = 0; k < b.rate_map.cols(); ++k) {
      h += b.nominal(k) * entropy_dual(alpha.dot(b.rate_map.col(k)));
    }
    return h;
  }
  double best = -kInf;
  for (const Eigen::VectorXd& v : b.velocity_candidates) {
    best = std::max(best, alpha.dot(v));
  }
  return b.c + best;
}

HamiltonianValue hamiltonian(const CostFamily& f, const Eigen::VectorXd& alpha) {
  require_dim(alpha, f.dim(), "hamiltonian");
  HamiltonianValue out{kInf, 0};
  for (int j = 0; j < f.size(); ++j) {
    const double h = hamiltonian_branch(f.branch(j), alpha);
    if (h < out.value) out = {h, j};
  }
  return out;
}

double running_cost(const CostBranch& b, const Eigen::VectorXd& beta) {
  require_dim(beta, b.dim(), "running_cost");
  switch (b.kind) {
    case BranchKind::kVelocitySet:
      return in_convex_hull(b.velocity_candidates, beta) ? -b.c : kInf;
    case BranchKind::kRateBoxRobust: {
      if (!full_column_rank(b.rate_map)) {
        return in_rate_box(b.rate_map, b.rate_lower, b.rate_upper, beta) ? -b.c : kInf;
      }
      Eigen::VectorXd rates;
      if (!recover_rates(b.rate_map, beta, &rates)) return kInf;
      for (Eigen::Index k = 0; k < rates.size(); ++k) {
        if (rates(k) < b.rate_lower(k) - kMembershipTol ||
            rates(k) > b.rate_upper(k) + kMembershipTol) {
          return kInf;
        }
      }
      return -b.c;
    }
    case BranchKind::kRiskSensitive: {
      if (!full_column_rank(b.rate_map)) {
        return -b.c + entropy_fiber_cost(b.rate_map, b.nominal, beta);
      }
      Eigen::VectorXd rates;
      if (!recover_rates(b.rate_map, beta, &rates)) return kInf;
      double cost = -b.c;
      for (Eigen::Index k = 0; k < rates.size(); ++k) {
        double r = rates(k);
        if (r < -kMembershipTol) return kInf;
        r = std::max(r, 0.0);
        cost += b.nominal(k) * entropy_penalty(r / b.nominal(k));
      }
      return cost;
    }
  }
  return kInf;
}

std::vector<Candidate> candidate_set(const CostBranch& b,
                                     const CandidateOptions& opts) {
  std::vector<Candidate> out;
  if (b.kind != BranchKind::kRiskSensitive) {
    out.reserve(b.velocity_candidates.size());
    for (const Eigen::VectorXd& v : b.velocity_candidates) out.push_back({v, -b.c});
    return out;
  }
  if (opts.risk_grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "risk grid needs >= 2 points per axis");
  }
  const int r = static_cast<int>(b.rate_map.cols());
  const int n = opts.risk_grid_points;
  // With more rates than the map can separate, several rate vectors share a
  // velocity; the candidate carries the cheapest one so that the scheme and
  // the rollouts charge the same L_j.
  const bool injective = full_column_rank(b.rate_map);
  std::vector<int> idx(r, 0);
  while (true) {
    Eigen::VectorXd rates(r);
    double penalty = 0.0;
    for (int k = 0; k < r; ++k) {
      const double hi = opts.risk_grid_max_factor * b.nominal(k);
      rates(k) = opts.risk_grid_min + (hi - opts.risk_grid_min) * idx[k] / (n - 1);
      penalty += b.nominal(k) * entropy_penalty(rates(k) / b.nominal(k));
    }
    const Eigen::VectorXd v = b.rate_map * rates;
    if (!injective) {
      penalty = std::min(penalty, entropy_fiber_cost(b.rate_map, b.nominal, v));
    }
    out.push_back({v, -b.c + penalty});
    int k = 0;
    while (k < r && ++idx[k] == n) idx[k++] = 0;
    if (k == r) break;
  }
  return out;
}

double lu_kumar_robust_hamiltonian(const Eigen::VectorXd& alpha,
                                   const RateBox& arrival,
                                   const std::array<RateBox, 4>& service,
                                   double c) {
  require_dim(alpha, 4, "lu_kumar_robust_hamiltonian");
  auto term = [](const RateBox& box, double slope) {
    return std::max(box.lo * slope, box.hi * slope);
  };
  const double a1 = alpha(0), a2 = alpha(1), a3 = alpha(2), a4 = alpha(3);
  return c + term(arrival, a1) +
         std::min(term(service[0], a2 - a1), term(service[3], -a4)) +
         std::min(term(service[1], a3 - a2), term(service[2], a4 - a3));
}

}  // namespace cgame
