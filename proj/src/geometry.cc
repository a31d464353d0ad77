#include "cgame/geometry.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "cgame/error.h"
#include "cgame/lp.h"

namespace cgame {
namespace {

std::vector<int> members(unsigned mask, int d) {
  std::vector<int> idx;
  for (int i = 0; i < d; ++i) {
    if (mask & (1u << i)) idx.push_back(i);
  }
  return idx;
}

// Subset masks of `universe`, ordered by popcount then value.
std::vector<unsigned> subsets_by_size(unsigned universe) {
  std::vector<unsigned> out;
  for (unsigned s = universe;; s = (s - 1) & universe) {
    out.push_back(s);
    if (s == 0) break;
  }
  std::sort(out.begin(), out.end(), [](unsigned a, unsigned b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  return out;
}

void require_enumerable(int d) {
  if (d > kMaxEnumerationDim) {
    throw Error(ErrorCode::kDimensionTooLarge,
                "face-subset enumeration supports d <= 16, got " +
                    std::to_string(d));
  }
}

// Solves the complementarity problem w = v + G_{:,S} a_S restricted to the
// coordinates in `faces`: w_i >= 0 and a_i >= 0 and a_i w_i = 0 for i in
// faces. Coordinates outside `faces` are unconstrained.
struct FaceLcp {
  Eigen::VectorXd w;
  Eigen::VectorXd a;
  double residual = 0.0;
  bool degenerate = false;
};

FaceLcp solve_face_lcp(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& v,
                       unsigned faces) {
  const int d = static_cast<int>(gamma.rows());
  FaceLcp best;
  bool found = false;
  for (unsigned s : subsets_by_size(faces)) {
    const std::vector<int> act = members(s, d);
    const int k = static_cast<int>(act.size());
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
    if (k > 0) {
      Eigen::MatrixXd sub(k, k);
      Eigen::VectorXd rhs(k);
      for (int r = 0; r < k; ++r) {
        rhs(r) = -v(act[r]);
        for (int c = 0; c < k; ++c) sub(r, c) = gamma(act[r], act[c]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd sol = lu.solve(rhs);
      for (int r = 0; r < k; ++r) a(act[r]) = sol(r);
    }
    Eigen::VectorXd w = v + gamma * a;
    double resid = 0.0;
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      if (!(faces & (1u << i))) continue;
      if (a(i) < -kComplementarityTol || w(i) < -kComplementarityTol) {
        ok = false;
        break;
      }
      resid = std::max(resid, std::abs(a(i) * w(i)));
    }
    if (!ok || resid > kComplementarityTol) continue;
    // Active coordinates are exactly on the face; clip round-off.
    for (int i : act) w(i) = 0.0;
    for (int i = 0; i < d; ++i) {
      if ((faces & (1u << i)) && w(i) < 0.0) w(i) = 0.0;
      if (a(i) < 0.0) a(i) = 0.0;
    }
    if (!found) {
      best.w = std::move(w);
      best.a = std::move(a);
      best.residual = resid;
      found = true;
    } else if ((w - best.w).cwiseAbs().maxCoeff() > 1e-9) {
      best.degenerate = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kNoSolution,
                "no face subset yields a complementary solution");
  }
  return best;
}

}  // namespace

ConstraintGeometry::ConstraintGeometry(Eigen::MatrixXd gamma)
    : gamma_(std::move(gamma)) {
  if (gamma_.rows() < 1 || gamma_.rows() != gamma_.cols()) {
    throw Error(ErrorCode::kInvalidGeometry, "gamma must be a nonempty square matrix");
  }
  if (!gamma_.allFinite()) {
    throw Error(ErrorCode::kInvalidGeometry, "gamma has non-finite entries");
  }
  for (int i = 0; i < gamma_.rows(); ++i) {
    if (gamma_(i, i) != 1.0) {
      throw Error(ErrorCode::kInvalidGeometry,
                  "gamma_i must satisfy (gamma_i)_i = 1 (column " +
                      std::to_string(i) + ")");
    }
  }
}

ConstraintGeometry ConstraintGeometry::tandem(int d) {
  if (d < 1) throw Error(ErrorCode::kInvalidGeometry, "tandem needs d >= 1");
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i + 1 < d; ++i) gamma(i + 1, i) = -1.0;
  return ConstraintGeometry(std::move(gamma));
}

bool check_linear_independence(const ConstraintGeometry& g) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g.gamma());
  qr.setThreshold(1e-10);
  return qr.rank() == g.dim();
}

double completely_s_margin(const ConstraintGeometry& g, unsigned mask) {
  const int d = g.dim();
  const std::vector<int> kappa = members(mask, d);
  const int k = static_cast<int>(kappa.size());
  if (k == 0) return 0.0;
  // Variables: b (k), t+ , t-, slack (k). Rows: k inequality rows plus the
  // simplex normalization.
  //   t+ - t- - sum_i b_i gamma_i(r) + s_r = 0,  r in kappa
  //   sum_i b_i = 1
  const int nvar = k + 2 + k;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, nvar);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < k; ++i) A(r, i) = -g.gamma()(kappa[r], kappa[i]);
    A(r, k) = 1.0;
    A(r, k + 1) = -1.0;
    A(r, k + 2 + r) = 1.0;
  }
  A.row(k).head(k).setOnes();
  b(k) = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  c(k) = -1.0;
  c(k + 1) = 1.0;
  const lp::Solution sol = lp::minimize_standard_form(A, b, c);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kNoSolution, "completely-S program did not solve");
  }
  return -sol.objective;
}

bool check_completely_s(const ConstraintGeometry& g) {
  const int d = g.dim();
  require_enumerable(d);
  const unsigned full = (d == 32) ? ~0u : ((1u << d) - 1u);
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (completely_s_margin(g, mask) <= 1e-10) return false;
  }
  return true;
}

double contraction_radius_bound(const ConstraintGeometry& g) {
  const int d = g.dim();
  const Eigen::MatrixXd q =
      (g.gamma() - Eigen::MatrixXd::Identity(d, d)).cwiseAbs();
  // Iterate with |Q| + I so the positive vector stays positive; for a positive
  // v, max_i (|Q| v)_i / v_i bounds the spectral radius from above.
  const Eigen::MatrixXd shifted = q + Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  double upper = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd qv = q * v;
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const double r = qv(i) / v(i);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    upper = std::min(upper, hi);
    if (hi - lo < 1e-10) break;
    v = shifted * v;
    v /= v.maxCoeff();
  }
  return upper;
}

bool check_contraction_proxy(const ConstraintGeometry& g) {
  return contraction_radius_bound(g) < 1.0;
}

ProjectionResult project(const ConstraintGeometry& g, const Eigen::VectorXd& x) {
  const int d = g.dim();
  if (x.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "project: point has wrong dimension");
  }
  ProjectionResult out;
  if ((x.array() >= 0.0).all()) {
    out.z = x;
    out.a = Eigen::VectorXd::Zero(d);
    return out;
  }
  require_enumerable(d);
  const unsigned full = (1u << d) - 1u;
  FaceLcp lcp = solve_face_lcp(g.gamma(), x, full);
  out.z = std::move(lcp.w);
  out.a = std::move(lcp.a);
  out.residual = lcp.residual;
  out.degenerate = lcp.degenerate;
  return out;
}

Eigen::VectorXd projected_velocity(const ConstraintGeometry& g,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) {
  const int d = g.dim();
  if (x.size() != d || v.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "projected_velocity: wrong dimension");
  }
  require_enumerable(d);
  unsigned faces = 0;
  for (int i = 0; i < d; ++i) {
    if (x(i) <= kFaceTol) faces |= (1u << i);
  }
  if (faces == 0) return v;
  return solve_face_lcp(g.gamma(), v, faces).w;
}

double projected_velocity_bound(const ConstraintGeometry& g) {
  const int d = g.dim();
  require_enumerable(d);
  double worst = 0.0;
  const unsigned full = (1u << d) - 1u;
  for (unsigned s = 1; s <= full; ++s) {
    const std::vector<int> act = members(s, d);
    const int k = static_cast<int>(act.size());
    Eigen::MatrixXd sub(k, k), cols(d, k);
    for (int c = 0; c < k; ++c) {
      cols.col(c) = g.gamma().col(act[c]);
      for (int r = 0; r < k; ++r) sub(r, c) = g.gamma()(act[r], act[c]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) continue;
    // a_S = -sub^{-1} v_S, so w = v + cols a_S has gain 1 + |cols sub^{-1}|.
    const Eigen::MatrixXd gain = cols * lu.inverse();
    worst = std::max(worst, gain.operatorNorm());
  }
  return 1.0 + worst;
}

}  // namespace cgame
