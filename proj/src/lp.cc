#include "cgame/lp.h"

#include <cmath>
#include <limits>
#include <vector>

#include "cgame/error.h"

namespace cgame {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kNoSolution: return "NoSolution";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kGeometryUnverified: return "GeometryUnverified";
    case ErrorCode::kGridBudgetExceeded: return "GridBudgetExceeded";
    case ErrorCode::kIncompatibleData: return "IncompatibleData";
    case ErrorCode::kNotCondition41: return "NotCondition41";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInadmissibleVelocity: return "InadmissibleVelocity";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace lp {
namespace {

constexpr double kPivotTol = 1e-12;

// Tableau layout: rows 0..m-1 are constraints, row m is the objective
// (reduced costs); the last column holds the right-hand side.
class Tableau {
 public:
  Tableau(int m, int n) : m_(m), n_(n), t_(Eigen::MatrixXd::Zero(m + 1, n + 1)),
                          basis_(m, -1) {}

  double& at(int r, int c) { return t_(r, c); }
  double rhs(int r) const { return t_(r, n_); }
  double objective() const { return -t_(m_, n_); }
  std::vector<int>& basis() { return basis_; }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r <= m_; ++r) {
      if (r != row && t_(r, col) != 0.0) {
        t_.row(r) -= t_(r, col) * t_.row(row);
      }
    }
    basis_[row] = col;
  }

  // Runs Bland's-rule iterations over columns [0, allowed). Returns false when
  // the objective is unbounded below.
  bool optimize(int allowed) {
    for (int iter = 0; iter < 50000; ++iter) {
      int col = -1;
      for (int c = 0; c < allowed; ++c) {
        if (t_(m_, c) < -kPivotTol) {
          col = c;
          break;
        }
      }
      if (col < 0) return true;
      int row = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        if (t_(r, col) > kPivotTol) {
          const double ratio = t_(r, n_) / t_(r, col);
          if (ratio < best - 1e-15 ||
              (std::abs(ratio - best) <= 1e-15 && row >= 0 &&
               basis_[r] < basis_[row])) {
            best = ratio;
            row = r;
          }
        }
      }
      if (row < 0) return false;
      pivot(row, col);
    }
    return true;
  }

  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(cost.size()) = cost.transpose();
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[r];
      if (b >= 0 && t_(m_, b) != 0.0) t_.row(m_) -= t_(m_, b) * t_.row(r);
    }
  }

 private:
  int m_;
  int n_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

Solution minimize_standard_form(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b,
                                const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "lp: inconsistent sizes");
  }
  // Columns: n structural, m artificial.
  Tableau tab(m, n + m);
  for (int r = 0; r < m; ++r) {
    const double sign = b(r) < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.at(r, j) = sign * A(r, j);
    tab.at(r, n + r) = 1.0;
    tab.at(r, n + m) = sign * b(r);
    tab.basis()[r] = n + r;
  }

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  tab.optimize(n + m);

  Solution out;
  if (tab.objective() > 1e-9) {
    out.status = Status::kInfeasible;
    return out;
  }
  // Drive any artificial still basic (at zero level) out of the basis.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.at(r, j)) > kPivotTol) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }
  // Artificial columns are excluded from entering during phase two.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  tab.set_objective(phase2);
  if (!tab.optimize(n)) {
    out.status = Status::kUnbounded;
    return out;
  }
  out.status = Status::kOptimal;
  out.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    const int col = tab.basis()[r];
    if (col < n) out.x(col) = tab.rhs(r);
  }
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace lp
}  // namespace cgame
