#pragma once

#include <Eigen/Dense>

namespace cgame {
namespace lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

// Minimizes c'x subject to A x = b, x >= 0 with a dense two-phase tableau
// simplex and Bland's rule. Intended for the tiny programs that arise in
// geometry and cost membership checks (tens of rows at most).
Solution minimize_standard_form(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b,
                                const Eigen::VectorXd& c);

}  // namespace lp
}  // namespace cgame
