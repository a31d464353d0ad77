#include "cgame/grid.h"

#include <cmath>
#include <string>

#include "cgame/error.h"

namespace cgame {

OrthantGrid::OrthantGrid(int dim, double x_max, int nodes_per_axis,
                         std::size_t budget)
    : dim_(dim), x_max_(x_max), n_(nodes_per_axis) {
  if (dim < 1 || dim > 16) {
    throw Error(ErrorCode::kInvalidArgument, "grid dimension must be in [1, 16]");
  }
  if (nodes_per_axis < 3) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs n >= 3 nodes per axis");
  }
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs x_max > 0");
  }
  h_ = x_max / (n_ - 1);
  size_ = 1;
  for (int i = 0; i < dim_; ++i) {
    strides_.push_back(size_);
    if (size_ > budget / static_cast<std::size_t>(n_)) {
      throw Error(ErrorCode::kGridBudgetExceeded,
                  std::to_string(n_) + "^" + std::to_string(dim_) +
                      " nodes exceed the budget of " + std::to_string(budget));
    }
    size_ *= static_cast<std::size_t>(n_);
  }
  if (size_ > budget) {
    throw Error(ErrorCode::kGridBudgetExceeded, "grid exceeds node budget");
  }
  corners_.resize(std::size_t{1} << dim_);
  for (std::size_t mask = 0; mask < corners_.size(); ++mask) {
    std::size_t off = 0;
    for (int i = 0; i < dim_; ++i) {
      if (mask & (std::size_t{1} << i)) off += strides_[i];
    }
    corners_[mask] = off;
  }
}

Eigen::VectorXd OrthantGrid::point(std::size_t node) const {
  Eigen::VectorXd x(dim_);
  for (int i = 0; i < dim_; ++i) x(i) = coordinate_index(node, i) * h_;
  return x;
}

OrthantGrid::Cell OrthantGrid::locate(const Eigen::VectorXd& x) const {
  Cell cell;
  cell.frac.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = x(i) / h_;
    if (s < 0.0) s = 0.0;
    if (x(i) > x_max_ * (1.0 + 1e-12)) cell.clamped = true;
    if (s >= n_ - 1) {
      cell.base += static_cast<std::size_t>(n_ - 2) * strides_[i];
      cell.frac[i] = 1.0;
      continue;
    }
    const int b = static_cast<int>(std::floor(s));
    double f = s - b;
    // Snap round-off so on-grid points interpolate exactly.
    if (f < 1e-12) f = 0.0;
    if (f > 1.0 - 1e-12) {
      if (b + 1 <= n_ - 2) {
        cell.base += static_cast<std::size_t>(b + 1) * strides_[i];
        cell.frac[i] = 0.0;
      } else {
        cell.base += static_cast<std::size_t>(b) * strides_[i];
        cell.frac[i] = 1.0;
      }
      continue;
    }
    cell.base += static_cast<std::size_t>(b) * strides_[i];
    cell.frac[i] = f;
  }
  return cell;
}

double OrthantGrid::interpolate(std::span<const double> values,
                                const Cell& cell) const {
  double acc = 0.0;
  for (std::size_t mask = 0; mask < corners_.size(); ++mask) {
    double w = 1.0;
    for (int i = 0; i < dim_ && w != 0.0; ++i) {
      w *= (mask & (std::size_t{1} << i)) ? cell.frac[i] : 1.0 - cell.frac[i];
    }
    if (w != 0.0) acc += w * values[cell.base + corners_[mask]];
  }
  return acc;
}

double OrthantGrid::interpolate(std::span<const double> values,
                                const Eigen::VectorXd& x, bool* clamped) const {
  const Cell cell = locate(x);
  if (clamped) *clamped = cell.clamped;
  return interpolate(values, cell);
}

}  // namespace cgame
