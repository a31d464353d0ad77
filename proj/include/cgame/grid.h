#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cgame {

inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

/// Uniform tensor grid on [0, x_max]^d with n nodes per axis. Node 0 is the
/// origin; axis 0 varies fastest.
class OrthantGrid {
 public:
  /// Throws kInvalidArgument for n < 3, x_max <= 0 or d < 1, and
  /// kGridBudgetExceeded when n^d exceeds `budget`.
  OrthantGrid(int dim, double x_max, int nodes_per_axis,
              std::size_t budget = kDefaultNodeBudget);

  int dim() const { return dim_; }
  double x_max() const { return x_max_; }
  int nodes_per_axis() const { return n_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  Eigen::VectorXd point(std::size_t node) const;
  int coordinate_index(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[axis]) % n_);
  }

  /// Multilinear interpolation cell for x: lower-corner node and per-axis
  /// fractions. Coordinates above x_max are clamped (constant extrapolation)
  /// and reported.
  struct Cell {
    std::size_t base = 0;
    std::vector<double> frac;
    bool clamped = false;
  };
  Cell locate(const Eigen::VectorXd& x) const;

  double interpolate(std::span<const double> values, const Cell& cell) const;
  double interpolate(std::span<const double> values, const Eigen::VectorXd& x,
                     bool* clamped = nullptr) const;

  /// Offsets of the 2^d cell corners relative to the lower corner.
  const std::vector<std::size_t>& corner_offsets() const { return corners_; }

 private:
  int dim_;
  double x_max_;
  int n_;
  double h_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> corners_;
};

}  // namespace cgame
