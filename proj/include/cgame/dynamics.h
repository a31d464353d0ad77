#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgame/geometry.h"

namespace cgame {

/// Time-stamped sequence of points in R^d.
struct SampledPath {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  std::size_t size() const { return times.size(); }

  /// Throws kInvalidArgument unless length >= 2, times strictly increase and
  /// all points share one dimension.
  void validate() const;
};

struct SkorokhodSolution {
  SampledPath phi;                     // constrained path
  SampledPath eta;                     // pushing term, phi = psi + eta
  std::vector<double> total_variation; // |eta|(t_k), nondecreasing
  // Per-step cone coefficients: eta_{k+1} - eta_k = gamma * coefficients[k].
  std::vector<Eigen::VectorXd> coefficients;
};

/// Projected-Euler discretization of the Skorokhod map. Each input segment is
/// split into `substeps` linear pieces and phi_{k+1} = pi(phi_k + dpsi_k).
SkorokhodSolution skorokhod_map(const ConstraintGeometry& g,
                                const SampledPath& psi, int substeps);

/// Piecewise-constant control: velocities[k] applies on
/// [breakpoints[k], breakpoints[k+1]); the last velocity holds thereafter.
struct PiecewiseConstantControl {
  std::vector<double> breakpoints;
  std::vector<Eigen::VectorXd> velocities;

  static PiecewiseConstantControl constant(Eigen::VectorXd v);
  const Eigen::VectorXd& at(double t) const;
};

inline constexpr double kAbsorptionTol = 1e-6;

struct OdeSolution {
  SampledPath path;
  std::optional<double> hit_time;  // first t with |phi|_1 <= kAbsorptionTol
};

/// Explicit Euler with per-step projection for phi' = pi(phi, beta(t)) on
/// [0, t1]. Steps of size dt; a final short step lands exactly on t1.
OdeSolution integrate_ode(const ConstraintGeometry& g, const Eigen::VectorXd& x0,
                          const PiecewiseConstantControl& beta, double t1,
                          double dt);

// CSV with header t,x1,...,xd. Doubles use shortest round-trip formatting.
void write_path_csv(std::ostream& os, const SampledPath& path);
void write_path_csv(const std::string& file, const SampledPath& path);
SampledPath read_path_csv(std::istream& is);
SampledPath read_path_csv(const std::string& file);

}  // namespace cgame
