#include "cgame/dynamics.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cgame/error.h"
#include "cgame/io.h"

namespace cgame {

void SampledPath::validate() const {
  if (times.size() < 2 || times.size() != points.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sampled path needs >= 2 samples with matching times/points");
  }
  const Eigen::Index d = points.front().size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (points[k].size() != d) {
      throw Error(ErrorCode::kInvalidArgument, "sampled path has mixed dimensions");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "sampled path times must increase strictly");
    }
  }
}

SkorokhodSolution skorokhod_map(const ConstraintGeometry& g,
                                const SampledPath& psi, int substeps) {
  psi.validate();
  if (substeps < 1) throw Error(ErrorCode::kInvalidArgument, "substeps must be >= 1");
  const int d = g.dim();
  if (psi.dim() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "skorokhod_map: path dimension");
  }
  if ((psi.points.front().array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "skorokhod_map: psi(0) must lie in the orthant");
  }

  SkorokhodSolution out;
  const std::size_t total = (psi.size() - 1) * substeps + 1;
  out.phi.times.reserve(total);
  out.phi.points.reserve(total);
  out.eta.times.reserve(total);
  out.eta.points.reserve(total);
  out.total_variation.reserve(total);
  out.coefficients.reserve(total - 1);

  Eigen::VectorXd phi = psi.points.front();
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(d);
  double tv = 0.0;
  auto record = [&](double t) {
    out.phi.times.push_back(t);
    out.phi.points.push_back(phi);
    out.eta.times.push_back(t);
    out.eta.points.push_back(eta);
    out.total_variation.push_back(tv);
  };
  record(psi.times.front());

  // phi_{k+1} = pi(phi_k + dpsi_k) written as pi(psi_{k+1} + eta_k), so a path
  // that never touches the boundary is reproduced exactly.
  for (std::size_t seg = 0; seg + 1 < psi.size(); ++seg) {
    const double t0 = psi.times[seg], t1 = psi.times[seg + 1];
    const Eigen::VectorXd& p0 = psi.points[seg];
    const Eigen::VectorXd& p1 = psi.points[seg + 1];
    for (int s = 1; s <= substeps; ++s) {
      const Eigen::VectorXd target =
          s == substeps ? Eigen::VectorXd(p1 + eta)
                        : Eigen::VectorXd(p0 + (p1 - p0) * (double(s) / substeps) + eta);
      const ProjectionResult pr = project(g, target);
      const Eigen::VectorXd push = g.gamma() * pr.a;
      phi = pr.z;
      eta += push;
      tv += push.norm();
      out.coefficients.push_back(pr.a);
      const double t = (s == substeps) ? t1 : t0 + (t1 - t0) * s / substeps;
      record(t);
    }
  }
  return out;
}

PiecewiseConstantControl PiecewiseConstantControl::constant(Eigen::VectorXd v) {
  PiecewiseConstantControl c;
  c.breakpoints = {0.0};
  c.velocities = {std::move(v)};
  return c;
}

const Eigen::VectorXd& PiecewiseConstantControl::at(double t) const {
  if (velocities.empty() || velocities.size() != breakpoints.size()) {
    throw Error(ErrorCode::kInvalidArgument, "control needs one velocity per breakpoint");
  }
  std::size_t k = 0;
  while (k + 1 < breakpoints.size() && t >= breakpoints[k + 1]) ++k;
  return velocities[k];
}

OdeSolution integrate_ode(const ConstraintGeometry& g, const Eigen::VectorXd& x0,
                          const PiecewiseConstantControl& beta, double t1,
                          double dt) {
  if (!(dt > 0.0) || !(t1 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_ode needs dt > 0 and t1 > 0");
  }
  if (x0.size() != g.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "integrate_ode: x0 dimension");
  }
  if ((x0.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_ode: x0 must lie in the orthant");
  }
  OdeSolution out;
  Eigen::VectorXd phi = x0;
  double t = 0.0;
  out.path.times.push_back(t);
  out.path.points.push_back(phi);
  if (phi.lpNorm<1>() <= kAbsorptionTol) out.hit_time = 0.0;
  const long steps = static_cast<long>(std::ceil(t1 / dt - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double next = std::min(t1, (k + 1) * dt);
    const double h = next - t;
    phi = project(g, phi + h * beta.at(t)).z;
    t = next;
    out.path.times.push_back(t);
    out.path.points.push_back(phi);
    if (!out.hit_time && phi.lpNorm<1>() <= kAbsorptionTol) out.hit_time = t;
  }
  return out;
}

void write_path_csv(std::ostream& os, const SampledPath& path) {
  const int d = path.dim();
  os << "t";
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  os << "\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    os << format_double(path.times[k]);
    for (int i = 0; i < d; ++i) os << ',' << format_double(path.points[k](i));
    os << "\n";
  }
}

void write_path_csv(const std::string& file, const SampledPath& path) {
  std::ofstream os(file);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + file);
  write_path_csv(os, path);
}

SampledPath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kParse, "empty path CSV");
  const auto header = split_csv_line(line);
  if (header.empty() || header.front() != "t") {
    throw Error(ErrorCode::kParse, "path CSV header must start with 't'");
  }
  const int d = static_cast<int>(header.size()) - 1;
  SampledPath path;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != d + 1) {
      throw Error(ErrorCode::kParse, "path CSV row has wrong column count");
    }
    path.times.push_back(parse_double(cells[0]));
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p(i) = parse_double(cells[i + 1]);
    path.points.push_back(std::move(p));
  }
  return path;
}

SampledPath read_path_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + file);
  return read_path_csv(is);
}

}  // namespace cgame
