#include "cgame/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "cgame/error.h"

namespace cgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Euler targets pi(x + dt beta) for every (node, candidate), located on the
// grid once: candidates do not depend on time, so every slice and sweep reuses
// the same interpolation cells.
struct TransitionTable {
  int dim = 0;
  int branches = 0;
  std::vector<int> offset;   // candidate range of branch j: [offset[j], offset[j+1])
  std::vector<double> gain;  // -dt L_j(beta) per candidate
  std::size_t per_node = 0;
  std::vector<std::size_t> base;
  std::vector<double> frac;
  std::vector<std::uint8_t> node_clamped;
  std::size_t clamped = 0;
  std::size_t total = 0;

  double interpolate(const OrthantGrid& grid, const std::vector<double>& v,
                     std::size_t entry) const {
    const double* fr = &frac[entry * dim];
    const std::size_t b = base[entry];
    const auto& corners = grid.corner_offsets();
    double acc = 0.0;
    for (std::size_t mask = 0; mask < corners.size(); ++mask) {
      double w = 1.0;
      for (int i = 0; i < dim && w != 0.0; ++i) {
        w *= (mask & (std::size_t{1} << i)) ? fr[i] : 1.0 - fr[i];
      }
      if (w != 0.0) acc += w * v[b + corners[mask]];
    }
    return acc;
  }
};

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int workers = std::max(1, threads);
  if (workers == 1 || count < 1024) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void require_solvable(const ConstraintGeometry& g, const CostFamily& f,
                      const OrthantGrid& grid) {
  if (g.dim() != f.dim() || g.dim() != grid.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "geometry, costs and grid must share one dimension");
  }
  if (!check_completely_s(g)) {
    throw Error(ErrorCode::kGeometryUnverified,
                "constraint directions fail the completely-S condition");
  }
}

TransitionTable build_table(const ConstraintGeometry& g, const CostFamily& f,
                            const OrthantGrid& grid, double dt,
                            const CandidateOptions& copts, int threads) {
  TransitionTable tbl;
  tbl.dim = grid.dim();
  tbl.branches = f.size();
  std::vector<Eigen::VectorXd> velocities;
  tbl.offset.push_back(0);
  for (const CostBranch& b : f.branches()) {
    for (const Candidate& c : candidate_set(b, copts)) {
      velocities.push_back(c.velocity);
      tbl.gain.push_back(-dt * c.running_cost);
    }
    tbl.offset.push_back(static_cast<int>(velocities.size()));
  }
  tbl.per_node = velocities.size();
  const std::size_t entries = grid.size() * tbl.per_node;
  tbl.base.assign(entries, 0);
  tbl.frac.assign(entries * tbl.dim, 0.0);
  tbl.node_clamped.assign(grid.size(), 0);
  std::vector<std::uint8_t> entry_clamped(entries, 0);
  parallel_for(grid.size(), threads, [&](std::size_t node) {
    if (node == 0) return;
    const Eigen::VectorXd x = grid.point(node);
    for (std::size_t c = 0; c < tbl.per_node; ++c) {
      const Eigen::VectorXd target = project(g, x + dt * velocities[c]).z;
      const OrthantGrid::Cell cell = grid.locate(target);
      const std::size_t e = node * tbl.per_node + c;
      tbl.base[e] = cell.base;
      std::copy(cell.frac.begin(), cell.frac.end(), tbl.frac.begin() + e * tbl.dim);
      if (cell.clamped) {
        entry_clamped[e] = 1;
        tbl.node_clamped[node] = 1;
      }
    }
  });
  tbl.clamped = static_cast<std::size_t>(
      std::count(entry_clamped.begin(), entry_clamped.end(), std::uint8_t{1}));
  tbl.total = (grid.size() - 1) * tbl.per_node;
  return tbl;
}

struct NodeDecision {
  double value = kInf;
  int branch = 0;
};

// min_j max_{c in branch j} [gain_c + V(target)], recording the argmax per
// branch into `response` (length J) when given.
NodeDecision decide(const TransitionTable& tbl, const OrthantGrid& grid,
                    const std::vector<double>& next, std::size_t node,
                    int* response) {
  NodeDecision out;
  for (int j = 0; j < tbl.branches; ++j) {
    double best = -kInf;
    int arg = 0;
    for (int c = tbl.offset[j]; c < tbl.offset[j + 1]; ++c) {
      const double val =
          tbl.gain[c] + tbl.interpolate(grid, next, node * tbl.per_node + c);
      if (val > best) {
        best = val;
        arg = c - tbl.offset[j];
      }
    }
    if (response) response[j] = arg;
    if (best < out.value) out = {best, j};
  }
  return out;
}

void fill_clamp_stats(const TransitionTable& tbl, double warn, SolveStats* s) {
  s->targets = tbl.total;
  s->clamped_targets = tbl.clamped;
  s->clamp_fraction = tbl.total ? static_cast<double>(tbl.clamped) / tbl.total : 0.0;
  s->domain_escape = s->clamp_fraction > warn;
}

}  // namespace

FiniteProblem time_to_go_problem(double scale) {
  return FiniteProblem{
      [scale](double t, const Eigen::VectorXd&) { return scale * (1.0 - t); },
      [](const Eigen::VectorXd&) { return 0.0; }};
}

double default_mintime_step(const CostFamily& f, const OrthantGrid& grid) {
  double speed = 0.0;
  for (const CostBranch& b : f.branches()) {
    for (const Candidate& c : candidate_set(b)) {
      speed = std::max(speed, c.velocity.cwiseAbs().maxCoeff());
    }
  }
  return speed > 0.0 ? grid.spacing() / speed : grid.spacing();
}

ValueField solve_finite(const ConstraintGeometry& g, const CostFamily& f,
                        const OrthantGrid& grid, int time_steps,
                        const FiniteProblem& problem, const SolverOptions& opts) {
  require_solvable(g, f, grid);
  if (time_steps < 1) throw Error(ErrorCode::kInvalidArgument, "need N >= 1 time steps");
  if (!problem.stopping || !problem.terminal) {
    throw Error(ErrorCode::kInvalidArgument, "stopping and terminal costs are required");
  }
  const std::size_t nodes = grid.size();
  for (std::size_t node = 1; node < nodes; ++node) {
    const Eigen::VectorXd x = grid.point(node);
    const double fx = problem.terminal(x), gx = problem.stopping(1.0, x);
    if (std::abs(fx - gx) > 1e-12 * (1.0 + std::abs(fx))) {
      throw Error(ErrorCode::kIncompatibleData,
                  "terminal cost must equal the stopping cost at t = 1");
    }
  }

  const double dt = 1.0 / time_steps;
  const TransitionTable tbl = build_table(g, f, grid, dt, opts.candidates, opts.threads);
  const int J = f.size();

  ValueField field(grid);
  field.stationary = false;
  field.branch_count = J;
  field.times.resize(time_steps + 1);
  for (int k = 0; k <= time_steps; ++k) field.times[k] = static_cast<double>(k) / time_steps;
  field.values.assign(time_steps + 1, std::vector<double>(nodes, 0.0));
  field.branch.assign(time_steps + 1, std::vector<int>(nodes, 0));
  field.stop.assign(time_steps + 1, std::vector<std::uint8_t>(nodes, 0));
  field.response.assign(time_steps + 1, std::vector<int>(nodes * J, 0));
  field.clamped = tbl.node_clamped;

  std::vector<double>& terminal = field.values[time_steps];
  for (std::size_t node = 1; node < nodes; ++node) terminal[node] = problem.terminal(grid.point(node));

  for (int k = time_steps - 1; k >= 0; --k) {
    const double t = field.times[k];
    const std::vector<double>& next = field.values[k + 1];
    std::vector<double>& cur = field.values[k];
    std::vector<int>& br = field.branch[k];
    std::vector<std::uint8_t>& st = field.stop[k];
    std::vector<int>& resp = field.response[k];
    parallel_for(nodes, opts.threads, [&](std::size_t node) {
      if (node == 0) {
        cur[0] = 0.0;
        return;
      }
      const NodeDecision dec = decide(tbl, grid, next, node, &resp[node * J]);
      const double stop_cost = problem.stopping(t, grid.point(node));
      br[node] = dec.branch;
      if (stop_cost <= dec.value) {
        cur[node] = stop_cost;
        st[node] = 1;
      } else {
        cur[node] = dec.value;
        st[node] = 0;
      }
    });
  }
  field.stats.iterations = time_steps;
  field.stats.dt = dt;
  fill_clamp_stats(tbl, opts.domain_escape_fraction, &field.stats);
  return field;
}

ValueField solve_mintime(const ConstraintGeometry& g, const CostFamily& f,
                         const OrthantGrid& grid, const MintimeOptions& opts) {
  if (!f.satisfies_condition_4_1()) {
    throw Error(ErrorCode::kNotCondition41,
                "min-time solve needs indicator-type costs; risk-sensitive branches are unsupported");
  }
  require_solvable(g, f, grid);
  if (!(opts.v_max > 0.0) || !(opts.tol > 0.0) || opts.max_sweeps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min-time options must be positive");
  }
  const double dt = opts.dt > 0.0 ? opts.dt : default_mintime_step(f, grid);
  const TransitionTable tbl = build_table(g, f, grid, dt, {}, opts.threads);
  const int J = f.size();
  const std::size_t nodes = grid.size();

  ValueField field(grid);
  field.stationary = true;
  field.branch_count = J;
  field.times = {0.0};
  field.v_max = opts.v_max;
  field.values.assign(1, std::vector<double>(nodes, opts.v_max));
  field.values[0][0] = 0.0;
  field.branch.assign(1, std::vector<int>(nodes, 0));
  field.stop.assign(1, std::vector<std::uint8_t>(nodes, 0));
  field.response.assign(1, std::vector<int>(nodes * J, 0));
  field.clamped = tbl.node_clamped;

  std::vector<double>& w = field.values[0];
  std::vector<int>& br = field.branch[0];
  std::vector<int>& resp = field.response[0];
  auto update = [&](const std::vector<double>& src, std::size_t node) {
    const NodeDecision dec = decide(tbl, grid, src, node, &resp[node * J]);
    br[node] = dec.branch;
    return std::min(opts.v_max, dec.value);
  };

  bool converged = false;
  double change = kInf;
  int sweep = 0;
  std::vector<double> scratch;
  for (; sweep < opts.max_sweeps && !converged; ++sweep) {
    change = 0.0;
    if (opts.sweep == SweepMode::kJacobi) {
      scratch = w;
      parallel_for(nodes, opts.threads, [&](std::size_t node) {
        if (node != 0) scratch[node] = update(w, node);
      });
      for (std::size_t node = 1; node < nodes; ++node) {
        change = std::max(change, std::abs(scratch[node] - w[node]));
      }
      w.swap(scratch);
    } else {
      const bool forward =
          (sweep % 2 == 0) == (opts.sweep == SweepMode::kGaussSeidelForwardFirst);
      for (std::size_t q = 0; q < nodes; ++q) {
        const std::size_t node = forward ? q : nodes - 1 - q;
        if (node == 0) continue;
        const double nv = update(w, node);
        change = std::max(change, std::abs(nv - w[node]));
        w[node] = nv;
      }
    }
    converged = change < opts.tol;
  }

  field.stats.converged = converged;
  field.stats.iterations = sweep;
  field.stats.final_change = change;
  field.stats.dt = dt;
  for (std::size_t node = 1; node < nodes; ++node) {
    if (w[node] >= opts.v_max - 1e-12) ++field.stats.capped_nodes;
  }
  fill_clamp_stats(tbl, opts.domain_escape_fraction, &field.stats);
  return field;
}

double radial_extend(const ValueField& v, const Eigen::VectorXd& x) {
  if (!v.stationary) {
    throw Error(ErrorCode::kInvalidArgument, "radial_extend needs a stationary field");
  }
  if (x.size() != v.grid.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "radial_extend: point dimension");
  }
  const double s = x.cwiseAbs().maxCoeff() / (0.5 * v.grid.x_max());
  if (s <= 1.0) return v.value_at(0, x);
  return s * v.value_at(0, x / s);
}

}  // namespace cgame
