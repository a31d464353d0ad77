#include "cgame/game.h"

#include <cmath>
#include <limits>
#include <random>

#include "cgame/error.h"

namespace cgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kHitOrigin: return "hit_origin";
    case Outcome::kStopped: return "stopped";
    case Outcome::kHorizon: return "horizon";
  }
  return "unknown";
}

MinimizerControl MinimizerControl::constant(int branch, std::optional<double> stop) {
  MinimizerControl c;
  c.breakpoints = {0.0};
  c.branches = {branch};
  c.stop_time = stop;
  return c;
}

int MinimizerControl::branch_at(double t) const {
  if (branches.empty() || branches.size() != breakpoints.size()) {
    throw Error(ErrorCode::kInvalidArgument, "branch schedule needs one branch per breakpoint");
  }
  std::size_t q = 0;
  while (q + 1 < breakpoints.size() && t >= breakpoints[q + 1] - 1e-12) ++q;
  return branches[q];
}

MinimizerPolicy MinimizerControl::as_policy() const {
  MinimizerControl copy = *this;
  return [copy](double t, const Eigen::VectorXd&) {
    MinimizerDecision d;
    d.branch = copy.branch_at(t);
    d.stop = copy.stop_time && t >= *copy.stop_time - 1e-12;
    return d;
  };
}

GameRollout rollout(const ConstraintGeometry& g, const CostFamily& f,
                    const FiniteProblem& problem, const MaximizerStrategy& strategy,
                    const MinimizerPolicy& minimizer, const Eigen::VectorXd& x0,
                    double t0, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rollout needs dt > 0");
  if (x0.size() != g.dim() || f.dim() != g.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "rollout: dimensions disagree");
  }
  if ((x0.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "rollout: x0 must lie in the orthant");
  }
  if (t0 < 0.0 || t0 > 1.0) throw Error(ErrorCode::kInvalidArgument, "rollout: t0 in [0, 1]");

  GameRollout out;
  const long steps = std::lround((1.0 - t0) / dt);
  Eigen::VectorXd x = x0;
  out.path.times.push_back(t0);
  out.path.points.push_back(x);
  for (long k = 0;; ++k) {
    const double t = (k == steps) ? 1.0 : t0 + k * dt;
    if (x.lpNorm<1>() <= kAbsorptionTol) {
      out.outcome = Outcome::kHitOrigin;
      out.event_time = t;
      break;
    }
    if (k == steps) {
      out.outcome = Outcome::kHorizon;
      out.event_time = 1.0;
      out.final_cost = problem.terminal(x);
      break;
    }
    const MinimizerDecision dec = minimizer(t, x);
    if (dec.branch < 0 || dec.branch >= f.size()) {
      throw Error(ErrorCode::kInvalidArgument, "minimizer chose a nonexistent branch");
    }
    if (dec.stop) {
      out.outcome = Outcome::kStopped;
      out.event_time = t;
      out.final_cost = problem.stopping(t, x);
      break;
    }
    const Eigen::VectorXd beta = strategy(t, x, dec.branch);
    const double L = running_cost(f.branch(dec.branch), beta);
    if (!std::isfinite(L)) {
      throw Error(ErrorCode::kInadmissibleVelocity,
                  "maximizer velocity is outside branch '" + f.branch(dec.branch).label + "'");
    }
    out.branches.push_back(dec.branch);
    out.velocities.push_back(beta);
    out.running.push_back(-dt * L);
    x = project(g, x + dt * beta).z;
    out.path.times.push_back(k + 1 == steps ? 1.0 : t0 + (k + 1) * dt);
    out.path.points.push_back(x);
  }
  double total = 0.0;
  for (double r : out.running) total += r;
  out.cost = total + out.final_cost;
  return out;
}

FeedbackTables extract_policy(const ValueField& v, const CostFamily& f,
                              const CandidateOptions& opts) {
  if (v.branch_count != f.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "field and cost family disagree on J");
  }
  std::vector<std::vector<Candidate>> cands;
  for (const CostBranch& b : f.branches()) cands.push_back(candidate_set(b, opts));
  FeedbackTables out;
  out.branch_count = f.size();
  out.branch = v.branch;
  out.stop = v.stop;
  out.response.resize(v.response.size());
  const std::size_t J = f.size();
  for (std::size_t k = 0; k < v.response.size(); ++k) {
    out.response[k].resize(v.response[k].size());
    for (std::size_t e = 0; e < v.response[k].size(); ++e) {
      out.response[k][e] = cands[e % J][v.response[k][e]].velocity;
    }
  }
  return out;
}

struct ValueGreedyPlayers::State {
  ConstraintGeometry geometry;
  CostFamily family;
  FiniteProblem problem;
  const ValueField* field;
  std::vector<std::vector<Candidate>> candidates;

  int slice_of(double t) const {
    const double dt = field->time_step();
    const int k = static_cast<int>(std::lround(t / dt));
    return std::clamp(k, 0, field->slices() - 1);
  }

  // Returns (value, argmax index) of max_c [-dt L + V_{k+1}(pi(x + dt beta))].
  std::pair<double, int> best_response(int k, const Eigen::VectorXd& x, int j) const {
    const double dt = field->time_step();
    const int next = std::min(k + 1, field->slices() - 1);
    double best = -kInf;
    int arg = 0;
    const auto& cs = candidates[j];
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const Eigen::VectorXd target = project(geometry, x + dt * cs[c].velocity).z;
      const double val = -dt * cs[c].running_cost + field->value_at(next, target);
      if (val > best) {
        best = val;
        arg = static_cast<int>(c);
      }
    }
    return {best, arg};
  }
};

ValueGreedyPlayers::ValueGreedyPlayers(const ConstraintGeometry& g,
                                       const CostFamily& f,
                                       const FiniteProblem& problem,
                                       const ValueField& v,
                                       const CandidateOptions& opts) {
  if (v.stationary) {
    throw Error(ErrorCode::kInvalidArgument, "greedy play needs a finite-horizon field");
  }
  auto s = std::make_shared<State>(State{g, f, problem, &v, {}});
  for (const CostBranch& b : f.branches()) s->candidates.push_back(candidate_set(b, opts));
  state_ = std::move(s);
}

MinimizerPolicy ValueGreedyPlayers::minimizer() const {
  auto s = state_;
  return [s](double t, const Eigen::VectorXd& x) {
    const int k = s->slice_of(t);
    MinimizerDecision dec;
    double best = kInf;
    for (int j = 0; j < s->family.size(); ++j) {
      const double val = s->best_response(k, x, j).first;
      if (val < best) {
        best = val;
        dec.branch = j;
      }
    }
    dec.stop = s->problem.stopping(t, x) <= best;
    return dec;
  };
}

MaximizerStrategy ValueGreedyPlayers::maximizer() const {
  auto s = state_;
  return [s](double t, const Eigen::VectorXd& x, int branch) {
    const int k = s->slice_of(t);
    return s->candidates[branch][s->best_response(k, x, branch).second].velocity;
  };
}

PlayReport evaluate_value_by_play(const ConstraintGeometry& g, const CostFamily& f,
                                  const FiniteProblem& problem, const ValueField& v,
                                  const Eigen::VectorXd& x0, double t0, double dt,
                                  const CandidateOptions& opts) {
  const ValueGreedyPlayers players(g, f, problem, v, opts);
  PlayReport rep;
  const double step = dt > 0.0 ? dt : v.time_step();
  const int k = std::clamp(static_cast<int>(std::lround(t0 / v.time_step())), 0,
                           v.slices() - 1);
  rep.value = v.value_at(k, x0);
  rep.rollout = rollout(g, f, problem, players.maximizer(), players.minimizer(), x0,
                        t0, step);
  rep.realized = rep.rollout.cost;
  return rep;
}

MinimizerControl random_minimizer_control(int branch_count, double t0,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, branch_count - 1);
  MinimizerControl c;
  const int pieces = 1 + static_cast<int>(rng() % 4);
  std::vector<double> cuts;
  for (int q = 1; q < pieces; ++q) cuts.push_back(t0 + (1.0 - t0) * unit(rng));
  std::sort(cuts.begin(), cuts.end());
  c.breakpoints.push_back(t0);
  c.branches.push_back(pick(rng));
  for (double cut : cuts) {
    c.breakpoints.push_back(cut);
    c.branches.push_back(pick(rng));
  }
  if (unit(rng) < 0.6) c.stop_time = t0 + (1.0 - t0) * unit(rng);
  return c;
}

MaximizerStrategy random_maximizer_strategy(const CostFamily& f, std::uint64_t seed,
                                            const CandidateOptions& opts) {
  auto cands = std::make_shared<std::vector<std::vector<Candidate>>>();
  for (const CostBranch& b : f.branches()) cands->push_back(candidate_set(b, opts));
  return [cands, seed](double t, const Eigen::VectorXd&, int branch) {
    const auto& cs = (*cands)[branch];
    const std::uint64_t tick = static_cast<std::uint64_t>(std::llround(t * 1e9));
    const std::uint64_t r = splitmix64(seed ^ splitmix64(tick * 31 + branch));
    return cs[r % cs.size()].velocity;
  };
}

}  // namespace cgame
