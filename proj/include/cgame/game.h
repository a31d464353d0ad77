#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cgame/costs.h"
#include "cgame/dynamics.h"
#include "cgame/geometry.h"
#include "cgame/solver.h"

namespace cgame {

struct MinimizerDecision {
  int branch = 0;
  bool stop = false;
};

/// Minimizer's per-step rule: announces the branch and whether to stop.
using MinimizerPolicy = std::function<MinimizerDecision(double t, const Eigen::VectorXd& x)>;

/// Open-loop minimizer control: branch schedule k(t) and stop time tau.
struct MinimizerControl {
  std::vector<double> breakpoints;  // branches[q] applies from breakpoints[q]
  std::vector<int> branches;
  std::optional<double> stop_time;

  static MinimizerControl constant(int branch, std::optional<double> stop = {});
  int branch_at(double t) const;
  MinimizerPolicy as_policy() const;
};

/// Maximizer's response rule. It sees only the current time, state and the
/// branch the minimizer announced for this step, so it is nonanticipating by
/// construction.
using MaximizerStrategy =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x, int branch)>;

enum class Outcome { kHitOrigin, kStopped, kHorizon };
const char* to_string(Outcome o);

struct GameRollout {
  SampledPath path;
  std::vector<int> branches;               // per step
  std::vector<Eigen::VectorXd> velocities; // per step
  std::vector<double> running;             // per step: -dt L_k(beta)
  double final_cost = 0.0;                 // g(tau, .) or f(phi(1)) or 0
  double cost = 0.0;
  Outcome outcome = Outcome::kHorizon;
  double event_time = 0.0;                 // sigma, tau or 1
};

/// Plays one discrete-time round of the upper game from (t0, x0) with step dt
/// up to t = 1. Throws kInadmissibleVelocity when the strategy returns a
/// velocity with infinite running cost for the announced branch.
GameRollout rollout(const ConstraintGeometry& g, const CostFamily& f,
                    const FiniteProblem& problem, const MaximizerStrategy& strategy,
                    const MinimizerPolicy& minimizer, const Eigen::VectorXd& x0,
                    double t0, double dt);

/// Recorded decisions of a solve, per slice and node.
struct FeedbackTables {
  int branch_count = 1;
  std::vector<std::vector<int>> branch;
  std::vector<std::vector<std::uint8_t>> stop;
  std::vector<std::vector<Eigen::VectorXd>> response;  // [slice][node * J + j]
};

FeedbackTables extract_policy(const ValueField& v, const CostFamily& f,
                              const CandidateOptions& opts = {});

/// One-step lookahead on a solved finite-horizon field. At grid nodes these
/// reproduce the solver's recorded decisions (same tie-breaks); off the grid
/// they act on the interpolated value.
class ValueGreedyPlayers {
 public:
  ValueGreedyPlayers(const ConstraintGeometry& g, const CostFamily& f,
                     const FiniteProblem& problem, const ValueField& v,
                     const CandidateOptions& opts = {});

  MinimizerPolicy minimizer() const;
  MaximizerStrategy maximizer() const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

struct PlayReport {
  double value = 0.0;     // V(t0, x0) interpolated from the field
  double realized = 0.0;  // cost of the greedy-vs-greedy play
  GameRollout rollout;
};

/// Plays the extracted minimizer against the value-greedy maximizer.
/// dt <= 0 uses the field's time step.
PlayReport evaluate_value_by_play(const ConstraintGeometry& g, const CostFamily& f,
                                  const FiniteProblem& problem, const ValueField& v,
                                  const Eigen::VectorXd& x0, double t0,
                                  double dt = 0.0, const CandidateOptions& opts = {});

/// Seeded heuristic opponents for sandwich tests.
MinimizerControl random_minimizer_control(int branch_count, double t0,
                                          std::uint64_t seed);
MaximizerStrategy random_maximizer_strategy(const CostFamily& f, std::uint64_t seed,
                                            const CandidateOptions& opts = {});

}  // namespace cgame
