#include "cli_commands.h"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgame/config.h"
#include "cgame/error.h"
#include "cgame/field_io.h"
#include "cgame/game.h"
#include "cgame/presets.h"
#include "cgame/solver.h"
#include "cgame/verify.h"

namespace cgame::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Consistency band for greedy play and the heuristic-opponent sandwich.
constexpr double kPlayTolerance = 0.05;
constexpr double kSandwichTolerance = 0.08;
constexpr double kTimeToGoTolerance = 0.03;
constexpr int kHeuristicOpponents = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kGeometryUnverified:
    case ErrorCode::kNoSolution:
      return kExitGeometry;
    case ErrorCode::kNotCondition41:
      return kExitUnsupported;
    case ErrorCode::kIo:
      return kExitMissingArtifact;
    default:
      return kExitParse;
  }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error (parse): " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RunConfig load(const std::string& path, const Overrides& ov) {
  RunConfig cfg = load_config(path);
  if (ov.nodes_per_axis) {
    if (*ov.nodes_per_axis < 3) throw Error(ErrorCode::kParse, "--n must be at least 3");
    cfg.grid.nodes_per_axis = *ov.nodes_per_axis;
    cfg.source["grid"]["n"] = *ov.nodes_per_axis;
  }
  if (ov.threads) {
    if (*ov.threads < 1) throw Error(ErrorCode::kParse, "--threads must be positive");
    cfg.threads = *ov.threads;
  }
  return cfg;
}

json geometry_report_json(const GeometryReport& r) {
  return json{{"independent", to_string(r.independent)},
              {"completely_s", to_string(r.completely_s)},
              {"contraction_proxy", to_string(r.contraction_proxy)},
              {"contraction_bound", r.contraction_bound},
              {"acceptable", r.acceptable()}};
}

json stats_json(const SolveStats& s) {
  return json{{"converged", s.converged},
              {"iterations", s.iterations},
              {"final_change", s.final_change},
              {"dt", s.dt},
              {"targets", s.targets},
              {"clamped_targets", s.clamped_targets},
              {"clamp_fraction", s.clamp_fraction},
              {"domain_escape", s.domain_escape},
              {"capped_nodes", s.capped_nodes}};
}

json rollout_json(const GameRollout& r) {
  return json{{"outcome", to_string(r.outcome)},
              {"event_time", r.event_time},
              {"cost", r.cost},
              {"final_cost", r.final_cost},
              {"steps", r.branches.size()},
              {"branches", r.branches},
              {"running", r.running}};
}

void write_rollout(const fs::path& dir, const std::string& stem, const GameRollout& r) {
  write_path_csv((dir / (stem + ".csv")).string(), r.path);
  std::ofstream os(dir / (stem + ".json"));
  if (!os) throw Error(ErrorCode::kIo, "cannot write rollout trace " + stem);
  os << rollout_json(r).dump(2) << '\n';
}

struct Model {
  ConstraintGeometry geometry;
  CostFamily family;
};

Model require_costs(const RunConfig& cfg) {
  ResolvedModel m = resolve_model(cfg);
  if (!m.family) throw Error(ErrorCode::kParse, "config defines no costs ('network' or 'cost')");
  return Model{std::move(m.geometry), std::move(*m.family)};
}

void require_geometry(const ConstraintGeometry& g) {
  if (!verify_geometry(g).acceptable()) {
    throw Error(ErrorCode::kGeometryUnverified,
                "reflection directions are not linearly independent and completely-S");
  }
}

void reject_risk_stationary(const CostFamily& f) {
  if (f.has_risk_sensitive()) {
    throw Error(ErrorCode::kNotCondition41,
                "stationary (min-time) solves are unsupported for risk-sensitive costs; "
                "use the finite-horizon solve");
  }
}

MintimeOptions mintime_options(const RunConfig& cfg) {
  MintimeOptions o = cfg.mintime;
  o.threads = cfg.threads;
  return o;
}

SolverOptions finite_options(const RunConfig& cfg) {
  SolverOptions o;
  o.threads = cfg.threads;
  o.candidates = cfg.candidates;
  return o;
}

}  // namespace

int cmd_check(const std::string& config_path, const Overrides& ov, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(config_path, ov);
    const ResolvedModel m = resolve_model(cfg);
    const GeometryReport r = verify_geometry(m.geometry);
    json report = geometry_report_json(r);
    report["dimension"] = m.geometry.dim();
    out << report.dump(2) << '\n';
    return r.acceptable() ? kExitOk : kExitGeometry;
  });
}

int cmd_solve(const std::string& config_path, const std::string& mode, const Overrides& ov,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(config_path, ov);
    const Model m = require_costs(cfg);
    const int d = m.geometry.dim();
    const bool stationary = mode == "mintime";
    if (!stationary && mode != "finite") throw Error(ErrorCode::kParse, "unknown mode " + mode);
    if (stationary) reject_risk_stationary(m.family);
    require_geometry(m.geometry);

    const OrthantGrid grid = make_grid(cfg, d);
    const ValueField field =
        stationary ? solve_mintime(m.geometry, m.family, grid, mintime_options(cfg))
                   : solve_finite(m.geometry, m.family, grid, cfg.horizon_steps,
                                  time_to_go_problem(cfg.stopping_scale), finite_options(cfg));

    const fs::path dir = fs::path(cfg.output_dir) / mode;
    fs::create_directories(dir);
    write_value_csv(field, (dir / "values.csv").string());

    json files{{"values", "values.csv"}};
    const Eigen::VectorXd probe = Eigen::VectorXd::Ones(d);
    json manifest{{"mode", mode},
                  {"dimension", d},
                  {"grid",
                   {{"x_max", grid.x_max()},
                    {"n", grid.nodes_per_axis()},
                    {"spacing", grid.spacing()},
                    {"nodes", grid.size()}}},
                  {"geometry", geometry_to_json(m.geometry)},
                  {"costs", cost_to_json(m.family)},
                  {"stats", stats_json(field.stats)},
                  {"clamp_fraction", field.stats.clamp_fraction}};
    if (stationary) {
      const auto pts = level_set_points(field, 0, 1.0);
      std::ofstream os(dir / "level_set.csv");
      write_points_csv(pts, d, os);
      if (!os) throw Error(ErrorCode::kIo, "cannot write level set");
      files["level_set"] = "level_set.csv";
      manifest["v_max"] = field.v_max;
      manifest["probe"] = {{"x", vec_json(probe)}, {"value", radial_extend(field, probe)}};
    } else {
      manifest["horizon_steps"] = cfg.horizon_steps;
      manifest["stopping_scale"] = cfg.stopping_scale;
      manifest["probe"] = {
          {"x", vec_json(probe)}, {"t", 0.0}, {"value", field.value_at(0, probe)}};
    }
    manifest["files"] = files;
    manifest["config"] = cfg.source;
    {
      std::ofstream os(dir / "manifest.json");
      os << manifest.dump(2) << '\n';
      if (!os) throw Error(ErrorCode::kIo, "cannot write manifest");
    }
    json summary = manifest;
    summary.erase("config");
    summary["output_dir"] = dir.string();
    out << summary.dump(2) << '\n';
    if (!field.stats.converged) {
      err << "value iteration did not converge within " << cfg.mintime.max_sweeps
          << " sweeps\n";
      return kExitConvergence;
    }
    return kExitOk;
  });
}

int cmd_play(const std::string& config_path, const std::optional<std::string>& manifest_path,
             const std::vector<double>& x0_in, double t0, const Overrides& ov,
             std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(config_path, ov);
    const fs::path mpath = manifest_path
                               ? fs::path(*manifest_path)
                               : fs::path(cfg.output_dir) / "finite" / "manifest.json";
    if (!fs::exists(mpath)) {
      err << "missing manifest " << mpath.string() << "; run `solve --mode finite` first\n";
      return kExitMissingArtifact;
    }
    json manifest;
    {
      std::ifstream is(mpath);
      manifest = json::parse(is);
    }
    if (manifest.at("mode").get<std::string>() != "finite") {
      err << "play needs a finite-horizon manifest\n";
      return kExitUnsupported;
    }
    // The manifest's own config describes what was solved.
    const RunConfig solved = parse_config(manifest.at("config"));
    const Model m = require_costs(solved);
    const int d = m.geometry.dim();
    const OrthantGrid grid(d, manifest.at("grid").at("x_max").get<double>(),
                           manifest.at("grid").at("n").get<int>(), solved.grid.budget);
    const fs::path values_path =
        mpath.parent_path() / manifest.at("files").at("values").get<std::string>();
    if (!fs::exists(values_path)) {
      err << "missing value file " << values_path.string() << '\n';
      return kExitMissingArtifact;
    }
    const ValueField field = read_value_csv(values_path.string(), grid, false);

    if (static_cast<int>(x0_in.size()) != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "--x0 has " + std::to_string(x0_in.size()) + " entries, expected " +
                      std::to_string(d));
    }
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(x0_in.data(), d);
    if ((x0.array() < 0.0).any()) throw Error(ErrorCode::kInvalidArgument, "--x0 must be >= 0");
    if (!(t0 >= 0.0 && t0 <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "--t0 must be in [0, 1]");

    const FiniteProblem problem = time_to_go_problem(solved.stopping_scale);
    const double dt = field.time_step();
    const PlayReport rep =
        evaluate_value_by_play(m.geometry, m.family, problem, field, x0, t0, dt, solved.candidates);

    const fs::path dir = mpath.parent_path().parent_path() / "play";
    fs::create_directories(dir);
    write_rollout(dir, "greedy", rep.rollout);

    const ValueGreedyPlayers players(m.geometry, m.family, problem, field, solved.candidates);
    json adversaries = json::array();
    for (int i = 0; i < kHeuristicOpponents; ++i) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
      const GameRollout up = rollout(m.geometry, m.family, problem,
                                     random_maximizer_strategy(m.family, seed, solved.candidates),
                                     players.minimizer(), x0, t0, dt);
      const std::string up_stem = "maximizer_heuristic_" + std::to_string(i);
      write_rollout(dir, up_stem, up);
      adversaries.push_back({{"role", "maximizer"},
                             {"seed", seed},
                             {"cost", up.cost},
                             {"outcome", to_string(up.outcome)},
                             {"within_bound", up.cost <= rep.value + kSandwichTolerance},
                             {"trace", up_stem + ".csv"}});

      const GameRollout down = rollout(
          m.geometry, m.family, problem, players.maximizer(),
          random_minimizer_control(m.family.size(), t0, seed).as_policy(), x0, t0, dt);
      const std::string down_stem = "minimizer_heuristic_" + std::to_string(i);
      write_rollout(dir, down_stem, down);
      adversaries.push_back({{"role", "minimizer"},
                             {"seed", seed},
                             {"cost", down.cost},
                             {"outcome", to_string(down.outcome)},
                             {"within_bound", down.cost >= rep.value - kSandwichTolerance},
                             {"trace", down_stem + ".csv"}});
    }

    const double gap = std::abs(rep.realized - rep.value);
    json report{{"x0", vec_json(x0)},
                {"t0", t0},
                {"dt", dt},
                {"value", rep.value},
                {"realized", rep.realized},
                {"discrepancy", gap},
                {"consistent", gap <= kPlayTolerance},
                {"outcome", to_string(rep.rollout.outcome)},
                {"event_time", rep.rollout.event_time},
                {"greedy_trace", "greedy.csv"},
                {"adversaries", adversaries},
                {"output_dir", dir.string()}};
    out << report.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_verify(const std::string& config_path, const std::string& which, const Overrides& ov,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (which != "eq42" && which != "thm43" && which != "all") {
      throw Error(ErrorCode::kParse, "unknown check " + which);
    }
    const RunConfig cfg = load(config_path, ov);
    const Model m = require_costs(cfg);
    reject_risk_stationary(m.family);
    require_geometry(m.geometry);
    const OrthantGrid grid = make_grid(cfg, m.geometry.dim());
    const ValueField stationary = solve_mintime(m.geometry, m.family, grid, mintime_options(cfg));

    json report{{"stationary", stats_json(stationary.stats)}};
    if (which != "thm43") {
      const ValueField finite = solve_finite(m.geometry, m.family, grid, cfg.horizon_steps,
                                             time_to_go_problem(1.0), finite_options(cfg));
      const TimeToGoReport r = verify_time_to_go_identity(finite, stationary);
      report["time_to_go_identity"] = {{"max_discrepancy", r.max_discrepancy},
                                       {"worst_time", r.worst_time},
                                       {"worst_point", vec_json(r.worst_point)},
                                       {"checked", r.checked},
                                       {"tolerance", kTimeToGoTolerance},
                                       {"pass", r.max_discrepancy <= kTimeToGoTolerance}};
    }
    if (which != "eq42") {
      const StationaryConditionReport r =
          verify_stationary_conditions(stationary, m.geometry, m.family);
      report["stationary_conditions"] = {
          {"tol", r.tol},
          {"smooth_nodes", r.smooth_nodes},
          {"kink_nodes", r.kink_nodes},
          {"interior_within_tol", r.interior_within_tol},
          {"interior_fraction", r.interior_fraction},
          {"worst_interior_residual", r.worst_interior_residual},
          {"min_b_scan", r.min_b_scan},
          {"b_scan_violations", r.b_scan_violations},
          {"boundary_nodes", r.boundary_nodes},
          {"boundary_violations_sub", r.boundary_violations_sub},
          {"boundary_violations_super", r.boundary_violations_super},
          {"worst_boundary_residual", r.worst_boundary_residual},
          {"pass", r.interior_fraction >= 0.95 && r.min_b_scan >= -r.tol}};
    }
    out << report.dump(2) << '\n';
    return stationary.stats.converged ? kExitOk : kExitConvergence;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflected differential games on the nonnegative orthant", "cgame"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--n", ov.nodes_per_axis, "Override grid nodes per axis");
    sub->add_option("--threads", ov.threads, "Cap on solver worker threads");
  };

  CLI::App* check = app.add_subcommand("check", "Verify the reflection geometry");
  common(check);

  std::string mode;
  CLI::App* solve = app.add_subcommand("solve", "Solve and write value/policy artifacts");
  common(solve);
  solve->add_option("--mode", mode, "finite or mintime")
      ->required()
      ->check(CLI::IsMember({"finite", "mintime"}));

  std::vector<double> x0;
  double t0 = 0.0;
  std::optional<std::string> manifest;
  CLI::App* play = app.add_subcommand("play", "Play the game on a solved finite-horizon field");
  common(play);
  play->add_option("--x0", x0, "Initial state, comma separated")->required()->delimiter(',');
  play->add_option("--t0", t0, "Initial time");
  play->add_option("--manifest", manifest, "Solved manifest (default <output_dir>/finite)");

  std::string which = "all";
  CLI::App* verify = app.add_subcommand("verify", "Check the structural identities");
  common(verify);
  verify->add_option("--which", which, "eq42, thm43 or all")
      ->check(CLI::IsMember({"eq42", "thm43", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (check->parsed()) return cmd_check(config, ov, out, err);
  if (solve->parsed()) return cmd_solve(config, mode, ov, out, err);
  if (play->parsed()) return cmd_play(config, manifest, x0, t0, ov, out, err);
  return cmd_verify(config, which, ov, out, err);
}

}  // namespace cgame::cli
