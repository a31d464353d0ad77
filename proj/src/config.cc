#include "cgame/config.h"

#include <fstream>
#include <sstream>

#include "cgame/error.h"

namespace cgame {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

Eigen::VectorXd to_vector(const json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::kParse, "expected an array of numbers");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

json from_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

// Matrices are stored as a list of columns.
Eigen::MatrixXd columns_to_matrix(const json& cols, int rows) {
  if (!cols.is_array() || cols.empty()) {
    throw Error(ErrorCode::kParse, "expected a nonempty list of columns");
  }
  Eigen::MatrixXd m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Eigen::VectorXd col = to_vector(cols[c]);
    if (col.size() != rows) throw Error(ErrorCode::kParse, "column has wrong length");
    m.col(c) = col;
  }
  return m;
}

json matrix_to_columns(const Eigen::MatrixXd& m) {
  json cols = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back(from_vector(m.col(c)));
  return cols;
}

RateBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kParse, "rate box must be [lo, hi]");
  return RateBox{j[0].get<double>(), j[1].get<double>()};
}

BranchKind kind_from_string(const std::string& s) {
  if (s == "velocity_set") return BranchKind::kVelocitySet;
  if (s == "rate_box_robust") return BranchKind::kRateBoxRobust;
  if (s == "risk_sensitive") return BranchKind::kRiskSensitive;
  throw Error(ErrorCode::kParse, "unknown cost kind '" + s + "'");
}

RunConfig parse_impl(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  RunConfig cfg;
  cfg.source = doc;
  if (doc.contains("network")) cfg.network = network_from_json(doc.at("network"));
  if (doc.contains("geometry")) cfg.geometry = geometry_from_json(doc.at("geometry"));
  if (doc.contains("cost")) {
    int dim = 0;
    if (cfg.geometry) dim = cfg.geometry->dim();
    else if (cfg.network) dim = cfg.network->dim();
    else throw Error(ErrorCode::kParse, "'cost' needs a 'geometry' or 'network' for its dimension");
    cfg.cost = cost_from_json(doc.at("cost"), dim);
  }
  if (!cfg.network && !cfg.geometry) {
    throw Error(ErrorCode::kParse, "config needs a 'network' or a 'geometry'");
  }
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    cfg.grid.x_max = get_or(g, "x_max", cfg.grid.x_max);
    cfg.grid.nodes_per_axis = get_or(g, "n", cfg.grid.nodes_per_axis);
    cfg.grid.budget = get_or<std::size_t>(g, "budget", cfg.grid.budget);
  }
  if (doc.contains("horizon")) {
    const json& h = doc.at("horizon");
    cfg.horizon_steps = get_or(h, "steps", cfg.horizon_steps);
    cfg.stopping_scale = get_or(h, "stopping_scale", cfg.stopping_scale);
  }
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    cfg.mintime.tol = get_or(s, "tol", cfg.mintime.tol);
    cfg.mintime.v_max = get_or(s, "v_max", cfg.mintime.v_max);
    cfg.mintime.dt = get_or(s, "dt", cfg.mintime.dt);
    cfg.mintime.max_sweeps = get_or(s, "max_sweeps", cfg.mintime.max_sweeps);
    cfg.candidates.risk_grid_points = get_or(s, "risk_grid_points", cfg.candidates.risk_grid_points);
    cfg.candidates.risk_grid_min = get_or(s, "risk_grid_min", cfg.candidates.risk_grid_min);
    cfg.candidates.risk_grid_max_factor =
        get_or(s, "risk_grid_max_factor", cfg.candidates.risk_grid_max_factor);
  }
  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir);
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.threads = get_or(doc, "threads", cfg.threads);

  if (!(cfg.grid.x_max > 0.0) || cfg.grid.nodes_per_axis < 3 || cfg.horizon_steps < 1 ||
      !(cfg.stopping_scale > 0.0) || !(cfg.mintime.tol > 0.0) || !(cfg.mintime.v_max > 0.0) ||
      cfg.mintime.dt < 0.0 || cfg.mintime.max_sweeps < 1 || cfg.threads < 1 ||
      cfg.candidates.risk_grid_points < 2) {
    throw Error(ErrorCode::kParse, "numeric settings must be positive");
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  try {
    return parse_impl(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kParse, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return parse_config(doc);
}

json geometry_to_json(const ConstraintGeometry& g) {
  return json{{"d", g.dim()}, {"gamma_columns", matrix_to_columns(g.gamma())}};
}

ConstraintGeometry geometry_from_json(const json& j) {
  try {
    const int d = j.at("d").get<int>();
    if (d < 1) throw Error(ErrorCode::kParse, "geometry.d must be >= 1");
    const json& cols = j.at("gamma_columns");
    if (!cols.is_array() || static_cast<int>(cols.size()) != d) {
      throw Error(ErrorCode::kParse, "geometry.gamma_columns must hold d columns");
    }
    return ConstraintGeometry(columns_to_matrix(cols, d));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

json cost_to_json(const CostFamily& f) {
  json out;
  const CostBranch& first = f.branch(0);
  out["kind"] = to_string(first.kind);
  out["c"] = first.c;
  json branches = json::array();
  for (const CostBranch& b : f.branches()) {
    json jb{{"label", b.label}, {"kind", to_string(b.kind)}, {"c", b.c}};
    switch (b.kind) {
      case BranchKind::kVelocitySet: {
        json vs = json::array();
        for (const auto& v : b.velocity_candidates) vs.push_back(from_vector(v));
        jb["velocities"] = vs;
        break;
      }
      case BranchKind::kRateBoxRobust:
        jb["rate_map"] = matrix_to_columns(b.rate_map);
        jb["lower"] = from_vector(b.rate_lower);
        jb["upper"] = from_vector(b.rate_upper);
        break;
      case BranchKind::kRiskSensitive:
        jb["rate_map"] = matrix_to_columns(b.rate_map);
        jb["nominal"] = from_vector(b.nominal);
        break;
    }
    branches.push_back(jb);
  }
  out["branches"] = branches;
  return out;
}

CostFamily cost_from_json(const json& j, int dim) {
  try {
    const BranchKind family_kind = kind_from_string(j.at("kind").get<std::string>());
    const double c = get_or(j, "c", 1.0);
    std::vector<CostBranch> branches;
    int index = 0;
    for (const json& jb : j.at("branches")) {
      const BranchKind kind =
          jb.contains("kind") ? kind_from_string(jb.at("kind").get<std::string>()) : family_kind;
      const std::string label = get_or<std::string>(jb, "label", "b" + std::to_string(index));
      const double bc = get_or(jb, "c", c);
      switch (kind) {
        case BranchKind::kVelocitySet: {
          std::vector<Eigen::VectorXd> vs;
          for (const json& v : jb.at("velocities")) vs.push_back(to_vector(v));
          branches.push_back(CostBranch::velocity_set(label, std::move(vs), bc));
          break;
        }
        case BranchKind::kRateBoxRobust:
          branches.push_back(CostBranch::rate_box(label, columns_to_matrix(jb.at("rate_map"), dim),
                                                  to_vector(jb.at("lower")),
                                                  to_vector(jb.at("upper")), bc));
          break;
        case BranchKind::kRiskSensitive:
          branches.push_back(CostBranch::risk_sensitive(
              label, columns_to_matrix(jb.at("rate_map"), dim), to_vector(jb.at("nominal")), bc));
          break;
      }
      ++index;
    }
    return CostFamily(dim, std::move(branches));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

json network_to_json(const NetworkSpec& spec) {
  json out{{"topology", to_string(spec.topology)},
           {"stations", spec.dim()},
           {"mode", to_string(spec.mode)},
           {"c", spec.c}};
  if (spec.mode == CostMode::kRobust) {
    out["arrival_box"] = {spec.arrival_box.lo, spec.arrival_box.hi};
    json boxes = json::array();
    for (const RateBox& b : spec.service_boxes) boxes.push_back({b.lo, b.hi});
    out["service_boxes"] = boxes;
  } else {
    out["arrival"] = spec.arrival;
    out["service"] = spec.service;
  }
  return out;
}

NetworkSpec network_from_json(const json& j) {
  try {
    NetworkSpec spec;
    const std::string topo = j.at("topology").get<std::string>();
    if (topo == "single") spec.topology = Topology::kSingle;
    else if (topo == "tandem") spec.topology = Topology::kTandem;
    else if (topo == "lu_kumar") spec.topology = Topology::kLuKumar;
    else throw Error(ErrorCode::kParse, "unknown topology '" + topo + "'");
    spec.stations = get_or(j, "stations", 1);
    const std::string mode = get_or<std::string>(j, "mode", "fixed");
    if (mode == "fixed") spec.mode = CostMode::kFixed;
    else if (mode == "robust") spec.mode = CostMode::kRobust;
    else if (mode == "risk") spec.mode = CostMode::kRisk;
    else throw Error(ErrorCode::kParse, "unknown mode '" + mode + "'");
    spec.c = get_or(j, "c", spec.mode == CostMode::kRisk ? 0.05 : 1.0);
    if (spec.mode == CostMode::kRobust) {
      spec.arrival_box = box_from_json(j.at("arrival_box"));
      for (const json& b : j.at("service_boxes")) spec.service_boxes.push_back(box_from_json(b));
    } else {
      spec.arrival = j.at("arrival").get<double>();
      spec.service = j.at("service").get<std::vector<double>>();
    }
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

ResolvedModel resolve_model(const RunConfig& cfg) {
  if (cfg.network) {
    Preset p = build(*cfg.network);
    ConstraintGeometry g = cfg.geometry ? *cfg.geometry : p.geometry;
    CostFamily f = cfg.cost ? *cfg.cost : p.family;
    if (g.dim() != f.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "geometry and network dimensions differ");
    }
    return ResolvedModel{std::move(g), std::move(f)};
  }
  if (!cfg.geometry) throw Error(ErrorCode::kParse, "config has no geometry");
  return ResolvedModel{*cfg.geometry, cfg.cost};
}

OrthantGrid make_grid(const RunConfig& cfg, int dim) {
  return OrthantGrid(dim, cfg.grid.x_max, cfg.grid.nodes_per_axis, cfg.grid.budget);
}

}  // namespace cgame
