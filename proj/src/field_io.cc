#include "cgame/field_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "cgame/error.h"
#include "cgame/io.h"

namespace cgame {

namespace {

void write_header(int d, std::ostream& os) {
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << 'x' << (i + 1);
}

}  // namespace

void write_value_csv(const ValueField& v, std::ostream& os) {
  const OrthantGrid& grid = v.grid;
  const int d = grid.dim();
  write_header(d, os);
  os << ",t,value,branch,stop\n";
  for (int k = 0; k < v.slices(); ++k) {
    const double t = v.stationary ? 0.0 : v.times[k];
    for (std::size_t node = 0; node < grid.size(); ++node) {
      const Eigen::VectorXd x = grid.point(node);
      for (int i = 0; i < d; ++i) os << format_double(x(i)) << ',';
      os << format_double(t) << ',' << format_double(v.values[k][node]) << ','
         << v.branch[k][node] << ',' << static_cast<int>(v.stop[k][node]) << '\n';
    }
  }
}

void write_value_csv(const ValueField& v, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_value_csv(v, os);
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + path);
}

ValueField read_value_csv(std::istream& is, const OrthantGrid& grid, bool stationary) {
  const int d = grid.dim();
  const std::size_t cols = static_cast<std::size_t>(d) + 4;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kParse, "empty value file");
  if (split_csv_line(line).size() != cols) throw Error(ErrorCode::kParse, "bad value header");

  ValueField v(grid);
  v.stationary = stationary;
  std::size_t node = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols) throw Error(ErrorCode::kParse, "bad value row: " + line);
    if (node == 0) {
      v.times.push_back(parse_double(fields[d]));
      v.values.emplace_back(grid.size());
      v.branch.emplace_back(grid.size());
      v.stop.emplace_back(grid.size());
    }
    const Eigen::VectorXd x = grid.point(node);
    for (int i = 0; i < d; ++i) {
      if (std::abs(parse_double(fields[i]) - x(i)) > 1e-9 * (1.0 + grid.x_max())) {
        throw Error(ErrorCode::kParse, "value rows do not match the grid");
      }
    }
    v.values.back()[node] = parse_double(fields[d + 1]);
    v.branch.back()[node] = static_cast<int>(parse_double(fields[d + 2]));
    v.stop.back()[node] = parse_double(fields[d + 3]) != 0.0;
    if (++node == grid.size()) node = 0;
  }
  if (node != 0 || v.values.empty()) throw Error(ErrorCode::kParse, "truncated value file");
  if (stationary && v.values.size() != 1) {
    throw Error(ErrorCode::kParse, "stationary value file holds several slices");
  }
  v.clamped.assign(grid.size(), 0);
  int J = 1;
  for (const auto& slice : v.branch) {
    for (int b : slice) J = std::max(J, b + 1);
  }
  v.branch_count = J;
  if (v.times.size() > 1) v.stats.dt = v.times[1] - v.times[0];
  return v;
}

ValueField read_value_csv(const std::string& path, const OrthantGrid& grid, bool stationary) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path);
  return read_value_csv(is, grid, stationary);
}

std::vector<Eigen::VectorXd> level_set_points(const ValueField& v, int slice, double level) {
  const OrthantGrid& grid = v.grid;
  const auto& vals = v.values.at(slice);
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const double a = vals[node] - level;
    if (a == 0.0) {
      pts.push_back(grid.point(node));
      continue;
    }
    for (int axis = 0; axis < grid.dim(); ++axis) {
      if (grid.coordinate_index(node, axis) + 1 >= grid.nodes_per_axis()) continue;
      const double b = vals[node + grid.stride(axis)] - level;
      if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
        Eigen::VectorXd x = grid.point(node);
        x(axis) += grid.spacing() * a / (a - b);
        pts.push_back(std::move(x));
      }
    }
  }
  return pts;
}

void write_points_csv(const std::vector<Eigen::VectorXd>& pts, int dim, std::ostream& os) {
  write_header(dim, os);
  os << '\n';
  for (const auto& p : pts) {
    for (int i = 0; i < dim; ++i) os << (i ? "," : "") << format_double(p(i));
    os << '\n';
  }
}

}  // namespace cgame
