#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgame/solver.h"

namespace cgame {

/// Rows `x1,...,xd,t,value,branch,stop`, one per (slice, node), slices in
/// time order and nodes in grid order. Stationary fields write t = 0.
void write_value_csv(const ValueField& v, std::ostream& os);
void write_value_csv(const ValueField& v, const std::string& path);

/// Inverse of write_value_csv for a known grid. Throws kParse on rows that do
/// not match the grid.
ValueField read_value_csv(std::istream& is, const OrthantGrid& grid, bool stationary);
ValueField read_value_csv(const std::string& path, const OrthantGrid& grid, bool stationary);

/// Points where the slice crosses `level` along grid edges (linear
/// interpolation between adjacent nodes), in node order then axis order.
std::vector<Eigen::VectorXd> level_set_points(const ValueField& v, int slice, double level);
void write_points_csv(const std::vector<Eigen::VectorXd>& pts, int dim, std::ostream& os);

}  // namespace cgame
