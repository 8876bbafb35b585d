#include "tvg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tvg/csv.hpp"

namespace tvg {

Grid1D::Grid1D(std::size_t n, double a, double b) : n_(n), a_(a), b_(b), h_(0.0) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(a < b)) throw std::invalid_argument("grid needs a < b");
  h_ = (b - a) / static_cast<double>(n - 1);
}

Vector Grid1D::points() const {
  Vector t(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) t[static_cast<Eigen::Index>(i)] = point(i);
  return t;
}

Grid1D make_grid(std::size_t n, double a, double b) { return Grid1D(n, a, b); }

Field::Field(Grid1D g, Vector v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw std::invalid_argument("field length " + std::to_string(values.size()) +
                                " does not match grid size " +
                                std::to_string(grid.size()));
  }
  if (!values.allFinite()) throw std::invalid_argument("field has non-finite values");
}

Field::Field(Grid1D g) : grid(g), values(Vector::Zero(static_cast<Eigen::Index>(g.size()))) {}

ObservationSet::ObservationSet(Vector loc, Vector data, double sd)
    : locations(std::move(loc)), y(std::move(data)), noise_sd(sd) {
  if (locations.size() != y.size()) {
    throw std::invalid_argument("observation locations and data differ in length");
  }
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  for (Eigen::Index j = 1; j < locations.size(); ++j) {
    if (!(locations[j] > locations[j - 1])) {
      throw std::invalid_argument("observation locations must be strictly increasing");
    }
  }
}

InterpStencil interp_stencil(const Grid1D& grid, double t) {
  if (!grid.contains(t)) {
    throw std::out_of_range("t = " + format_double(t) + " outside grid domain [" +
                            format_double(grid.lower()) + ", " +
                            format_double(grid.upper()) + "]");
  }
  const std::size_t last = grid.size() - 1;
  auto left = static_cast<std::size_t>(std::floor((t - grid.lower()) / grid.spacing()));
  left = std::min(left, last - 1);
  // Guard against rounding placing t just past a node boundary.
  if (t < grid.point(left) && left > 0) --left;
  if (t > grid.point(left + 1) && left + 2 <= last) ++left;
  const double t0 = grid.point(left);
  const double t1 = grid.point(left + 1);
  double w = (t - t0) / (t1 - t0);
  w = std::clamp(w, 0.0, 1.0);
  return {left, w};
}

double eval_at(const Field& field, double t) {
  const auto s = interp_stencil(field.grid, t);
  const auto i = static_cast<Eigen::Index>(s.left);
  if (s.weight == 0.0) return field.values[i];
  if (s.weight == 1.0) return field.values[i + 1];
  return (1.0 - s.weight) * field.values[i] + s.weight * field.values[i + 1];
}

Field regrid(const Field& field, const Grid1D& target) {
  if (!field.grid.same_domain(target)) {
    throw std::invalid_argument("regrid: source and target domains differ");
  }
  if (field.grid == target) return field;
  Vector out(static_cast<Eigen::Index>(target.size()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = eval_at(field, target.point(i));
  }
  return Field(target, std::move(out));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& os, const Field& field) {
  os << "t,value\n";
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    os << format_double(field.grid.point(i)) << ','
       << format_double(field.values[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

Field read_field_csv(std::istream& is) {
  const auto table = read_csv(is);
  const auto tc = table.column("t");
  const auto vc = table.column("value");
  const auto n = table.rows.size();
  if (n < 2) throw std::runtime_error("field csv needs at least 2 rows");
  Grid1D grid(n, table.rows.front()[tc], table.rows.back()[tc]);
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = table.rows[i][tc];
    if (std::abs(t - grid.point(i)) > 1e-9 * (grid.upper() - grid.lower())) {
      throw std::runtime_error("field csv: nodes are not uniformly spaced");
    }
    v[static_cast<Eigen::Index>(i)] = table.rows[i][vc];
  }
  return Field(grid, std::move(v));
}

void write_observations_csv(std::ostream& os, const ObservationSet& obs) {
  os << "# noise_sd=" << format_double(obs.noise_sd) << '\n';
  os << "location,y\n";
  for (Eigen::Index j = 0; j < obs.y.size(); ++j) {
    os << format_double(obs.locations[j]) << ',' << format_double(obs.y[j]) << '\n';
  }
}

ObservationSet read_observations_csv(std::istream& is) {
  const auto table = read_csv(is);
  double sd = -1.0;
  const std::string key = "# noise_sd=";
  for (const auto& c : table.comments) {
    if (c.rfind(key, 0) == 0) sd = std::stod(c.substr(key.size()));
  }
  if (sd < 0.0) throw std::runtime_error("observation csv: missing '# noise_sd=' line");
  const auto lc = table.column("location");
  const auto yc = table.column("y");
  const auto m = static_cast<Eigen::Index>(table.rows.size());
  Vector loc(m), y(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    loc[j] = table.rows[static_cast<std::size_t>(j)][lc];
    y[j] = table.rows[static_cast<std::size_t>(j)][yc];
  }
  return ObservationSet(std::move(loc), std::move(y), sd);
}

}  // namespace tvg
