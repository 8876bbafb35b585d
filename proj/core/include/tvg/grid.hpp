#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace tvg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform grid of n points on [a, b]; t_0 = a and t_{n-1} = b exactly.
class Grid1D {
 public:
  Grid1D(std::size_t n, double a, double b);

  std::size_t size() const { return n_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  double spacing() const { return h_; }

  double point(std::size_t i) const {
    return i + 1 == n_ ? b_ : a_ + static_cast<double>(i) * h_;
  }
  Vector points() const;

  bool contains(double t) const { return t >= a_ && t <= b_; }
  bool same_domain(const Grid1D& other) const {
    return a_ == other.a_ && b_ == other.b_;
  }

  friend bool operator==(const Grid1D& l, const Grid1D& r) {
    return l.n_ == r.n_ && l.a_ == r.a_ && l.b_ == r.b_;
  }

 private:
  std::size_t n_;
  double a_;
  double b_;
  double h_;
};

Grid1D make_grid(std::size_t n, double a, double b);

/// Nodal values of a function on a grid.
struct Field {
  Field(Grid1D g, Vector v);
  explicit Field(Grid1D g);  // zero field

  Grid1D grid;
  Vector values;
};

/// Point observations y_j at increasing locations with iid N(0, noise_sd^2) noise.
struct ObservationSet {
  ObservationSet(Vector locations, Vector y, double noise_sd);

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }

  Vector locations;
  Vector y;
  double noise_sd;
};

/// Piecewise-linear interpolation; exact at nodes. Throws outside [a, b].
double eval_at(const Field& field, double t);

/// Linear interpolation onto another grid over the same domain.
Field regrid(const Field& field, const Grid1D& target);

// Precomputed interpolation stencil: value(t) = (1-w) u[left] + w u[left+1].
struct InterpStencil {
  std::size_t left;
  double weight;
};
InterpStencil interp_stencil(const Grid1D& grid, double t);

// CSV: header `t,value`, 17 significant digits.
void write_field_csv(std::ostream& os, const Field& field);
Field read_field_csv(std::istream& is);

// CSV: `# noise_sd=<value>` then header `location,y`.
void write_observations_csv(std::ostream& os, const ObservationSet& obs);
ObservationSet read_observations_csv(std::istream& is);

std::string format_double(double x);

}  // namespace tvg
