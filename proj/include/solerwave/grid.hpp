#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "solerwave/errors.hpp"

namespace solerwave {

enum class Parity { Even, Odd };

inline Parity flipped(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

//! Uniform grid on [0, t_max]. Node values extend to [-t_max, t_max] by the
//! declared parity of each grid function; dim is the ambient spatial
//! dimension n entering the radial weight t^{n-1}.
struct Grid {
  double t_max;
  int n_points;
  int dim;

  Grid(double t_max_, int n_points_, int dim_ = 1)
      : t_max(t_max_), n_points(n_points_), dim(dim_) {
    if (!std::isfinite(t_max) || !(t_max > 0.0))
      throw std::invalid_argument("Grid: t_max must be positive");
    if (n_points < 3) throw std::invalid_argument("Grid: need at least 3 points");
    if (dim < 1) throw std::invalid_argument("Grid: dimension must be >= 1");
  }

  double dt() const { return t_max / (n_points - 1); }
  double t(int j) const { return t_max * j / (n_points - 1); }

  bool operator==(const Grid&) const = default;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw GridMismatchError(std::string(where) + ": grids do not match");
}

//! Real-valued function sampled on a Grid, with a parity tag.
struct GridFunction {
  Grid grid;
  std::vector<double> values;
  Parity parity;

  GridFunction(Grid g, std::vector<double> v, Parity p)
      : grid(g), values(std::move(v)), parity(p) {
    if (values.size() != static_cast<std::size_t>(grid.n_points))
      throw std::invalid_argument("GridFunction: value count does not match grid");
    if (parity == Parity::Odd && values[0] != 0.0)
      throw std::invalid_argument("GridFunction: odd function must vanish at t = 0");
  }

  static GridFunction zero(const Grid& g, Parity p) {
    return GridFunction(g, std::vector<double>(g.n_points, 0.0), p);
  }

  int size() const { return grid.n_points; }
  double operator[](int j) const { return values[j]; }
  double& operator[](int j) { return values[j]; }
};

//! Second-order first derivative; the parity extension handles t = 0 and a
//! one-sided stencil handles t_max. The result has the opposite parity.
inline GridFunction derivative(const GridFunction& g) {
  const int N = g.grid.n_points;
  const double h = g.grid.dt();
  std::vector<double> d(N);
  if (g.parity == Parity::Even) {
    d[0] = 0.0;  // ghost g(-h) = g(h)
  } else {
    d[0] = g.values[1] / h;  // ghost g(-h) = -g(h)
  }
  for (int j = 1; j + 1 < N; ++j) d[j] = (g.values[j + 1] - g.values[j - 1]) / (2.0 * h);
  d[N - 1] = (3.0 * g.values[N - 1] - 4.0 * g.values[N - 2] + g.values[N - 3]) / (2.0 * h);
  return GridFunction(g.grid, std::move(d), flipped(g.parity));
}

//! Composite trapezoid of f(t) t^{n-1} dt over [0, t_max].
inline double radial_integral(const Grid& grid, const std::vector<double>& f) {
  if (f.size() != static_cast<std::size_t>(grid.n_points))
    throw std::invalid_argument("radial_integral: size mismatch");
  const int N = grid.n_points;
  const double h = grid.dt();
  const int p = grid.dim - 1;
  auto w = [&](int j) { return p == 0 ? 1.0 : std::pow(grid.t(j), p); };
  double s = 0.5 * (f[0] * w(0) + f[N - 1] * w(N - 1));
  for (int j = 1; j + 1 < N; ++j) s += f[j] * w(j);
  return s * h;
}

//! Same quadrature with the bracket weight <t>^{n-1} = (1+t^2)^{(n-1)/2}.
inline double radial_integral_bracket(const Grid& grid, const std::vector<double>& f) {
  if (f.size() != static_cast<std::size_t>(grid.n_points))
    throw std::invalid_argument("radial_integral_bracket: size mismatch");
  const int N = grid.n_points;
  const double h = grid.dt();
  const double p = 0.5 * (grid.dim - 1);
  auto w = [&](int j) {
    const double t = grid.t(j);
    return p == 0.0 ? 1.0 : std::pow(1.0 + t * t, p);
  };
  double s = 0.5 * (f[0] * w(0) + f[N - 1] * w(N - 1));
  for (int j = 1; j + 1 < N; ++j) s += f[j] * w(j);
  return s * h;
}

//! Integral over the whole line of an even integrand with weight |t|^{n-1},
//! folded onto [0, t_max]: the fold doubles every node except t = 0, whose
//! trapezoid half-weight makes its total weight one.
inline double line_integral(const Grid& grid, const std::vector<double>& f) {
  return 2.0 * radial_integral(grid, f);
}

inline double line_integral_bracket(const Grid& grid, const std::vector<double>& f) {
  return 2.0 * radial_integral_bracket(grid, f);
}

}  // namespace solerwave
