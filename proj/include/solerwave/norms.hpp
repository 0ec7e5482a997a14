#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "solerwave/grid.hpp"

namespace solerwave {

//! ||g||_X = L2(|t|^{n-1} dt) norm over the parity extension to the line,
//! plus the sup norm. The normalizing constant of the X-norm is one.
inline double norm_X(const GridFunction& g) {
  std::vector<double> sq(g.size());
  double sup = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    sq[j] = g.values[j] * g.values[j];
    sup = std::max(sup, std::abs(g.values[j]));
  }
  return std::sqrt(line_integral(g.grid, sq)) + sup;
}

//! Pair norm: sqrt(||a||_X^2 + ||b||_X^2).
inline double norm_X(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid, b.grid, "norm_X");
  return std::hypot(norm_X(a), norm_X(b));
}

//! H^1(R, <t>^{n-1} dt) norm of e^{gamma <t>} g, with the derivative taken by
//! finite differences of the weighted samples. Overflow of the exponential is
//! an error, never a saturated value.
inline double norm_X1_weighted(const GridFunction& g, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("norm_X1_weighted: gamma must be >= 0");
  if (gamma * std::hypot(1.0, g.grid.t_max) > 700.0)
    throw std::overflow_error("norm_X1_weighted: exponential weight overflows");
  std::vector<double> w(g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double t = g.grid.t(j);
    w[j] = std::exp(gamma * std::hypot(1.0, t)) * g.values[j];
    if (!std::isfinite(w[j])) throw std::overflow_error("norm_X1_weighted: weighted value overflows");
  }
  GridFunction wf(g.grid, std::move(w), g.parity);
  GridFunction dw = derivative(wf);
  std::vector<double> sq(g.size());
  for (int j = 0; j < g.size(); ++j)
    sq[j] = wf.values[j] * wf.values[j] + dw.values[j] * dw.values[j];
  const double out = std::sqrt(line_integral_bracket(g.grid, sq));
  if (!std::isfinite(out)) throw std::overflow_error("norm_X1_weighted: norm overflows");
  return out;
}

inline double norm_X1_weighted(const GridFunction& a, const GridFunction& b, double gamma) {
  require_same_grid(a.grid, b.grid, "norm_X1_weighted");
  return std::hypot(norm_X1_weighted(a, gamma), norm_X1_weighted(b, gamma));
}

//! Max norm over nodes, for a pair: max_j (|a_j| + |b_j|).
inline double max_norm_pair(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid, b.grid, "max_norm_pair");
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j)
    m = std::max(m, std::abs(a.values[j]) + std::abs(b.values[j]));
  return m;
}

}  // namespace solerwave
