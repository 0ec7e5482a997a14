#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "solerwave/errors.hpp"
#include "solerwave/grid.hpp"
#include "solerwave/profiles.hpp"

namespace solerwave {

//! Options for the groundstate shooting-bisection solver.
struct GroundstateOptions {
  double bisection_tol = 0.0;  //!< relative bracket width; 0 bisects to machine width
  double tail_tol = 1e-12;     //!< required u(t_max)/u(0)
  int max_bisections = 200;
  int max_widenings = 64;
};

//! Radial NLS groundstate u_k on [0, t_max] with derivative samples.
struct GroundstateProfile {
  Grid grid;
  std::vector<double> u;
  std::vector<double> du;
  int n;
  double k;
  double m;
  double u0;
};

namespace detail {

//! Decaying solution of the far-field equation u'' + (n-1) u'/t = u, i.e.
//! t^{-nu} K_nu(t) with nu = (n-2)/2; psi_pair returns (psi, psi').
inline std::pair<double, double> tail_model(int n, double t) {
  if (n == 1) {
    const double e = std::exp(-t);
    return {e, -e};
  }
  if (n == 3) {
    const double e = std::exp(-t);
    return {e / t, -e * (1.0 / t + 1.0 / (t * t))};
  }
  const double nu = 0.5 * (n - 2);
  const double p = std::pow(t, -nu);
  const double kv = std::cyl_bessel_k(std::abs(nu), t);
  const double kv1 = std::cyl_bessel_k(std::abs(nu + 1.0), t);
  return {p * kv, -p * kv1};
}

struct GroundstateRhs {
  int n;
  double k;
  double m;
  // y = (u, w = u'); the singular damping term is evaluated in the limit at r = 0
  std::pair<double, double> operator()(double r, double u, double w) const {
    const double nonlin = u - 2.0 * m * std::pow(std::abs(u), 2.0 * k) * u;
    if (r <= 0.0) return {w, nonlin / n};
    return {w, nonlin - (n - 1) * w / r};
  }
};

template <class Rhs>
inline void rk4_step(const Rhs& f, double r, double h, double& u, double& w) {
  auto [k1u, k1w] = f(r, u, w);
  auto [k2u, k2w] = f(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w);
  auto [k3u, k3w] = f(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w);
  auto [k4u, k4w] = f(r + h, u + h * k3u, w + h * k3w);
  u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
}

enum class ShotEnd { Crossed, TurnedBack };

//! Classify one shot: Crossed (amplitude too high) or TurnedBack (too low).
//! A step that explodes or loses finiteness while the solution was plunging
//! is a stiff overshoot of the zero crossing, not a genuine turn-back.
inline ShotEnd classify_groundstate_shot(const GroundstateRhs& f, const Grid& grid, double u0,
                                         double blowup) {
  double u = u0, w = 0.0;
  const double h = grid.dt();
  for (int j = 0; j + 1 < grid.n_points; ++j) {
    const double w_prev = w;
    rk4_step(f, grid.t(j), h, u, w);
    if (!std::isfinite(u) || !std::isfinite(w))
      return w_prev <= 0.0 ? ShotEnd::Crossed : ShotEnd::TurnedBack;
    if (u < 0.0) return ShotEnd::Crossed;
    if (u > blowup) return w_prev <= 0.0 ? ShotEnd::Crossed : ShotEnd::TurnedBack;
    if (w > 0.0 && u > 0.1 * u0) return ShotEnd::TurnedBack;
  }
  return u > 0.0 ? ShotEnd::TurnedBack : ShotEnd::Crossed;
}

}  // namespace detail

//! Groundstate of u'' + (n-1)/r u' = u - 2m u^{2k+1}, u'(0) = 0, found by
//! bisection on u(0) between blow-up and zero-crossing. The stored profile is
//! re-integrated at the converged amplitude; beyond the point where the
//! amplitude uncertainty would corrupt the decaying branch, the tail is
//! continued with the exact solution of the linear far-field equation.
inline GroundstateProfile solve_groundstate(int n, double k, double m, const Grid& grid,
                                            const GroundstateOptions& opts = {}) {
  if (n < 1) throw std::invalid_argument("solve_groundstate: n must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("solve_groundstate: k must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("solve_groundstate: m must be positive");
  if (n >= 3 && !(k < 2.0 / (n - 2)))
    throw std::invalid_argument(
        "solve_groundstate: no groundstate exists, the exponent must satisfy k < 2/(n-2)");
  if (grid.dim != n) throw GridMismatchError("solve_groundstate: grid.dim != n");

  const detail::GroundstateRhs rhs{n, k, m};
  double lo = std::pow(1.0 / (2.0 * m), 1.0 / (2.0 * k));
  double hi = 10.0 * lo;

  auto classify = [&](double a, double blow) {
    return detail::classify_groundstate_shot(rhs, grid, a, blow);
  };

  int widen = 0;
  while (classify(lo, 2.0 * hi) == detail::ShotEnd::Crossed) {
    lo *= 0.5;
    if (++widen > opts.max_widenings)
      throw BracketError("solve_groundstate: could not bracket from below");
  }
  while (classify(hi, 2.0 * hi) == detail::ShotEnd::TurnedBack) {
    hi *= 2.0;
    if (++widen > opts.max_widenings)
      throw BracketError("solve_groundstate: could not bracket from above");
  }

  for (int it = 0;; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // machine width
    if (opts.bisection_tol > 0.0 && (hi - lo) <= opts.bisection_tol * hi) break;
    if (it >= opts.max_bisections)
      throw NoConvergenceError("solve_groundstate: bisection did not converge");
    if (classify(mid, 2.0 * hi) == detail::ShotEnd::Crossed)
      hi = mid;
    else
      lo = mid;
  }

  const double u0 = 0.5 * (lo + hi);
  const double delta_rel =
      std::max((hi - lo) / u0, 8.0 * std::numeric_limits<double>::epsilon());
  const double t_patch = 0.25 * std::log(3.0 / delta_rel);

  const int N = grid.n_points;
  const double h = grid.dt();
  std::vector<double> u(N), du(N);
  u[0] = u0;
  du[0] = 0.0;
  int jp = N;  // first patched node
  for (int j = 1; j < N; ++j) {
    double uu = u[j - 1], ww = du[j - 1];
    detail::rk4_step(rhs, grid.t(j - 1), h, uu, ww);
    u[j] = uu;
    du[j] = ww;
    if (grid.t(j) >= t_patch || uu <= 0.0 || ww > 0.0) {
      jp = j;
      break;
    }
  }
  if (jp < N) {
    auto [psi0, dpsi0] = detail::tail_model(n, grid.t(jp));
    const double c = u[jp] / psi0;
    du[jp] = c * dpsi0;
    for (int j = jp + 1; j < N; ++j) {
      auto [psi, dpsi] = detail::tail_model(n, grid.t(j));
      u[j] = c * psi;
      du[j] = c * dpsi;
    }
  }

  if (!(u[N - 1] <= opts.tail_tol * u0))
    throw NoConvergenceError("solve_groundstate: tail value " + std::to_string(u[N - 1]) +
                             " above truncation tolerance; enlarge t_max");
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, u0);
  for (int j = 0; j + 1 < N; ++j) {
    if (u[j] > floor && !(u[j + 1] < u[j]))
      throw NoConvergenceError("solve_groundstate: profile is not strictly decreasing");
    if (du[j] > 1e-12 * u0)
      throw NoConvergenceError("solve_groundstate: derivative is not non-positive");
  }

  return GroundstateProfile{grid, std::move(u), std::move(du), n, k, m, u0};
}

//! Analytic 1D groundstate u(x) = ((k+1)/(2m))^{1/(2k)} sech^{1/k}(k x).
inline GroundstateProfile closed_form_groundstate_1d(double k, double m, const Grid& grid) {
  if (!(k > 0.0) || !(m > 0.0))
    throw std::invalid_argument("closed_form_groundstate_1d: k, m must be positive");
  if (grid.dim != 1) throw GridMismatchError("closed_form_groundstate_1d: grid.dim != 1");
  const double A = std::pow((k + 1.0) / (2.0 * m), 1.0 / (2.0 * k));
  const int N = grid.n_points;
  std::vector<double> u(N), du(N);
  for (int j = 0; j < N; ++j) {
    const double x = grid.t(j);
    const double s = 1.0 / std::cosh(k * x);
    u[j] = A * std::pow(s, 1.0 / k);
    du[j] = -u[j] * std::tanh(k * x);
  }
  du[0] = 0.0;
  return GroundstateProfile{grid, std::move(u), std::move(du), 1, k, m, A};
}

//! Max over interior nodes of the discrete radial stationary-NLS residual
//! u'' + (n-1)/r u' - u + 2m u^{2k+1}; the singular term at r = 0 is taken in
//! the limit sense (n-1) u''(0).
inline double groundstate_residual(const GroundstateProfile& gs) {
  const int N = gs.grid.n_points;
  const double h = gs.grid.dt();
  const auto& u = gs.u;
  auto nonlin = [&](double v) { return -v + 2.0 * gs.m * std::pow(std::abs(v), 2.0 * gs.k) * v; };
  double r = 0.0;
  {
    const double d2 = 2.0 * (u[1] - u[0]) / (h * h);
    r = std::abs(gs.n * d2 + nonlin(u[0]));
  }
  for (int j = 1; j + 1 < N; ++j) {
    const double d2 = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
    const double d1 = (u[j + 1] - u[j - 1]) / (2.0 * h);
    r = std::max(r, std::abs(d2 + (gs.n - 1) * d1 / gs.grid.t(j) + nonlin(u[j])));
  }
  return r;
}

//! Build the limiting pair vhat(t) = u_k(|t|), uhat = -vhat'/(2m) on the
//! groundstate's own grid.
inline HatPair hat_pair(const GroundstateProfile& gs, const Grid& grid) {
  require_same_grid(gs.grid, grid, "hat_pair");
  std::vector<double> uh(gs.du.size());
  for (std::size_t j = 0; j < uh.size(); ++j) uh[j] = -gs.du[j] / (2.0 * gs.m);
  uh[0] = 0.0;
  GridFunction vhat(grid, gs.u, Parity::Even);
  GridFunction uhat(grid, std::move(uh), Parity::Odd);
  return HatPair(std::move(vhat), std::move(uhat), gs.m, gs.k);
}

//! sup|vhat| + m sup|uhat| on raw samples.
inline double lambda_k(const GridFunction& vhat, const GridFunction& uhat, double m) {
  require_same_grid(vhat.grid, uhat.grid, "lambda_k");
  double sv = 0.0, su = 0.0;
  for (int j = 0; j < vhat.size(); ++j) {
    sv = std::max(sv, std::abs(vhat.values[j]));
    su = std::max(su, std::abs(uhat.values[j]));
  }
  return sv + m * su;
}

inline double lambda_k(const HatPair& hat) { return lambda_k(hat.vhat, hat.uhat, hat.m); }

//! Min and max of u(t) <t>^{(n-1)/2} e^t over the nodes of [t_lo, t_hi].
inline std::pair<double, double> decay_constants(const GroundstateProfile& gs, double t_lo,
                                                 double t_hi) {
  if (!(t_lo <= t_hi) || t_lo < 0.0 || t_hi > gs.grid.t_max + 1e-12)
    throw WindowError("decay_constants: window outside grid");
  const double p = 0.5 * (gs.n - 1);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool any = false;
  for (int j = 0; j < gs.grid.n_points; ++j) {
    const double t = gs.grid.t(j);
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    if (!(gs.u[j] > 0.0)) throw WindowError("decay_constants: nonpositive value in window");
    const double val = gs.u[j] * std::pow(1.0 + t * t, 0.5 * p) * std::exp(t);
    if (!std::isfinite(val)) throw WindowError("decay_constants: overflow in window");
    lo = std::min(lo, val);
    hi = std::max(hi, val);
    any = true;
  }
  if (!any) throw WindowError("decay_constants: window contains no grid node");
  return {lo, hi};
}

}  // namespace solerwave
