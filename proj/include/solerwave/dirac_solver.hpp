#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "solerwave/analysis.hpp"
#include "solerwave/errors.hpp"
#include "solerwave/grid.hpp"
#include "solerwave/groundstate.hpp"
#include "solerwave/linearized.hpp"
#include "solerwave/nonlinearity.hpp"
#include "solerwave/norms.hpp"
#include "solerwave/profiles.hpp"

namespace solerwave {

//! Options for the fixed-point continuation solver.
struct SolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-11;  //!< stopping X-norm of successive corrections
  double damping = 1.0;      //!< Picard update weight in (0, 1]
  std::optional<std::pair<GridFunction, GridFunction>> warm_start;
};

//! Options for the direct shooting solver.
struct ShootingOptions {
  std::pair<double, double> v0_bracket{0.0, 0.0};  //!< (0,0) derives it from the groundstate
  double bisection_tol = 0.0;                      //!< relative width; 0 bisects to machine width
  double blowup_threshold = 0.0;                   //!< 0 defaults to twice the upper bracket
  int max_bisections = 200;
  int max_widenings = 64;
};

//! Right-hand side G = (G1, G2) of the bifurcation system at the given
//! correction pair. The scaled nonlinearity eps^{-2} f(eps^{2/k} s) is
//! expanded per power, so pure powers contribute |s|^k exactly.
inline std::pair<GridFunction, GridFunction> eval_G(double eps, const HatPair& hat,
                                                    const GridFunction& tilde_V,
                                                    const GridFunction& tilde_U,
                                                    const Nonlinearity& nl) {
  const double m = hat.m;
  if (!(eps > 0.0) || !(eps < m)) throw std::invalid_argument("eval_G: need 0 < eps < m");
  require_same_grid(hat.grid(), tilde_V.grid, "eval_G");
  require_same_grid(hat.grid(), tilde_U.grid, "eval_G");
  if (tilde_V.parity != Parity::Even || tilde_U.parity != Parity::Odd)
    throw std::invalid_argument("eval_G: correction parities must be (even, odd)");

  const double omega = std::sqrt(m * m - eps * eps);
  const double mu = m + omega;
  const double m_minus_omega = eps * eps / mu;
  const double c_eps = m_minus_omega / (2.0 * m * mu);  // 1/(m+w) - 1/(2m), formed without cancellation
  const double k = nl.k;
  const int N = hat.grid().n_points;

  std::vector<double> g1(N), g2(N);
  for (int j = 0; j < N; ++j) {
    const double vh = hat.vhat.values[j], uh = hat.uhat.values[j];
    const double V = vh + tilde_V.values[j];
    const double U = uh + tilde_U.values[j];
    const double s = V * V - eps * eps * U * U;
    if (k < 1.0 && s <= 0.0)
      throw PositivityLossError("eval_G: Lorentz scalar lost positivity at t = " +
                                std::to_string(hat.grid().t(j)));
    const double sf = scaled_f(nl, eps, s);
    const double vh2k = std::pow(vh, 2.0 * k);
    g1[j] = -sf * V + vh2k * vh + (1.0 + 2.0 * k) * vh2k * tilde_V.values[j] + c_eps * vh;
    g2[j] = eps * eps * sf * U + m_minus_omega * uh;
  }
  g2[0] = 0.0;
  return {GridFunction(hat.grid(), std::move(g1), Parity::Even),
          GridFunction(hat.grid(), std::move(g2), Parity::Odd)};
}

//! Max interior-node residual of the rescaled first-order system, with the
//! singular U/t term at t = 0 taken in the limit sense.
inline double stationary_residual(const DiracProfile& p, const Nonlinearity& nl, int n) {
  if (n != p.grid().dim)
    throw std::invalid_argument("stationary_residual: n does not match the grid");
  const double mu = p.m + p.omega;
  const GridFunction dV = derivative(p.V);
  const GridFunction dU = derivative(p.U);
  double r = 0.0;
  for (int j = 0; j + 1 < p.grid().n_points; ++j) {
    const double V = p.V.values[j], U = p.U.values[j];
    const double s = V * V - p.eps * p.eps * U * U;
    const double sf = scaled_f(nl, p.eps, s);
    const double damp = (j == 0) ? (n - 1) * dU.values[0]
                                 : (n - 1) * U / p.grid().t(j);
    const double r1 = dU.values[j] + damp + V / mu - sf * V;
    const double r2 = dV.values[j] + mu * U - p.eps * p.eps * sf * U;
    r = std::max(r, std::max(std::abs(r1), std::abs(r2)));
  }
  return r;
}

//! Picard iteration for the fixed-point form A(eps) W = G(eps, W), starting
//! from the warm start (or zero) and damping the update when requested.
//! Convergence holds only for eps small enough; failure to contract within
//! the iteration cap is reported as NoConvergenceError.
inline DiracProfile solve_profile_fixed_point(double eps, const HatPair& hat,
                                              const Nonlinearity& nl, const BandedOperator& opA,
                                              const SolverOptions& opts = {},
                                              std::vector<double>* step_norms = nullptr) {
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("solve_profile_fixed_point: tolerance must be positive");
  if (opts.max_iterations < 1) throw std::invalid_argument("solve_profile_fixed_point: need max_iterations >= 1");
  if (!(opts.damping > 0.0) || !(opts.damping <= 1.0))
    throw std::invalid_argument("solve_profile_fixed_point: damping must lie in (0, 1]");
  if (opA.kind != BandedOperator::Kind::PairA)
    throw std::invalid_argument("solve_profile_fixed_point: operator is not A(eps)");
  if (std::abs(opA.eps - eps) > 1e-13 * std::max(1.0, hat.m))
    throw std::invalid_argument("solve_profile_fixed_point: operator assembled at a different eps");
  require_same_grid(opA.grid, hat.grid(), "solve_profile_fixed_point");

  const BandedFactorization lu(opA);
  GridFunction tv = opts.warm_start ? opts.warm_start->first
                                    : GridFunction::zero(hat.grid(), Parity::Even);
  GridFunction tu = opts.warm_start ? opts.warm_start->second
                                    : GridFunction::zero(hat.grid(), Parity::Odd);
  require_same_grid(tv.grid, hat.grid(), "solve_profile_fixed_point warm start");

  for (int it = 1; it <= opts.max_iterations; ++it) {
    auto [g1, g2] = eval_G(eps, hat, tv, tu, nl);
    auto [nv, nu] = lu.solve(g1, g2);
    double dmax;
    {
      std::vector<double> dv(nv.size()), du(nu.size());
      for (int j = 0; j < nv.size(); ++j) {
        dv[j] = (nv.values[j] - tv.values[j]) * opts.damping;
        du[j] = (nu.values[j] - tu.values[j]) * opts.damping;
      }
      du[0] = 0.0;
      GridFunction dvf(hat.grid(), std::move(dv), Parity::Even);
      GridFunction duf(hat.grid(), std::move(du), Parity::Odd);
      dmax = norm_X(dvf, duf);
      for (int j = 0; j < nv.size(); ++j) {
        tv.values[j] += dvf.values[j];
        tu.values[j] += duf.values[j];
      }
      tu.values[0] = 0.0;
    }
    if (step_norms) step_norms->push_back(dmax);
    if (dmax < opts.tolerance) {
      DiracProfile p = make_profile(eps, hat, std::move(tv), std::move(tu), it, 0.0);
      p.residual = stationary_residual(p, nl, hat.grid().dim);
      return p;
    }
  }
  throw NoConvergenceError(
      "solve_profile_fixed_point: no contraction within the iteration cap (eps likely too large)");
}

namespace detail {

struct DiracRhs {
  int n;
  double eps;
  double mu;  // m + omega
  const Nonlinearity* nl;
  // y = (V, U)
  std::pair<double, double> operator()(double t, double V, double U) const {
    const double s = V * V - eps * eps * U * U;
    const double sf = scaled_f(*nl, eps, s);
    const double dV = -mu * U + eps * eps * sf * U;
    if (t <= 0.0) return {dV, (sf * V - V / mu) / n};
    return {dV, -V / mu - (n - 1) * U / t + sf * V};
  }
};

inline ShotEnd classify_dirac_shot(const DiracRhs& f, const Grid& grid, double V0, double blowup) {
  double V = V0, U = 0.0;
  const double h = grid.dt();
  for (int j = 0; j + 1 < grid.n_points; ++j) {
    const double U_prev = U;
    double kv1, ku1;
    std::tie(kv1, ku1) = f(grid.t(j), V, U);
    auto [kv2, ku2] = f(grid.t(j) + 0.5 * h, V + 0.5 * h * kv1, U + 0.5 * h * ku1);
    auto [kv3, ku3] = f(grid.t(j) + 0.5 * h, V + 0.5 * h * kv2, U + 0.5 * h * ku2);
    auto [kv4, ku4] = f(grid.t(j) + h, V + h * kv3, U + h * ku3);
    V += h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    U += h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
    // a non-finite or exploding step while V was still falling (U >= 0) is a
    // stiff overshoot of the zero crossing
    if (!std::isfinite(V) || !std::isfinite(U))
      return U_prev >= 0.0 ? ShotEnd::Crossed : ShotEnd::TurnedBack;
    if (V < 0.0) return ShotEnd::Crossed;
    if (V > blowup) return U_prev >= 0.0 ? ShotEnd::Crossed : ShotEnd::TurnedBack;
    if (U < 0.0 && V > 0.1 * V0) return ShotEnd::TurnedBack;
  }
  return V > 0.0 ? ShotEnd::TurnedBack : ShotEnd::Crossed;
}

}  // namespace detail

//! Direct integration of the rescaled first-order system with U(0) = 0 and
//! bisection on V(0) between blow-up and sign change; the limiting pair is
//! computed internally so the correction fields can be reported. The tail
//! beyond the amplitude-resolution horizon is continued with the decaying
//! solution of the linear far-field system.
inline DiracProfile solve_profile_shooting(double eps, int n, double m, const Nonlinearity& nl,
                                           const Grid& grid, const ShootingOptions& opts = {}) {
  if (!(eps > 0.0) || !(eps < m)) throw std::invalid_argument("solve_profile_shooting: need 0 < eps < m");
  GroundstateOptions gopts;
  gopts.tail_tol = 1e-4;  // the internal hat only needs a qualitatively resolved tail
  const GroundstateProfile gs = solve_groundstate(n, nl.k, m, grid, gopts);
  const HatPair hat = hat_pair(gs, grid);

  const double omega = std::sqrt(m * m - eps * eps);
  const detail::DiracRhs rhs{n, eps, m + omega, &nl};

  double lo = opts.v0_bracket.first > 0.0 ? opts.v0_bracket.first : 0.5 * gs.u0;
  double hi = opts.v0_bracket.second > 0.0 ? opts.v0_bracket.second : 2.0 * gs.u0;
  if (!(lo < hi)) throw std::invalid_argument("solve_profile_shooting: bracket must be ordered");
  auto blowup = [&] { return opts.blowup_threshold > 0.0 ? opts.blowup_threshold : 2.0 * hi; };

  int widen = 0;
  while (detail::classify_dirac_shot(rhs, grid, lo, blowup()) == detail::ShotEnd::Crossed) {
    lo *= 0.5;
    if (++widen > opts.max_widenings)
      throw BracketError("solve_profile_shooting: could not bracket from below");
  }
  while (detail::classify_dirac_shot(rhs, grid, hi, blowup()) == detail::ShotEnd::TurnedBack) {
    hi *= 2.0;
    if (++widen > opts.max_widenings)
      throw BracketError("solve_profile_shooting: could not bracket from above");
  }

  int bisections = 0;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (opts.bisection_tol > 0.0 && (hi - lo) <= opts.bisection_tol * hi) break;
    if (++bisections > opts.max_bisections)
      throw NoConvergenceError("solve_profile_shooting: bisection did not converge");
    if (detail::classify_dirac_shot(rhs, grid, mid, blowup()) == detail::ShotEnd::Crossed)
      hi = mid;
    else
      lo = mid;
  }

  const double V0 = 0.5 * (lo + hi);
  const double delta_rel = std::max((hi - lo) / V0, 8.0 * std::numeric_limits<double>::epsilon());
  const double t_patch = 0.25 * std::log(3.0 / delta_rel);

  const int N = grid.n_points;
  const double h = grid.dt();
  std::vector<double> V(N), U(N);
  V[0] = V0;
  U[0] = 0.0;
  int jp = N;
  for (int j = 1; j < N; ++j) {
    double vv = V[j - 1], uu = U[j - 1];
    double kv1, ku1;
    std::tie(kv1, ku1) = rhs(grid.t(j - 1), vv, uu);
    auto [kv2, ku2] = rhs(grid.t(j - 1) + 0.5 * h, vv + 0.5 * h * kv1, uu + 0.5 * h * ku1);
    auto [kv3, ku3] = rhs(grid.t(j - 1) + 0.5 * h, vv + 0.5 * h * kv2, uu + 0.5 * h * ku2);
    auto [kv4, ku4] = rhs(grid.t(j - 1) + h, vv + h * kv3, uu + h * ku3);
    V[j] = vv + h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    U[j] = uu + h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
    if (grid.t(j) >= t_patch || V[j] <= 0.0 || U[j] <= 0.0) {
      jp = j;
      break;
    }
  }
  if (jp < N) {
    auto [psi0, dpsi0] = detail::tail_model(n, grid.t(jp));
    const double c = V[jp] / psi0;
    U[jp] = -c * dpsi0 / (m + omega);
    for (int j = jp + 1; j < N; ++j) {
      auto [psi, dpsi] = detail::tail_model(n, grid.t(j));
      V[j] = c * psi;
      U[j] = -c * dpsi / (m + omega);
    }
  }

  std::vector<double> tv(N), tu(N);
  for (int j = 0; j < N; ++j) {
    tv[j] = V[j] - hat.vhat.values[j];
    tu[j] = U[j] - hat.uhat.values[j];
  }
  tu[0] = 0.0;
  GridFunction tilde_V(grid, std::move(tv), Parity::Even);
  GridFunction tilde_U(grid, std::move(tu), Parity::Odd);
  DiracProfile p = make_profile(eps, hat, std::move(tilde_V), std::move(tilde_U), bisections, 0.0);
  p.residual = stationary_residual(p, nl, n);
  return p;
}

//! Sequential continuation over a strictly decreasing eps grid with warm
//! starts. A failing point truncates the branch; the partial branch is
//! returned with the failure recorded.
inline Branch continue_branch(const std::vector<double>& eps_values, const HatPair& hat,
                              const Nonlinearity& nl, const Grid& grid,
                              const SolverOptions& opts = {}, double gamma = 0.1) {
  require_same_grid(hat.grid(), grid, "continue_branch");
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] > 0.0) || !(eps_values[i] < hat.m))
      throw std::invalid_argument("continue_branch: eps values must lie in (0, m)");
    if (i > 0 && !(eps_values[i] < eps_values[i - 1]))
      throw std::invalid_argument("continue_branch: eps values must be strictly decreasing");
  }
  Branch branch(hat, nl, gamma);
  SolverOptions point_opts = opts;
  for (double eps : eps_values) {
    try {
      const BandedOperator opA = assemble_A(eps, hat, grid);
      DiracProfile p = solve_profile_fixed_point(eps, hat, nl, opA, point_opts);
      point_opts.warm_start = std::make_pair(p.tilde_V, p.tilde_U);
      const double Q = charge(p, grid.dim);
      const double E = energy(p, nl, grid.dim);
      const double w = norm_X1_weighted(p.tilde_V, p.tilde_U, gamma);
      branch.push(BranchPoint{std::move(p), Q, E, w});
    } catch (const std::exception& e) {
      branch.truncated = true;
      branch.failure = "eps = " + std::to_string(eps) + ": " + e.what();
      break;
    }
  }
  return branch;
}

//! Largest eps in (0, eps_hi] at which the fixed-point iteration still
//! converges, located by bisection on the convergence predicate.
inline double max_converging_eps(const HatPair& hat, const Nonlinearity& nl, const Grid& grid,
                                 const SolverOptions& opts = {}, double eps_hi = 0.0,
                                 double rel_tol = 0.05) {
  double hi = eps_hi > 0.0 ? eps_hi : 0.99 * hat.m;
  auto converges = [&](double eps) {
    try {
      solve_profile_fixed_point(eps, hat, nl, assemble_A(eps, hat, grid), opts);
      return true;
    } catch (const NoConvergenceError&) {
      return false;
    } catch (const PositivityLossError&) {
      return false;
    }
  };
  if (converges(hi)) return hi;
  double lo = hi;
  for (int i = 0; i < 60 && !converges(lo); ++i) lo *= 0.5;
  if (!converges(lo)) throw NoConvergenceError("max_converging_eps: no converging eps found");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (converges(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace solerwave
