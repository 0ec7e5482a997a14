#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "solerwave/errors.hpp"
#include "solerwave/grid.hpp"
#include "solerwave/groundstate.hpp"
#include "solerwave/nonlinearity.hpp"
#include "solerwave/norms.hpp"
#include "solerwave/profiles.hpp"

namespace solerwave {

//! Surface area of the unit sphere S^{n-1}; vol(S^0) = 2 makes the 1D radial
//! convention match integrals over the line.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

//! Charge Q = eps^{2/k-n} vol(S^{n-1}) int_0^inf (V^2 + eps^2 U^2) t^{n-1} dt.
inline double charge(const DiracProfile& p, int n) {
  if (n != p.grid().dim) throw std::invalid_argument("charge: n does not match the profile grid");
  std::vector<double> f(p.grid().n_points);
  for (int j = 0; j < p.grid().n_points; ++j) {
    const double V = p.V.values[j], U = p.U.values[j];
    f[j] = V * V + p.eps * p.eps * U * U;
  }
  return std::pow(p.eps, 2.0 / p.k - n) * sphere_area(n) * radial_integral(p.grid(), f);
}

//! Energy through the on-shell identity E = w Q + vol int (f(s)s - F(s)) r^{n-1} dr
//! with s = v^2 - u^2; valid only when the profile solves the stationary
//! system, so a stale profile (large stored residual) is rejected.
inline double energy(const DiracProfile& p, const Nonlinearity& nl, int n,
                     double residual_tol = 1e-2) {
  if (n != p.grid().dim) throw std::invalid_argument("energy: n does not match the profile grid");
  if (!(p.residual <= residual_tol))
    throw StaleProfileError("energy: stationary residual " + std::to_string(p.residual) +
                            " exceeds " + std::to_string(residual_tol));
  const double Q = charge(p, n);
  // per power p_e with coefficient c: f s - F contributes c p_e/(p_e+1) |s|^{p_e} s,
  // and s = eps^{2/k} S pulls out eps^{(2/k)(p_e+1)} of the rescaled S = V^2 - eps^2 U^2
  std::vector<std::pair<double, double>> powers;
  powers.emplace_back(1.0, nl.k);
  for (const auto& t : nl.terms) powers.emplace_back(t.c, t.K);

  const int N = p.grid().n_points;
  std::vector<double> S(N);
  for (int j = 0; j < N; ++j) {
    const double V = p.V.values[j], U = p.U.values[j];
    S[j] = V * V - p.eps * p.eps * U * U;
  }
  double interaction = 0.0;
  std::vector<double> f(N);
  for (const auto& [c, pe] : powers) {
    for (int j = 0; j < N; ++j) f[j] = std::pow(std::abs(S[j]), pe) * S[j];
    interaction += c * (pe / (pe + 1.0)) * std::pow(p.eps, (2.0 / p.k) * (pe + 1.0) - n) *
                   radial_integral(p.grid(), f);
  }
  return p.omega * Q + sphere_area(n) * interaction;
}

//! Centered finite differences of Q over the recorded omega values; one-sided
//! at the endpoints. Entries follow branch order (decreasing eps).
inline std::vector<std::pair<double, double>> dQ_domega(const Branch& branch) {
  const std::size_t P = branch.size();
  if (P < 3) throw std::invalid_argument("dQ_domega: need at least 3 branch points");
  std::vector<double> w(P), Q(P);
  for (std::size_t i = 0; i < P; ++i) {
    w[i] = branch.points[i].profile.omega;
    Q[i] = branch.points[i].Q;
  }
  std::vector<std::pair<double, double>> out(P);
  out[0] = {w[0], (Q[1] - Q[0]) / (w[1] - w[0])};
  for (std::size_t i = 1; i + 1 < P; ++i)
    out[i] = {w[i], (Q[i + 1] - Q[i - 1]) / (w[i + 1] - w[i - 1])};
  out[P - 1] = {w[P - 1], (Q[P - 1] - Q[P - 2]) / (w[P - 1] - w[P - 2])};
  return out;
}

//! Vakhitov-Kolokolov classification of one branch.
struct VKVerdict {
  enum class Regime { Subcritical, Critical, Supercritical };
  enum class Sign { Negative, Positive, Indeterminate };

  Regime regime;
  Sign expected_sign;
  Sign measured_sign;
  std::optional<double> slope;  //!< fitted d log|dQ/deps| / d log eps, critical case only
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

//! Regime from the exponents, measured sign from dQ/domega at the three
//! smallest eps; the critical case also fits the slope of |dQ/deps| vs eps.
inline VKVerdict vk_classify(const Nonlinearity& nl, int n, const Branch& branch) {
  if (!(nl == branch.nl)) throw std::invalid_argument("vk_classify: branch uses a different nonlinearity");
  if (n != branch.hat.grid().dim)
    throw std::invalid_argument("vk_classify: n does not match the branch grid");
  if (branch.size() < 3) throw std::invalid_argument("vk_classify: need at least 3 branch points");

  const double crit = 2.0 / n;
  VKVerdict v{};
  if (std::abs(nl.k - crit) <= 1e-12 * crit)
    v.regime = VKVerdict::Regime::Critical;
  else if (nl.k < crit)
    v.regime = VKVerdict::Regime::Subcritical;
  else
    v.regime = VKVerdict::Regime::Supercritical;
  v.expected_sign = (v.regime == VKVerdict::Regime::Supercritical) ? VKVerdict::Sign::Positive
                                                                   : VKVerdict::Sign::Negative;

  const auto dq = dQ_domega(branch);
  bool all_neg = true, all_pos = true;
  for (std::size_t i = dq.size() - 3; i < dq.size(); ++i) {
    all_neg = all_neg && dq[i].second < 0.0;
    all_pos = all_pos && dq[i].second > 0.0;
  }
  v.measured_sign = all_neg   ? VKVerdict::Sign::Negative
                    : all_pos ? VKVerdict::Sign::Positive
                              : VKVerdict::Sign::Indeterminate;

  if (v.regime == VKVerdict::Regime::Critical) {
    std::vector<double> lx, ly;
    for (std::size_t i = 1; i + 1 < branch.size(); ++i) {
      const double e_hi = branch.points[i - 1].profile.eps;
      const double e_lo = branch.points[i + 1].profile.eps;
      const double dQde = (branch.points[i + 1].Q - branch.points[i - 1].Q) / (e_lo - e_hi);
      if (dQde == 0.0) continue;
      lx.push_back(std::log(branch.points[i].profile.eps));
      ly.push_back(std::log(std::abs(dQde)));
    }
    if (lx.size() >= 2) v.slope = detail::least_squares_slope(lx, ly);
  }
  return v;
}

//! Pointwise positivity margins of one profile.
struct PositivityReport {
  double min_ratio_uv;      //!< min over nodes with U != 0 of V / (2 eps |U|)
  double min_scalar_ratio;  //!< min over nodes of (V^2-eps^2 U^2) / ((V^2+eps^2 U^2)/2)
  bool pass;                //!< both margins >= 1
};

inline PositivityReport positivity_report(const DiracProfile& p) {
  double r_uv = std::numeric_limits<double>::infinity();
  double r_sc = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p.grid().n_points; ++j) {
    const double V = p.V.values[j], U = p.U.values[j];
    if (U != 0.0) r_uv = std::min(r_uv, V / (2.0 * p.eps * std::abs(U)));
    const double den = 0.5 * (V * V + p.eps * p.eps * U * U);
    if (den > 0.0) r_sc = std::min(r_sc, (V * V - p.eps * p.eps * U * U) / den);
  }
  return {r_uv, r_sc, r_uv >= 1.0 && r_sc >= 1.0};
}

//! True iff every node with t in [T1, t_cut] satisfies the strict cone bounds
//! V > 0, U > 0, V/(4m) < U < 2V/m, where t_cut is the last node with V above
//! 100x machine epsilon.
inline bool cone_region_check(const DiracProfile& p, double T1) {
  const int n = p.grid().dim;
  if (!(T1 >= 2.0 * n)) throw std::invalid_argument("cone_region_check: need T1 >= 2n");
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  int j_cut = -1;
  for (int j = 0; j < p.grid().n_points; ++j)
    if (p.V.values[j] > floor) j_cut = j;
  for (int j = 0; j <= j_cut; ++j) {
    const double t = p.grid().t(j);
    if (t < T1) continue;
    const double V = p.V.values[j], U = p.U.values[j];
    if (!(V > 0.0 && U > 0.0)) return false;
    if (!(V / (4.0 * p.m) < U && U < 2.0 * V / p.m)) return false;
  }
  return true;
}

//! Inflow of the phase-plane vector field on the straight boundary pieces of
//! the trapping regions (the delta-circle arcs excluded): samples each piece
//! and requires a strictly positive inner-normal dot product everywhere.
inline bool boundary_inflow_check(double eps, const Nonlinearity& nl, const HatPair& hat,
                                  double delta, double nu, double t_eval, int sample_count) {
  const double m = hat.m;
  if (!(eps > 0.0) || !(eps < m)) throw std::invalid_argument("boundary_inflow_check: bad eps");
  if (!(delta > 0.0) || !(delta <= 0.05 * hat.vhat.values[0]))
    throw std::invalid_argument("boundary_inflow_check: delta must be small (<= 0.05 vhat(0))");
  if (!(nu > 0.0) || !(nu < std::min(delta / 8.0, m * delta / 8.0)))
    throw std::invalid_argument("boundary_inflow_check: nu must satisfy nu < min(delta, m delta)/8");
  const int n = hat.grid().dim;
  if (!(t_eval >= 2.0 * n)) throw std::invalid_argument("boundary_inflow_check: need t >= 2n");
  if (sample_count < 6) throw std::invalid_argument("boundary_inflow_check: too few samples");

  const double omega = std::sqrt(m * m - eps * eps);
  const double mu = m + omega;
  auto field = [&](double V, double U) {
    const double s = V * V - eps * eps * U * U;
    const double sf = scaled_f(nl, eps, s);
    const double dU = -V / mu - (n - 1) * U / t_eval + sf * V;
    const double dV = -mu * U + eps * eps * sf * U;
    return std::pair<double, double>{dV, dU};
  };
  auto inflow = [&](double V, double U, double nx, double ny) {
    auto [dV, dU] = field(V, U);
    return nx * dV + ny * dU > 0.0;
  };

  const int per = std::max(2, sample_count / 6);
  bool ok = true;
  for (int i = 0; i < per && ok; ++i) {
    const double s = (i + 0.5) / per;
    {  // K+ piece U = 0, V in [-delta, -nu]; inner normal (0, 1)
      const double V = -delta + s * (delta - nu);
      ok = ok && inflow(V, 0.0, 0.0, 1.0);
    }
    {  // K+ piece U = (V+nu)/m, V in [-nu, nu]; inner normal (-1, m)
      const double V = -nu + s * 2.0 * nu;
      ok = ok && inflow(V, (V + nu) / m, -1.0, m);
    }
    {  // K+ piece U = 2V/m, V from nu to the delta circle; inner normal (-2, m)
      const double vmax = delta / std::sqrt(1.0 + 4.0 / (m * m));
      const double V = nu + s * (vmax - nu);
      ok = ok && inflow(V, 2.0 * V / m, -2.0, m);
    }
    {  // K- piece V = 0, U in [-delta, -nu/(2m)]; inner normal (1, 0)
      const double U = -delta + s * (delta - nu / (2.0 * m));
      ok = ok && inflow(0.0, U, 1.0, 0.0);
    }
    {  // K- piece U = (V-nu)/(2m), V in [0, 2nu]; inner normal (1, -2m)
      const double V = s * 2.0 * nu;
      ok = ok && inflow(V, (V - nu) / (2.0 * m), 1.0, -2.0 * m);
    }
    {  // K- piece U = V/(4m), V from 2nu to the delta circle; inner normal (1, -4m)
      const double vmax = delta / std::sqrt(1.0 + 1.0 / (16.0 * m * m));
      const double V = 2.0 * nu + s * (vmax - 2.0 * nu);
      ok = ok && inflow(V, V / (4.0 * m), 1.0, -4.0 * m);
    }
  }
  return ok;
}

//! Tail envelope diagnostics over a window.
struct DecayFit {
  double t_lo, t_hi;
  double ratio_min, ratio_max;  //!< bounds of V(t) <t>^{(n-1)/2} e^t over the window
  double rate_estimate;         //!< least-squares slope of log V vs t
};

namespace detail {

inline DecayFit decay_fit_values(const Grid& grid, const std::vector<double>& V, double t_lo,
                                 double t_hi) {
  if (!(t_lo <= t_hi) || t_lo < 0.0 || t_hi > grid.t_max + 1e-12)
    throw WindowError("decay_fit: window outside grid");
  const double p = 0.25 * (grid.dim - 1);  // <t>^{(n-1)/2} = (1+t^2)^{(n-1)/4}
  DecayFit fit{t_lo, t_hi, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  std::vector<double> xs, ys;
  for (int j = 0; j < grid.n_points; ++j) {
    const double t = grid.t(j);
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    if (!(V[j] > 0.0)) throw WindowError("decay_fit: nonpositive value in window");
    const double val = V[j] * std::pow(1.0 + t * t, p) * std::exp(t);
    if (!std::isfinite(val)) throw WindowError("decay_fit: overflow in window");
    fit.ratio_min = std::min(fit.ratio_min, val);
    fit.ratio_max = std::max(fit.ratio_max, val);
    xs.push_back(t);
    ys.push_back(std::log(V[j]));
  }
  if (xs.size() < 2) throw WindowError("decay_fit: window contains fewer than 2 nodes");
  fit.rate_estimate = least_squares_slope(xs, ys);
  return fit;
}

}  // namespace detail

inline DecayFit decay_fit(const DiracProfile& p, double t_lo, double t_hi) {
  return detail::decay_fit_values(p.grid(), p.V.values, t_lo, t_hi);
}

inline DecayFit decay_fit(const HatPair& hat, double t_lo, double t_hi) {
  return detail::decay_fit_values(hat.grid(), hat.vhat.values, t_lo, t_hi);
}

//! Least-squares slope of log ||e^{gamma <t>} tilde W||_{X^1} against log eps.
inline double error_scaling_fit(const Branch& branch, double gamma) {
  if (branch.size() < 4) throw std::invalid_argument("error_scaling_fit: need >= 4 branch points");
  std::vector<double> lx, ly;
  for (const auto& bp : branch.points) {
    lx.push_back(std::log(bp.profile.eps));
    ly.push_back(std::log(norm_X1_weighted(bp.profile.tilde_V, bp.profile.tilde_U, gamma)));
  }
  return detail::least_squares_slope(lx, ly);
}

//! Scaling of the omega-derivative of the physical profile along a branch.
struct DphiScaling {
  double slope;  //!< fitted d log ||d_omega phi||^2 / d log eps
  std::vector<std::pair<double, double>> norm_sq;  //!< (eps, ||d_omega phi||^2) per interior point
};

//! ||d_omega phi||^2 per interior branch point by finite differences in eps of
//! the unscaled profiles on a shared radial grid, mapped through
//! d_omega = -(omega/eps) d_eps; returns the fitted log-log slope.
inline DphiScaling dphi_domega_scaling(const Branch& branch) {
  const std::size_t P = branch.size();
  if (P < 4) throw std::invalid_argument("dphi_domega_scaling: need >= 4 branch points");
  const Grid& g = branch.hat.grid();
  const int n = g.dim;
  DphiScaling out{};
  for (std::size_t i = 1; i + 1 < P; ++i) {
    const auto& lo = branch.points[i + 1].profile;  // smaller eps
    const auto& mid = branch.points[i].profile;
    const auto& hi = branch.points[i - 1].profile;  // larger eps
    // the largest eps of the triple fixes the reachable radial range
    std::vector<double> r(g.n_points);
    for (int j = 0; j < g.n_points; ++j) r[j] = g.t(j) / hi.eps;
    const auto plo = unscale(lo, r);
    const auto phi = unscale(hi, r);
    const double de = lo.eps - hi.eps;
    std::vector<double> dsq(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
      const double dv = (plo.v[j] - phi.v[j]) / de;
      const double du = (plo.u[j] - phi.u[j]) / de;
      dsq[j] = dv * dv + du * du;
    }
    // trapezoid on the shared radial grid with weight r^{n-1}
    const double hr = r[1] - r[0];
    double integ = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
      const double w = (n == 1) ? 1.0 : std::pow(r[j], n - 1);
      integ += dsq[j] * w * ((j == 0 || j + 1 == g.n_points) ? 0.5 : 1.0);
    }
    integ *= hr;
    const double ratio = mid.omega / mid.eps;
    out.norm_sq.emplace_back(mid.eps, ratio * ratio * sphere_area(n) * integ);
  }
  std::vector<double> lx, ly;
  for (const auto& [e, v] : out.norm_sq) {
    lx.push_back(std::log(e));
    ly.push_back(std::log(v));
  }
  out.slope = detail::least_squares_slope(lx, ly);
  return out;
}

//! q1 = vol int (4m vhat^{2k} uhat^2 + uhat^2), q2 = vol int (vhat^2/(4m^2)
//! + 2m vhat^{2k} uhat^2 + uhat^2), radial quadratures over R^n.
inline std::pair<double, double> q1_q2(const GridFunction& vhat, const GridFunction& uhat, int n,
                                       double k, double m) {
  require_same_grid(vhat.grid, uhat.grid, "q1_q2");
  if (n != vhat.grid.dim) throw std::invalid_argument("q1_q2: n does not match the grid");
  if (!(k > 0.0) || !(m > 0.0)) throw std::invalid_argument("q1_q2: k, m must be positive");
  const int N = vhat.grid.n_points;
  std::vector<double> f1(N), f2(N);
  for (int j = 0; j < N; ++j) {
    const double v = vhat.values[j], u = uhat.values[j];
    const double pot = std::pow(std::abs(v), 2.0 * k) * u * u;
    f1[j] = 4.0 * m * pot + u * u;
    f2[j] = v * v / (4.0 * m * m) + 2.0 * m * pot + u * u;
  }
  const double vol = sphere_area(n);
  return {vol * radial_integral(vhat.grid, f1), vol * radial_integral(vhat.grid, f2)};
}

inline std::pair<double, double> q1_q2(const HatPair& hat, int n, double k, double m) {
  if (k != hat.k || m != hat.m) throw std::invalid_argument("q1_q2: (k, m) do not match the hat pair");
  return q1_q2(hat.vhat, hat.uhat, n, k, m);
}

//! Comparison of <vhat, d_eps tilde V> against eps q1 + eps (1/k - n/2) q2 at
//! each interior branch point.
struct CrosscheckPoint {
  double eps;
  double lhs;
  double rhs;
  double rel_deviation;
};

inline std::vector<CrosscheckPoint> inner_product_crosscheck(const Branch& branch,
                                                             const HatPair& hat) {
  if (branch.size() < 3)
    throw std::invalid_argument("inner_product_crosscheck: need >= 3 branch points");
  require_same_grid(branch.hat.grid(), hat.grid(), "inner_product_crosscheck");
  if (hat.k != branch.hat.k || hat.m != branch.hat.m)
    throw std::invalid_argument("inner_product_crosscheck: hat pair does not match the branch");
  const int n = hat.grid().dim;
  const auto [q1, q2] = q1_q2(hat, n, hat.k, hat.m);
  const double vol = sphere_area(n);
  std::vector<CrosscheckPoint> out;
  for (std::size_t i = 1; i + 1 < branch.size(); ++i) {
    const auto& lo = branch.points[i + 1].profile;
    const auto& mid = branch.points[i].profile;
    const auto& hi = branch.points[i - 1].profile;
    const double de = lo.eps - hi.eps;
    std::vector<double> f(hat.grid().n_points);
    for (int j = 0; j < hat.grid().n_points; ++j)
      f[j] = hat.vhat.values[j] * (lo.tilde_V.values[j] - hi.tilde_V.values[j]) / de;
    const double lhs = vol * radial_integral(hat.grid(), f);
    const double rhs = mid.eps * (q1 + (1.0 / hat.k - 0.5 * n) * q2);
    out.push_back({mid.eps, lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs)});
  }
  return out;
}

//! h(eps) = max(H(eps^{2/k} 4 Lambda_k^2), eps^{2k}, eps^2) and the scaling
//! exponent 2 kappa used by the error fits.
struct ErrorBounds {
  double h;
  double two_kappa;
};

inline ErrorBounds predicted_error_bounds(const Nonlinearity& nl, double lambda, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("predicted_error_bounds: need eps in (0, 1)");
  const double tau = std::pow(eps, 2.0 / nl.k) * 4.0 * lambda * lambda;
  const double h = std::max({majorant_H(nl, tau), std::pow(eps, 2.0 * nl.k), eps * eps});
  return {h, 2.0 * kappa(nl)};
}

}  // namespace solerwave
