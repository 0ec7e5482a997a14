#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solerwave/grid.hpp"
#include "solerwave/nonlinearity.hpp"

namespace solerwave {

//! Limiting pair at eps = 0: vhat(t) = u_k(|t|) (even, strictly positive) and
//! uhat = -vhat'/(2m) (odd). Carries the mass m and the leading exponent k of
//! the groundstate it came from.
struct HatPair {
  GridFunction vhat;
  GridFunction uhat;
  double m;
  double k;

  HatPair(GridFunction vhat_, GridFunction uhat_, double m_, double k_,
          std::optional<double> residual_tol = std::nullopt)
      : vhat(std::move(vhat_)), uhat(std::move(uhat_)), m(m_), k(k_) {
    require_same_grid(vhat.grid, uhat.grid, "HatPair");
    if (vhat.parity != Parity::Even || uhat.parity != Parity::Odd)
      throw std::invalid_argument("HatPair: vhat must be even and uhat odd");
    if (!(m > 0.0) || !(k > 0.0)) throw std::invalid_argument("HatPair: m and k must be positive");
    double vmax = 0.0;
    for (double v : vhat.values) {
      if (!(v > 0.0)) throw std::invalid_argument("HatPair: vhat must be strictly positive");
      vmax = std::max(vmax, v);
    }
    // first-order relation vhat' + 2m uhat = 0, checked at discretization order
    const GridFunction dv = derivative(vhat);
    double res = 0.0;
    for (int j = 0; j + 1 < vhat.size(); ++j)
      res = std::max(res, std::abs(dv.values[j] + 2.0 * m * uhat.values[j]));
    const double h = vhat.grid.dt();
    const double tol = residual_tol.value_or(100.0 * h * h * std::max(1.0, vmax));
    if (res > tol)
      throw std::invalid_argument("HatPair: residual of vhat' + 2m uhat = " + std::to_string(res) +
                                  " exceeds tolerance " + std::to_string(tol));
  }

  const Grid& grid() const { return vhat.grid; }
};

//! One solitary-wave profile at fixed eps in rescaled variables, together
//! with the correction pair it was built from and solver metadata.
struct DiracProfile {
  double eps;
  double omega;
  double m;
  double k;  //!< leading nonlinearity exponent, needed to unscale
  GridFunction V;
  GridFunction U;
  GridFunction tilde_V;
  GridFunction tilde_U;
  int iterations = 0;
  double residual = 0.0;

  DiracProfile(double eps_, double m_, double k_, GridFunction V_, GridFunction U_,
               GridFunction tV, GridFunction tU, int iterations_, double residual_)
      : eps(eps_),
        omega(std::sqrt(m_ * m_ - eps_ * eps_)),
        m(m_),
        k(k_),
        V(std::move(V_)),
        U(std::move(U_)),
        tilde_V(std::move(tV)),
        tilde_U(std::move(tU)),
        iterations(iterations_),
        residual(residual_) {
    if (!(eps > 0.0) || !(eps < m)) throw std::invalid_argument("DiracProfile: need 0 < eps < m");
    require_same_grid(V.grid, U.grid, "DiracProfile");
    require_same_grid(V.grid, tilde_V.grid, "DiracProfile");
    require_same_grid(V.grid, tilde_U.grid, "DiracProfile");
    if (V.parity != Parity::Even || U.parity != Parity::Odd ||
        tilde_V.parity != Parity::Even || tilde_U.parity != Parity::Odd)
      throw std::invalid_argument("DiracProfile: parities must be (even, odd)");
    if (U.values[0] != 0.0) throw std::invalid_argument("DiracProfile: U(0) must vanish");
  }

  const Grid& grid() const { return V.grid; }
};

//! Assemble the profile from hat + correction so that V = vhat + tilde_V and
//! U = uhat + tilde_U hold pointwise by construction.
inline DiracProfile make_profile(double eps, const HatPair& hat, GridFunction tilde_V,
                                 GridFunction tilde_U, int iterations, double residual) {
  require_same_grid(hat.grid(), tilde_V.grid, "make_profile");
  std::vector<double> v(hat.vhat.values), u(hat.uhat.values);
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] += tilde_V.values[j];
    u[j] += tilde_U.values[j];
  }
  u[0] = 0.0;
  GridFunction V(hat.grid(), std::move(v), Parity::Even);
  GridFunction U(hat.grid(), std::move(u), Parity::Odd);
  return DiracProfile(eps, hat.m, hat.k, std::move(V), std::move(U), std::move(tilde_V),
                      std::move(tilde_U), iterations, residual);
}

//! Physical-variable samples v(r) = eps^{1/k} V(eps r), u(r) = eps^{1+1/k} U(eps r).
struct UnscaledProfile {
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> u;
};

//! Sample the physical profiles on the given radii by linear interpolation of
//! the rescaled samples; eps * r must stay inside the rescaled grid.
inline UnscaledProfile unscale(const DiracProfile& p, const std::vector<double>& r_values) {
  const Grid& g = p.grid();
  const double h = g.dt();
  const double av = std::pow(p.eps, 1.0 / p.k);
  const double au = std::pow(p.eps, 1.0 + 1.0 / p.k);
  UnscaledProfile out;
  out.r = r_values;
  out.v.resize(r_values.size());
  out.u.resize(r_values.size());
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    const double t = p.eps * r_values[i];
    if (t < 0.0 || t > g.t_max * (1.0 + 1e-12))
      throw WindowError("unscale: eps * r outside the rescaled grid");
    const double x = std::min(t / h, static_cast<double>(g.n_points - 1));
    const int j = std::min(static_cast<int>(x), g.n_points - 2);
    const double w = x - j;
    out.v[i] = av * ((1.0 - w) * p.V.values[j] + w * p.V.values[j + 1]);
    out.u[i] = au * ((1.0 - w) * p.U.values[j] + w * p.U.values[j + 1]);
  }
  return out;
}

//! One continuation point with its observables.
struct BranchPoint {
  DiracProfile profile;
  double Q;                    //!< charge
  double E;                    //!< energy
  double tilde_norm_weighted;  //!< weighted X^1 norm of the correction pair
};

//! Ordered continuation family over strictly decreasing eps.
struct Branch {
  std::vector<BranchPoint> points;
  HatPair hat;
  Nonlinearity nl;
  double gamma;  //!< weight used in tilde_norm_weighted
  bool truncated = false;
  std::string failure;

  Branch(HatPair hat_, Nonlinearity nl_, double gamma_)
      : hat(std::move(hat_)), nl(std::move(nl_)), gamma(gamma_) {}

  void push(BranchPoint p) {
    if (!points.empty() && !(p.profile.eps < points.back().profile.eps))
      throw std::invalid_argument("Branch: eps must be strictly decreasing");
    require_same_grid(p.profile.grid(), hat.grid(), "Branch");
    points.push_back(std::move(p));
  }

  std::size_t size() const { return points.size(); }
};

}  // namespace solerwave
