#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace solerwave {

//! Self-interaction of power-sum form f(tau) = |tau|^k + sum_i c_i |tau|^{K_i}.
//!
//! The leading exponent k fixes the bifurcation scaling; each term (c_i, K_i)
//! with K_i > k is a subleading perturbation.
struct Nonlinearity {
  struct Term {
    double c;  //!< coefficient
    double K;  //!< exponent, must exceed k
  };

  double k;
  std::vector<Term> terms;

  explicit Nonlinearity(double k_, std::vector<Term> terms_ = {})
      : k(k_), terms(std::move(terms_)) {
    if (!std::isfinite(k) || !(k > 0.0))
      throw std::invalid_argument("Nonlinearity: leading exponent k must be positive");
    for (const auto& t : terms) {
      if (!std::isfinite(t.c) || !std::isfinite(t.K))
        throw std::invalid_argument("Nonlinearity: term (c, K) must be finite");
      if (!(t.K > k))
        throw std::invalid_argument("Nonlinearity: perturbation exponent K must exceed k");
    }
  }

  static Nonlinearity pure_power(double k) { return Nonlinearity(k); }

  bool is_pure_power() const { return terms.empty(); }

  //! Smallest perturbation exponent; +infinity for a pure power.
  double min_perturbation_exponent() const {
    double K = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) K = std::min(K, t.K);
    return K;
  }

  bool operator==(const Nonlinearity& o) const {
    if (k != o.k || terms.size() != o.terms.size()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i].c != o.terms[i].c || terms[i].K != o.terms[i].K) return false;
    return true;
  }
};

//! f(tau) = |tau|^k + sum_i c_i |tau|^{K_i}. Total on the real line.
inline double eval_f(const Nonlinearity& nl, double tau) {
  const double a = std::abs(tau);
  double v = std::pow(a, nl.k);
  for (const auto& t : nl.terms) v += t.c * std::pow(a, t.K);
  return v;
}

//! f'(tau) = k |tau|^{k-1} sgn(tau) + sum_i c_i K_i |tau|^{K_i-1} sgn(tau).
//!
//! Throws std::domain_error at tau = 0 when an exponent below one makes the
//! derivative singular there.
inline double eval_f_prime(const Nonlinearity& nl, double tau) {
  if (tau == 0.0) {
    bool singular = nl.k < 1.0;
    for (const auto& t : nl.terms) singular = singular || t.K < 1.0;
    if (singular)
      throw std::domain_error("eval_f_prime: derivative is singular at tau = 0");
  }
  const double a = std::abs(tau);
  const double s = (tau > 0.0) ? 1.0 : (tau < 0.0 ? -1.0 : 0.0);
  double v = nl.k * std::pow(a, nl.k - 1.0) * s;
  for (const auto& t : nl.terms) v += t.c * t.K * std::pow(a, t.K - 1.0) * s;
  return v;
}

//! Antiderivative F(tau) = int_0^tau f = |tau|^k tau / (k+1) + ...
inline double eval_F(const Nonlinearity& nl, double tau) {
  const double a = std::abs(tau);
  double v = std::pow(a, nl.k) * tau / (nl.k + 1.0);
  for (const auto& t : nl.terms) v += t.c * std::pow(a, t.K) * tau / (t.K + 1.0);
  return v;
}

//! Rate exponent kappa = min(1, K_min/k - 1). A pure power counts as
//! K = infinity, hence kappa = 1.
inline double kappa(const Nonlinearity& nl) {
  if (nl.is_pure_power()) return 1.0;
  return std::min(1.0, nl.min_perturbation_exponent() / nl.k - 1.0);
}

//! eps^{-2} f(eps^{2/k} s), expanded exponent-by-exponent so that no tiny
//! intermediate f-value is divided by eps^2:
//!   |s|^k + sum_i c_i eps^{2 K_i / k - 2} |s|^{K_i}.
//! For a pure power this is exactly |s|^k, independent of eps.
inline double scaled_f(const Nonlinearity& nl, double eps, double s) {
  const double a = std::abs(s);
  double v = std::pow(a, nl.k);
  for (const auto& t : nl.terms)
    v += t.c * std::pow(eps, 2.0 * t.K / nl.k - 2.0) * std::pow(a, t.K);
  return v;
}

//! Monotone majorant H with |f(tau) - |tau|^k| <= |tau|^k H(tau) for tau >= 0:
//! H(tau) = sum_i |c_i| tau^{K_i - k}.
inline double majorant_H(const Nonlinearity& nl, double tau) {
  double v = 0.0;
  for (const auto& t : nl.terms) v += std::abs(t.c) * std::pow(tau, t.K - nl.k);
  return v;
}

}  // namespace solerwave
