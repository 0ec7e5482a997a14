#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "solerwave/analysis.hpp"
#include "solerwave/dirac_solver.hpp"
#include "solerwave/groundstate.hpp"
#include "solerwave/linearized.hpp"
#include "solerwave/norms.hpp"

namespace solerwave {

//! One verification criterion outcome with its measured values.
struct CriterionResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::vector<std::pair<std::string, double>> measured;
  std::string note;
};

inline const std::vector<std::string>& verify_criterion_ids() {
  static const std::vector<std::string> ids = {"A1", "A2", "A3", "A4",  "A5",  "A6", "A7",
                                               "A8", "A9", "A10", "A11", "A12", "A13"};
  return ids;
}

inline const std::map<std::string, std::vector<std::string>>& verify_suites() {
  static const std::map<std::string, std::vector<std::string>> suites = {
      {"groundstate", {"A1", "A2", "A3"}},
      {"solver", {"A4", "A5", "A6"}},
      {"decay", {"A7"}},
      {"vk", {"A8", "A9", "A10", "A12"}},
      {"cones", {"A11"}},
      {"properties", {"A13"}},
      {"all", verify_criterion_ids()}};
  return suites;
}

//! Runs the acceptance criteria, memoizing the expensive continuation runs
//! shared between them. Deterministic: fixed seeds and fixed grids.
class VerifyRunner {
 public:
  CriterionResult run(const std::string& id) {
    if (id == "A1") return a1();
    if (id == "A2") return a2();
    if (id == "A3") return a3();
    if (id == "A4") return a4();
    if (id == "A5") return a5();
    if (id == "A6") return a6();
    if (id == "A7") return a7();
    if (id == "A8") return a8();
    if (id == "A9") return a9();
    if (id == "A10") return a10();
    if (id == "A11") return a11();
    if (id == "A12") return a12();
    if (id == "A13") return a13();
    throw std::invalid_argument("unknown criterion " + id);
  }

 private:
  static std::vector<double> geometric_eps(double a, double b, int s) {
    std::vector<double> v(s);
    for (int i = 0; i < s; ++i) v[i] = a * std::pow(b / a, static_cast<double>(i) / (s - 1));
    return v;
  }

  struct FamilyKey {
    int n;
    double k;
    double c = 0.0, K = 0.0;  // optional perturbation term
    bool operator<(const FamilyKey& o) const {
      return std::tie(n, k, c, K) < std::tie(o.n, o.k, o.c, o.K);
    }
  };

  Nonlinearity family_nl(const FamilyKey& f) const {
    if (f.c == 0.0) return Nonlinearity::pure_power(f.k);
    return Nonlinearity(f.k, {{f.c, f.K}});
  }

  const HatPair& hat(int n, double k, double m, const Grid& grid) {
    const std::string key = std::to_string(n) + "/" + std::to_string(k) + "/" +
                            std::to_string(m) + "/" + std::to_string(grid.n_points) + "/" +
                            std::to_string(grid.t_max);
    auto it = hats_.find(key);
    if (it == hats_.end()) {
      const auto gs = solve_groundstate(n, k, m, grid);
      it = hats_.emplace(key, hat_pair(gs, grid)).first;
    }
    return it->second;
  }

  //! A5 branch grids: eps in {0.1, 0.05, 0.025, 0.0125} on [0, 35], dt 0.01.
  const Branch& a5_branch(bool perturbed) {
    const std::string key = perturbed ? "a5p" : "a5";
    auto it = branches_.find(key);
    if (it == branches_.end()) {
      Grid grid(35.0, 3501, 1);
      const auto& h = hat(1, 1.0, 1.0, grid);
      const Nonlinearity nl = perturbed ? Nonlinearity(1.0, {{0.5, 1.5}})
                                        : Nonlinearity::pure_power(1.0);
      it = branches_.emplace(key, continue_branch({0.1, 0.05, 0.025, 0.0125}, h, nl, grid))
               .first;
    }
    return it->second;
  }

  //! Sign/scaling branches: 23-point geometric continuation to eps = 0.01.
  const Branch& vk_branch(const FamilyKey& f) {
    const std::string key = "vk" + std::to_string(f.n) + "/" + std::to_string(f.k);
    auto it = branches_.find(key);
    if (it == branches_.end()) {
      // the (n=2, k=2) family needs the finer grid to keep the stationary
      // residual within the energy identity's staleness threshold
      const bool fine = f.n == 2 && f.k >= 2.0;
      Grid grid(35.0, fine ? 7001 : 3501, f.n);
      const double eps_max = fine ? 0.08 : 0.1;
      const auto& h = hat(f.n, f.k, 1.0, grid);
      it = branches_
               .emplace(key, continue_branch(geometric_eps(eps_max, 0.01, 23), h,
                                             family_nl(f), grid))
               .first;
    }
    return it->second;
  }

  CriterionResult a1() {
    CriterionResult r{"A1", "1D groundstate shooting matches the sech profile", false, {}, ""};
    const auto t0 = std::chrono::steady_clock::now();
    Grid grid(30.0, 6001, 1);
    const auto gs = solve_groundstate(1, 1.0, 1.0, grid);
    double err = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
      const double t = grid.t(j);
      if (t > 20.0) break;
      err = std::max(err, std::abs(gs.u[j] - 1.0 / std::cosh(t)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.measured = {{"max_error", err}, {"u0", gs.u0}, {"seconds", secs}};
    r.pass = err < 1e-8 && secs < 1.0;
    return r;
  }

  CriterionResult a2() {
    CriterionResult r{"A2", "l-minus annihilates the groundstate at second order", false, {}, ""};
    auto residual = [&](int N) {
      Grid grid(30.0, N, 1);
      const auto gs = solve_groundstate(1, 1.0, 1.0, grid);
      const auto lm = assemble_l_minus(gs);
      const auto res = apply_scalar(lm, gs.u);
      double m = 0.0;
      for (int j = 0; j + 1 < N; ++j) m = std::max(m, std::abs(res[j]));
      return m;
    };
    const double c = residual(3001);   // dt = 0.01
    const double f = residual(6001);   // dt = 0.005
    const double ratio = c / f;
    r.measured = {{"residual_dt_0.01", c}, {"residual_dt_0.005", f}, {"halving_ratio", ratio}};
    r.pass = c < 1e-6 && ratio >= 3.5 && ratio <= 4.5;
    if (!(c < 1e-6))
      r.note = "second-order truncation floor: the 3-point stencil gives ~2e-5 at dt = 0.01";
    return r;
  }

  CriterionResult a3() {
    CriterionResult r{"A3", "scaling-derivative identity for l-plus", false, {}, ""};
    auto residual = [](int n, int N) {
      Grid grid(30.0, N, n);
      const auto gs = solve_groundstate(n, 1.0, 1.0, grid);
      const auto lp = assemble_l_plus(gs);
      std::vector<double> g(grid.n_points);
      for (int j = 0; j < grid.n_points; ++j) g[j] = gs.u[j] / gs.k + grid.t(j) * gs.du[j];
      const auto res = apply_scalar(lp, g);
      double m = 0.0;
      for (int j = 0; j + 1 < grid.n_points; ++j)
        m = std::max(m, std::abs(res[j] + gs.u[j] / gs.m));
      return m;
    };
    double worst = 0.0;
    for (int n : {1, 3}) {
      const double m = residual(n, 3001);  // dt = 0.01
      r.measured.emplace_back("residual_n" + std::to_string(n), m);
      r.measured.emplace_back("halving_ratio_n" + std::to_string(n), m / residual(n, 6001));
      worst = std::max(worst, m);
    }
    r.pass = worst < 1e-5;
    if (!r.pass)
      r.note = "second-order truncation floor at dt = 0.01; the halving ratios show the order";
    return r;
  }

  CriterionResult a4() {
    CriterionResult r{"A4", "fixed-point and shooting profiles agree", false, {}, ""};
    bool ok = true;
    for (int n : {1, 3}) {
      Grid grid(30.0, n == 1 ? 6001 : 12001, n);
      const auto& h = hat(n, 1.0, 1.0, grid);
      const auto nl = Nonlinearity::pure_power(1.0);
      const double tol = n == 1 ? 1e-6 : 1e-4;
      for (double eps : {0.05, 0.025}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto p = solve_profile_fixed_point(eps, h, nl, assemble_A(eps, h, grid));
        const auto s = solve_profile_shooting(eps, n, 1.0, nl, grid);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double d = 0.0;
        for (int j = 0; j < grid.n_points; ++j)
          d = std::max(d, std::abs(p.V.values[j] - s.V.values[j]) +
                              std::abs(p.U.values[j] - s.U.values[j]));
        r.measured.emplace_back("diff_n" + std::to_string(n) + "_eps" + std::to_string(eps), d);
        ok = ok && d < tol && secs < 10.0;
      }
    }
    r.pass = ok;
    return r;
  }

  CriterionResult a5() {
    CriterionResult r{"A5", "weighted correction norm scales with the predicted power", false, {}, ""};
    const double sp = error_scaling_fit(a5_branch(false), 0.1);
    const double sq = error_scaling_fit(a5_branch(true), 0.1);
    r.measured = {{"slope_pure", sp}, {"slope_perturbed", sq}};
    r.pass = !a5_branch(false).truncated && !a5_branch(true).truncated && sp >= 1.8 &&
             sp <= 2.2 && sq >= 0.8 && sq <= 1.2;
    return r;
  }

  CriterionResult a6() {
    CriterionResult r{"A6", "pointwise positivity of the Lorentz scalar", false, {}, ""};
    int checked = 0, violations = 0;
    for (bool pert : {false, true}) {
      for (const auto& bp : a5_branch(pert).points) {
        if (bp.profile.eps > 0.05 + 1e-12) continue;
        ++checked;
        if (!positivity_report(bp.profile).pass) ++violations;
      }
    }
    r.measured = {{"profiles_checked", static_cast<double>(checked)},
                  {"violations", static_cast<double>(violations)}};
    r.pass = checked > 0 && violations == 0;
    return r;
  }

  CriterionResult a7() {
    CriterionResult r{"A7", "sharp decay envelope on the tail window", false, {}, ""};
    bool ok = true;
    for (int n : {1, 2, 3}) {
      Grid grid(35.0, 3501, n);
      const auto& h = hat(n, 1.0, 1.0, grid);
      const auto nl = Nonlinearity::pure_power(1.0);
      const auto p = solve_profile_fixed_point(0.025, h, nl, assemble_A(0.025, h, grid));
      const auto fit = decay_fit(p, 5.0, 15.0);
      const double ratio = fit.ratio_max / fit.ratio_min;
      r.measured.emplace_back("ratio_n" + std::to_string(n), ratio);
      ok = ok && ratio < 3.0;
    }
    r.pass = ok;
    return r;
  }

  CriterionResult a8() {
    CriterionResult r{"A8", "charge-derivative sign trichotomy", false, {}, ""};
    using Sign = VKVerdict::Sign;
    bool ok = true;
    auto check = [&](const FamilyKey& f, Sign expect, bool need_slope) {
      const auto& br = vk_branch(f);
      if (br.truncated) {
        ok = false;
        r.note += "branch (" + std::to_string(f.n) + "," + std::to_string(f.k) + ") truncated; ";
        return;
      }
      const auto v = vk_classify(family_nl(f), f.n, br);
      const double sgn = v.measured_sign == Sign::Negative  ? -1.0
                         : v.measured_sign == Sign::Positive ? 1.0
                                                             : 0.0;
      r.measured.emplace_back("sign_n" + std::to_string(f.n) + "_k" + std::to_string(f.k), sgn);
      ok = ok && v.measured_sign == expect;
      if (need_slope) {
        r.measured.emplace_back("critical_slope", v.slope.value_or(0.0));
        ok = ok && v.slope && *v.slope >= 0.8 && *v.slope <= 1.2;
      }
    };
    check({1, 1.0}, Sign::Negative, false);
    check({1, 2.0}, Sign::Negative, true);
    check({1, 3.0}, Sign::Positive, false);
    check({2, 0.5}, Sign::Negative, false);
    check({2, 2.0}, Sign::Positive, false);
    r.pass = ok;
    return r;
  }

  CriterionResult a9() {
    CriterionResult r{"A9", "leading-order charge at small eps", false, {}, ""};
    const auto& br = a5_branch(false);
    double q_over = 0.0;
    for (const auto& bp : br.points)
      if (std::abs(bp.profile.eps - 0.05) < 1e-12) q_over = bp.Q / (2.0 * 0.05);
    r.measured = {{"Q_over_2eps", q_over}};
    r.pass = std::abs(q_over - 1.0) < 0.05;
    return r;
  }

  CriterionResult a10() {
    CriterionResult r{"A10", "scaling of the omega-derivative norm", false, {}, ""};
    const double s11 = dphi_domega_scaling(vk_branch({1, 1.0})).slope;
    const double s12 = dphi_domega_scaling(vk_branch({1, 2.0})).slope;
    r.measured = {{"slope_n1_k1", s11}, {"slope_n1_k2", s12}};
    r.pass = std::abs(s11 - 1.0) <= 0.15 && std::abs(s12 - 0.0) <= 0.15;
    if (!r.pass)
      r.note = "direct omega-differencing gives slope -n+2/k-4 (chain rule through "
               "d eps/d omega = -omega/eps), 4 below the stated -n+2/k";
    return r;
  }

  CriterionResult a11() {
    CriterionResult r{"A11", "cone trapping and boundary inflow", false, {}, ""};
    int cones_checked = 0, cone_failures = 0;
    auto check_branch = [&](const Branch& br) {
      for (const auto& bp : br.points) {
        if (bp.profile.eps > 0.05 + 1e-12) continue;
        ++cones_checked;
        const double T1 = std::max(2.0 * br.hat.grid().dim, 5.0);
        if (!cone_region_check(bp.profile, T1)) ++cone_failures;
      }
    };
    check_branch(a5_branch(false));
    check_branch(a5_branch(true));
    for (const FamilyKey& f :
         {FamilyKey{1, 1.0}, FamilyKey{1, 2.0}, FamilyKey{1, 3.0}, FamilyKey{2, 0.5},
          FamilyKey{2, 2.0}})
      check_branch(vk_branch(f));

    bool inflow_ok = true;
    for (const FamilyKey& f : {FamilyKey{1, 1.0}, FamilyKey{2, 0.5}, FamilyKey{3, 1.0}}) {
      Grid grid(35.0, 3501, f.n);
      const auto& h = hat(f.n, f.k, 1.0, grid);
      const double delta = 0.01 * h.vhat.values[0];
      const double t_eval = std::max(2.0 * f.n, 5.0);
      inflow_ok = inflow_ok &&
                  boundary_inflow_check(0.05, family_nl(f), h, delta, delta / 10.0, t_eval, 100);
    }
    r.measured = {{"cones_checked", static_cast<double>(cones_checked)},
                  {"cone_failures", static_cast<double>(cone_failures)},
                  {"inflow_pass", inflow_ok ? 1.0 : 0.0}};
    r.pass = cones_checked > 0 && cone_failures == 0 && inflow_ok;
    return r;
  }

  CriterionResult a12() {
    CriterionResult r{"A12", "inner-product crosscheck deviation shrinks with eps", false, {}, ""};
    const auto& br = vk_branch({1, 2.0});
    const auto cc = inner_product_crosscheck(br, br.hat);
    const std::size_t M = cc.size();
    if (M < 3) {
      r.note = "too few interior points";
      return r;
    }
    const double d0 = cc[M - 1].rel_deviation;  // smallest eps
    const double d1 = cc[M - 2].rel_deviation;
    const double d2 = cc[M - 3].rel_deviation;
    r.measured = {{"dev_smallest", d0}, {"dev_mid", d1}, {"dev_larger", d2}};
    r.pass = d0 < d1 && d1 < d2;
    return r;
  }

  CriterionResult a13() {
    CriterionResult r{"A13", "randomized property suites", false, {}, ""};
    std::mt19937 gen(20240817u);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto rnd = [&] {
      const double v = std::pow(10.0, mag(gen));
      return uni(gen) < 0.5 ? -v : v;
    };
    long fails = 0;
    const int trials = 10000;
    for (double k : {0.3, 0.5, 1.0, 2.0, 3.0}) {
      for (int i = 0; i < trials / 5; ++i) {
        const double a = rnd(), b = rnd();
        const double mk1 = std::min(1.0, k);
        const double lhs1 = std::abs(std::pow(std::abs(a + b), k) - std::pow(std::abs(a), k));
        const double rhs1 = std::pow(3.0, k) *
                            (std::pow(std::abs(a), k - mk1) + std::pow(std::abs(b), k - mk1)) *
                            std::pow(std::abs(b), mk1);
        if (lhs1 > rhs1 * (1.0 + 1e-12)) ++fails;
        // the Taylor-remainder variant holds for k >= 1 (it is applied with
        // exponent 1 + 2k); below one the linear term outruns the bound
        if (k >= 1.0) {
          const double mk2 = std::min(2.0, k);
          const double sgn = a > 0 ? 1.0 : -1.0;
          const double lhs2 = std::abs(std::pow(std::abs(a + b), k) - std::pow(std::abs(a), k) -
                                       k * std::pow(std::abs(a), k - 1.0) * b * sgn);
          const double rhs2 = std::pow(3.0, k) *
                              (std::pow(std::abs(a), k - mk2) + std::pow(std::abs(b), k - mk2)) *
                              std::pow(std::abs(b), mk2);
          if (lhs2 > rhs2 * (1.0 + 1e-12)) ++fails;
        }
      }
    }
    // derivative of the antiderivative recovers f
    const Nonlinearity nl(1.5, {{0.3, 2.5}});
    for (int i = 0; i < 2000; ++i) {
      const double tau = 0.1 + 9.9 * uni(gen);
      const double h = 1e-4 * tau;
      const double fd = (eval_F(nl, tau + h) - eval_F(nl, tau - h)) / (2.0 * h);
      if (std::abs(fd - eval_f(nl, tau)) > 1e-5 * (1.0 + std::abs(eval_f(nl, tau)))) ++fails;
    }
    // norm axioms on random grid functions
    Grid grid(10.0, 101, 1);
    std::normal_distribution<double> nrm(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> a(grid.n_points), b(grid.n_points);
      for (int j = 0; j < grid.n_points; ++j) {
        a[j] = nrm(gen);
        b[j] = nrm(gen);
      }
      GridFunction fa(grid, a, Parity::Even), fb(grid, b, Parity::Even);
      const double lam = rnd();
      std::vector<double> sa(grid.n_points), su(grid.n_points);
      for (int j = 0; j < grid.n_points; ++j) {
        sa[j] = lam * a[j];
        su[j] = a[j] + b[j];
      }
      GridFunction fsa(grid, sa, Parity::Even), fsu(grid, su, Parity::Even);
      if (std::abs(norm_X(fsa) - std::abs(lam) * norm_X(fa)) > 1e-9 * norm_X(fsa)) ++fails;
      if (norm_X(fsu) > norm_X(fa) + norm_X(fb) + 1e-12) ++fails;
    }
    r.measured = {{"failures", static_cast<double>(fails)}};
    r.pass = fails == 0;
    return r;
  }

  std::map<std::string, HatPair> hats_;
  std::map<std::string, Branch> branches_;
};

//! Resolve a suite selector to criterion ids; throws on unknown names.
inline std::vector<std::string> resolve_suite(const std::string& name) {
  const auto& suites = verify_suites();
  auto it = suites.find(name);
  if (it == suites.end()) {
    std::string valid;
    for (const auto& [k, v] : suites) valid += (valid.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown suite '" + name + "'; valid suites: " + valid);
  }
  return it->second;
}

}  // namespace solerwave
