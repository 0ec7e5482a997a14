#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "solerwave/grid.hpp"
#include "solerwave/nonlinearity.hpp"

namespace solerwave {

//! One run's parameters: model, grid, continuation schedule, diagnostics.
//! Every numeric constraint of the underlying modules is re-validated at
//! parse time and unknown fields are rejected.
struct RunConfig {
  int n = 1;
  double k = 1.0;
  double m = 1.0;
  std::vector<Nonlinearity::Term> terms;
  double t_max = 30.0;
  int n_points = 3001;
  double eps_max = 0.1;
  double eps_min = 0.005;
  int eps_steps = 20;
  bool geometric = true;
  double gamma = 0.1;
  std::string out;
  std::string profile_dir;
  bool dump_profiles = false;

  Nonlinearity nonlinearity() const { return Nonlinearity(k, terms); }
  Grid grid() const { return Grid(t_max, n_points, n); }

  std::vector<double> eps_values() const {
    std::vector<double> v(eps_steps);
    for (int i = 0; i < eps_steps; ++i) {
      const double s = eps_steps == 1 ? 0.0 : static_cast<double>(i) / (eps_steps - 1);
      v[i] = geometric ? eps_max * std::pow(eps_min / eps_max, s)
                       : eps_max + s * (eps_min - eps_max);
    }
    return v;
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("config: constraint n >= 1 violated");
    if (!(k > 0.0)) throw std::invalid_argument("config: constraint k > 0 violated");
    if (n >= 3 && !(k < 2.0 / (n - 2)))
      throw std::invalid_argument("config: constraint k < 2/(n-2) violated for n >= 3");
    if (!(m > 0.0)) throw std::invalid_argument("config: constraint m > 0 violated");
    for (const auto& t : terms)
      if (!(t.K > k)) throw std::invalid_argument("config: constraint K > k violated");
    if (!(t_max > 0.0)) throw std::invalid_argument("config: constraint t_max > 0 violated");
    if (n_points < 3) throw std::invalid_argument("config: constraint n_points >= 3 violated");
    if (!(eps_min > 0.0) || !(eps_max < m))
      throw std::invalid_argument("config: constraint 0 < eps < m violated");
    if (!(eps_min < eps_max))
      throw std::invalid_argument("config: constraint eps_min < eps_max violated");
    if (eps_steps < 1) throw std::invalid_argument("config: constraint steps >= 1 violated");
    if (!(gamma >= 0.0)) throw std::invalid_argument("config: constraint gamma >= 0 violated");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["k"] = k;
    j["m"] = m;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : terms) arr.push_back({{"c", t.c}, {"K", t.K}});
    j["terms"] = arr;
    j["grid"] = {{"t_max", t_max}, {"n_points", n_points}};
    j["eps"] = {{"max", eps_max},
                {"min", eps_min},
                {"steps", eps_steps},
                {"spacing", geometric ? "geometric" : "linear"}};
    j["gamma"] = gamma;
    return j;
  }

  static void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                             const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!known.count(it.key()))
        throw std::invalid_argument("config: unknown field '" + it.key() + "' in " + where);
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    reject_unknown(j, {"n", "k", "m", "terms", "grid", "eps", "gamma", "out"}, "config");
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<double>();
    if (j.contains("m")) c.m = j.at("m").get<double>();
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) {
        reject_unknown(t, {"c", "K"}, "terms");
        c.terms.push_back({t.at("c").get<double>(), t.at("K").get<double>()});
      }
    }
    if (j.contains("grid")) {
      reject_unknown(j.at("grid"), {"t_max", "n_points"}, "grid");
      if (j.at("grid").contains("t_max")) c.t_max = j.at("grid").at("t_max").get<double>();
      if (j.at("grid").contains("n_points")) c.n_points = j.at("grid").at("n_points").get<int>();
    }
    if (j.contains("eps")) {
      const auto& e = j.at("eps");
      reject_unknown(e, {"max", "min", "steps", "spacing"}, "eps");
      if (e.contains("max")) c.eps_max = e.at("max").get<double>();
      if (e.contains("min")) c.eps_min = e.at("min").get<double>();
      if (e.contains("steps")) c.eps_steps = e.at("steps").get<int>();
      if (e.contains("spacing")) {
        const std::string s = e.at("spacing").get<std::string>();
        if (s == "geometric")
          c.geometric = true;
        else if (s == "linear")
          c.geometric = false;
        else
          throw std::invalid_argument("config: spacing must be 'linear' or 'geometric'");
      }
    }
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    return c;
  }
};

}  // namespace solerwave
