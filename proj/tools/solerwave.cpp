// Command-line front end: groundstate and branch pipelines, charge-curve
// post-processing, the verification suites, and the direct shooting oracle.
// Exit codes: 0 success, 1 numerical failure, 2 invalid input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "solerwave/analysis.hpp"
#include "solerwave/dirac_solver.hpp"
#include "solerwave/groundstate.hpp"
#include "solerwave/io.hpp"
#include "solerwave/linearized.hpp"
#include "solerwave/runconfig.hpp"
#include "solerwave/verify.hpp"
#include "solerwave/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace solerwave;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInvalid = 2;

//! Every numeric JSON value passes the finite check format_sci enforces.
double checked(double v) {
  (void)format_sci(v);
  return v;
}

struct CommonFlags {
  std::string config_path;
  std::optional<int> n;
  std::optional<double> k, m, t_max, gamma;
  std::optional<int> n_points, steps;
  std::optional<double> eps_max, eps_min;
  std::optional<std::string> spacing;
  std::vector<std::string> terms;

  void add_model(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override file values");
    cmd->add_option("--n", n, "spatial dimension");
    cmd->add_option("--k", k, "leading nonlinearity exponent");
    cmd->add_option("--m", m, "mass");
    cmd->add_option("--term", terms, "perturbation term c,K (repeatable)");
    cmd->add_option("--t-max", t_max, "rescaled half-width of the grid");
    cmd->add_option("--n-points", n_points, "grid points on [0, t_max]");
  }

  void add_schedule(CLI::App* cmd) {
    cmd->add_option("--eps-max", eps_max, "largest eps of the continuation");
    cmd->add_option("--eps-min", eps_min, "smallest eps of the continuation");
    cmd->add_option("--steps", steps, "number of continuation points");
    cmd->add_option("--spacing", spacing, "linear or geometric");
    cmd->add_option("--gamma", gamma, "exponential weight for the correction norm");
  }

  RunConfig build() const {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("config: cannot open " + config_path);
      nlohmann::json j;
      in >> j;
      c = RunConfig::from_json(j);
    }
    if (n) c.n = *n;
    if (k) c.k = *k;
    if (m) c.m = *m;
    for (const auto& s : terms) {
      const auto comma = s.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("config: --term expects c,K");
      c.terms.push_back({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
    }
    if (t_max) c.t_max = *t_max;
    if (n_points) c.n_points = *n_points;
    if (eps_max) c.eps_max = *eps_max;
    if (eps_min) c.eps_min = *eps_min;
    if (steps) c.eps_steps = *steps;
    if (spacing) {
      if (*spacing == "geometric")
        c.geometric = true;
      else if (*spacing == "linear")
        c.geometric = false;
      else
        throw std::invalid_argument("config: spacing must be 'linear' or 'geometric'");
    }
    if (gamma) c.gamma = *gamma;
    c.validate();
    return c;
  }
};

int cmd_groundstate(const CommonFlags& flags, std::string out_path) {
  const RunConfig cfg = flags.build();
  if (out_path.empty()) out_path = cfg.out;
  const Grid grid = cfg.grid();
  const auto gs = solve_groundstate(cfg.n, cfg.k, cfg.m, grid);

  CsvWriter csv("r,u,du");
  for (int j = 0; j < grid.n_points; ++j) csv.row({grid.t(j), gs.u[j], gs.du[j]});
  if (!out_path.empty()) atomic_write_file(out_path, csv.str());

  const double w_lo = 5.0, w_hi = std::min(15.0, 0.5 * grid.t_max);
  const auto [c, C] = decay_constants(gs, w_lo, w_hi);
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["u0"] = checked(gs.u0);
  j["residual"] = checked(groundstate_residual(gs));
  j["decay"] = {{"window", {w_lo, w_hi}}, {"c", checked(c)}, {"C", checked(C)}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

ordered_json branch_document(const RunConfig& cfg, const Branch& branch) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "solerwave";
  j["version"] = kVersion;
  j["config"] = cfg.to_json();
  j["truncated"] = branch.truncated;
  j["failure"] = branch.failure;
  auto pts = ordered_json::array();
  for (const auto& bp : branch.points) {
    const auto& p = bp.profile;
    const double T1 = std::max(2.0 * p.grid().dim, 5.0);
    pts.push_back({{"eps", checked(p.eps)},
                   {"omega", checked(p.omega)},
                   {"Q", checked(bp.Q)},
                   {"E", checked(bp.E)},
                   {"norm_tilde_weighted", checked(bp.tilde_norm_weighted)},
                   {"iterations", p.iterations},
                   {"residual", checked(p.residual)},
                   {"positivity_pass", positivity_report(p).pass},
                   {"cone_pass", cone_region_check(p, T1)}});
  }
  j["points"] = pts;
  return j;
}

int cmd_branch(const CommonFlags& flags, std::string out_path, bool dump_profiles,
               const std::string& profile_dir) {
  const RunConfig cfg = flags.build();
  if (out_path.empty()) out_path = cfg.out;
  const Grid grid = cfg.grid();
  const auto gs = solve_groundstate(cfg.n, cfg.k, cfg.m, grid);
  const auto hat = hat_pair(gs, grid);
  const Branch branch =
      continue_branch(cfg.eps_values(), hat, cfg.nonlinearity(), grid, {}, cfg.gamma);

  const ordered_json doc = branch_document(cfg, branch);
  if (!out_path.empty()) atomic_write_file(out_path, doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";

  if (dump_profiles) {
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
      const auto& p = branch.points[i].profile;
      CsvWriter csv("t,V,U,Vhat,Uhat,tildeV,tildeU");
      for (int j = 0; j < grid.n_points; ++j)
        csv.row({grid.t(j), p.V.values[j], p.U.values[j], hat.vhat.values[j],
                 hat.uhat.values[j], p.tilde_V.values[j], p.tilde_U.values[j]});
      atomic_write_file(profile_dir + "/profile_" + std::to_string(i) + ".csv", csv.str());
    }
  }
  return branch.truncated ? kExitNumerical : kExitOk;
}

int cmd_charge_curve(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw std::invalid_argument("charge-curve: cannot open " + in_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("charge-curve: malformed JSON: ") + e.what());
  }
  if (!doc.contains("schema_version"))
    throw std::invalid_argument("charge-curve: missing schema_version");
  const std::string ver = doc.at("schema_version").get<std::string>();
  if (ver.substr(0, ver.find('.')) != std::string(kSchemaVersion).substr(0, 1))
    throw std::invalid_argument("charge-curve: unsupported schema major version " + ver);
  if (!doc.contains("config") || !doc.contains("points"))
    throw std::invalid_argument("charge-curve: not a branch document");

  const RunConfig cfg = RunConfig::from_json(doc.at("config"));
  const auto& pts = doc.at("points");
  if (pts.size() < 3)
    throw std::invalid_argument("charge-curve: need at least 3 branch points for derivatives");

  std::vector<double> eps(pts.size()), omega(pts.size()), Q(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    eps[i] = pts[i].at("eps").get<double>();
    omega[i] = pts[i].at("omega").get<double>();
    Q[i] = pts[i].at("Q").get<double>();
  }

  std::vector<double> dQ(pts.size());
  dQ[0] = (Q[1] - Q[0]) / (omega[1] - omega[0]);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    dQ[i] = (Q[i + 1] - Q[i - 1]) / (omega[i + 1] - omega[i - 1]);
  dQ.back() = (Q[pts.size() - 1] - Q[pts.size() - 2]) / (omega[pts.size() - 1] - omega[pts.size() - 2]);

  CsvWriter csv("omega,Q,dQ_domega");
  for (std::size_t i = 0; i < pts.size(); ++i) csv.row({omega[i], Q[i], dQ[i]});
  if (!out_path.empty()) atomic_write_file(out_path, csv.str());

  // verdict from the exponents plus the measured signs at the smallest eps
  const double crit = 2.0 / cfg.n;
  std::string regime = std::abs(cfg.k - crit) <= 1e-12 * crit ? "critical"
                       : cfg.k < crit                         ? "subcritical"
                                                              : "supercritical";
  bool all_neg = true, all_pos = true;
  for (std::size_t i = pts.size() - 3; i < pts.size(); ++i) {
    all_neg = all_neg && dQ[i] < 0.0;
    all_pos = all_pos && dQ[i] > 0.0;
  }
  ordered_json verdict;
  verdict["schema_version"] = kSchemaVersion;
  verdict["regime"] = regime;
  verdict["expected_sign"] = regime == "supercritical" ? "positive" : "negative";
  verdict["measured_sign"] = all_neg ? "negative" : all_pos ? "positive" : "indeterminate";
  if (regime == "critical") {
    std::vector<double> lx, ly;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double d = (Q[i + 1] - Q[i - 1]) / (eps[i + 1] - eps[i - 1]);
      if (d == 0.0) continue;
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(std::abs(d)));
    }
    if (lx.size() >= 2) verdict["slope"] = checked(detail::least_squares_slope(lx, ly));
  }
  std::cout << verdict.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, bool as_json, const std::string& out_path) {
  const auto ids = resolve_suite(suite);
  VerifyRunner runner;
  ordered_json report;
  report["schema_version"] = kSchemaVersion;
  report["suite"] = suite;
  auto arr = ordered_json::array();
  bool all_pass = true;
  for (const auto& id : ids) {
    const CriterionResult r = runner.run(id);
    all_pass = all_pass && r.pass;
    if (!as_json)
      std::cout << r.id << (r.id.size() == 2 ? " " : "") << "  "
                << (r.pass ? "PASS" : "FAIL") << "  " << r.description
                << (r.note.empty() ? "" : "  [" + r.note + "]") << "\n";
    ordered_json m;
    for (const auto& [name, value] : r.measured) m[name] = checked(value);
    arr.push_back({{"id", r.id},
                   {"description", r.description},
                   {"pass", r.pass},
                   {"measured", m},
                   {"note", r.note}});
  }
  report["criteria"] = arr;
  report["pass"] = all_pass;
  if (as_json) std::cout << report.dump(2) << "\n";
  if (!out_path.empty()) atomic_write_file(out_path, report.dump(2) + "\n");
  return all_pass ? kExitOk : kExitNumerical;
}

int cmd_oracle_shoot(const CommonFlags& flags, double eps, const std::string& out_path) {
  const RunConfig cfg = flags.build();
  if (!(eps > 0.0) || !(eps < cfg.m))
    throw std::invalid_argument("oracle-shoot: need 0 < eps < m");
  const Grid grid = cfg.grid();
  const auto p = solve_profile_shooting(eps, cfg.n, cfg.m, cfg.nonlinearity(), grid);

  CsvWriter csv("t,V,U");
  for (int j = 0; j < grid.n_points; ++j) csv.row({grid.t(j), p.V.values[j], p.U.values[j]});
  if (!out_path.empty()) atomic_write_file(out_path, csv.str());

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["eps"] = checked(p.eps);
  j["omega"] = checked(p.omega);
  j["V0"] = checked(p.V.values[0]);
  j["bisections"] = p.iterations;
  j["residual"] = checked(p.residual);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solitary-wave profiles of the nonlinear Dirac equation near the "
               "nonrelativistic limit"};
  app.require_subcommand(1);

  CommonFlags gflags;
  std::string gs_out;
  auto* gs_cmd = app.add_subcommand("groundstate", "solve the radial NLS groundstate");
  gflags.add_model(gs_cmd);
  gs_cmd->add_option("--out", gs_out, "CSV output path (r,u,du)");

  CommonFlags bflags;
  std::string br_out, br_profile_dir = ".";
  bool br_dump = false;
  auto* br_cmd = app.add_subcommand("branch", "continue a solitary-wave branch in eps");
  bflags.add_model(br_cmd);
  bflags.add_schedule(br_cmd);
  br_cmd->add_option("--out", br_out, "JSON output path");
  br_cmd->add_flag("--dump-profiles", br_dump, "write per-point profile CSV files");
  br_cmd->add_option("--profile-dir", br_profile_dir, "directory for profile CSV files");

  std::string cc_in, cc_out;
  auto* cc_cmd = app.add_subcommand("charge-curve", "charge curve and sign verdict from a branch file");
  cc_cmd->add_option("--in", cc_in, "branch JSON path")->required();
  cc_cmd->add_option("--out", cc_out, "CSV output path (omega,Q,dQ_domega)");

  std::string vf_suite = "all", vf_out;
  bool vf_json = false;
  auto* vf_cmd = app.add_subcommand("verify", "run the verification suites");
  vf_cmd->add_option("--suite", vf_suite,
                     "one of: groundstate, solver, decay, vk, cones, properties, all");
  vf_cmd->add_flag("--json", vf_json, "print the machine-readable report");
  vf_cmd->add_option("--out", vf_out, "also write the JSON report here");

  CommonFlags oflags;
  double oracle_eps = 0.05;
  std::string os_out;
  auto* os_cmd = app.add_subcommand("oracle-shoot", "direct shooting solve at one eps");
  oflags.add_model(os_cmd);
  os_cmd->add_option("--eps", oracle_eps, "bifurcation parameter");
  os_cmd->add_option("--out", os_out, "CSV output path (t,V,U)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gs_cmd->parsed()) return cmd_groundstate(gflags, gs_out);
    if (br_cmd->parsed()) return cmd_branch(bflags, br_out, br_dump, br_profile_dir);
    if (cc_cmd->parsed()) return cmd_charge_curve(cc_in, cc_out);
    if (vf_cmd->parsed()) return cmd_verify(vf_suite, vf_json, vf_out);
    if (os_cmd->parsed()) return cmd_oracle_shoot(oflags, oracle_eps, os_out);
  } catch (const PositivityLossError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NoConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SingularOperatorError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const StaleProfileError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInvalid;
}
