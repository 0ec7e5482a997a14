// End-to-end checks of the command-line surface: exit codes, schemas,
// determinism, and the branch -> charge-curve round trip.

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "solerwave_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd =
      std::string(SOLERWAVE_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("groundstate: sech oracle summary and CSV") {
  const fs::path csv = work_dir() / "gs.csv";
  const auto r = run("groundstate --n 1 --k 1 --m 1 --t-max 30 --n-points 6001 --out " +
                     csv.string());
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("schema_version") == "1.0");
  CHECK(std::abs(j.at("u0").get<double>() - 1.0) < 1e-8);
  CHECK(std::abs(j.at("decay").at("c").get<double>() - 2.0) < 0.01);

  const std::string body = slurp(csv);
  CHECK(body.rfind("r,u,du\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 6002);
}

TEST_CASE("groundstate: invalid exponent exits 2 and names the constraint") {
  const auto r = run("groundstate --n 3 --k 2 --m 1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("k < 2/(n-2)") != std::string::npos);
}

TEST_CASE("groundstate: unwritable output leaves no partial file") {
  const fs::path target = work_dir() / "no_such_dir" / "gs.csv";
  const auto r = run("groundstate --n 1 --k 1 --m 1 --t-max 30 --n-points 1201 --out " +
                     target.string());
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(target));
}

TEST_CASE("branch: document schema, determinism, and charge-curve round trip") {
  const fs::path out1 = work_dir() / "branch1.json";
  const fs::path out2 = work_dir() / "branch2.json";
  const std::string base =
      "branch --n 1 --k 1 --m 1 --t-max 30 --n-points 1501 "
      "--eps-max 0.1 --eps-min 0.02 --steps 6 --spacing geometric --gamma 0.1 --out ";
  const auto r1 = run(base + out1.string());
  REQUIRE(r1.exit_code == 0);
  const auto r2 = run(base + out2.string());
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));  // byte-identical reruns

  const auto doc = nlohmann::json::parse(slurp(out1));
  CHECK(doc.at("schema_version") == "1.0");
  CHECK(doc.at("truncated") == false);
  REQUIRE(doc.at("points").size() == 6);
  double prev_q = 1e9;
  for (const auto& p : doc.at("points")) {
    CHECK(p.at("positivity_pass") == true);
    CHECK(p.at("cone_pass") == true);
    const double q = p.at("Q").get<double>();
    CHECK(q < prev_q);  // Q ~ 2 eps decreases along the branch
    prev_q = q;
  }

  const fs::path curve = work_dir() / "curve.csv";
  const auto rc = run("charge-curve --in " + out1.string() + " --out " + curve.string());
  REQUIRE(rc.exit_code == 0);
  const auto verdict = nlohmann::json::parse(rc.out);
  CHECK(verdict.at("regime") == "subcritical");
  CHECK(verdict.at("expected_sign") == "negative");
  CHECK(verdict.at("measured_sign") == "negative");
  CHECK(slurp(curve).rfind("omega,Q,dQ_domega\n", 0) == 0);
}

TEST_CASE("branch: schedule validation") {
  const auto r = run("branch --n 1 --k 1 --m 1 --eps-max 0.01 --eps-min 0.1 --steps 5");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("eps_min < eps_max") != std::string::npos);
}

TEST_CASE("branch: config file with flag overrides and unknown-field rejection") {
  const fs::path cfg = work_dir() / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"n": 1, "k": 1.0, "m": 1.0,
               "grid": {"t_max": 30.0, "n_points": 1501},
               "eps": {"max": 0.1, "min": 0.05, "steps": 3, "spacing": "geometric"}})";
  }
  const fs::path out1 = work_dir() / "branch_cfg.json";
  const auto r = run("branch --config " + cfg.string() + " --steps 4 --out " + out1.string());
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(slurp(out1)).at("points").size() == 4);  // flag wins

  const fs::path bad = work_dir() / "bad.json";
  {
    std::ofstream out(bad);
    out << R"({"n": 1, "mystery": 7})";
  }
  const auto rb = run("branch --config " + bad.string());
  CHECK(rb.exit_code == 2);
  CHECK(rb.out.find("mystery") != std::string::npos);
}

TEST_CASE("branch: per-point profile dumps") {
  const fs::path dir = work_dir() / "profiles";
  fs::create_directories(dir);
  const auto r = run("branch --n 1 --k 1 --m 1 --t-max 30 --n-points 801 "
                     "--eps-max 0.1 --eps-min 0.05 --steps 2 --dump-profiles --profile-dir " +
                     dir.string());
  REQUIRE(r.exit_code == 0);
  const std::string body = slurp(dir / "profile_0.csv");
  CHECK(body.rfind("t,V,U,Vhat,Uhat,tildeV,tildeU\n", 0) == 0);
  CHECK(fs::exists(dir / "profile_1.csv"));
}

TEST_CASE("branch: an unreachable point truncates with exit 1") {
  const fs::path out = work_dir() / "truncated.json";
  // eps close to m sits far outside the contraction regime
  const auto r = run("branch --n 1 --k 1 --m 1 --t-max 30 --n-points 801 "
                     "--eps-max 0.95 --eps-min 0.9 --steps 2 --out " + out.string());
  CHECK(r.exit_code == 1);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc.at("truncated") == true);
  CHECK_FALSE(doc.at("failure").get<std::string>().empty());
}

TEST_CASE("charge-curve input validation") {
  const fs::path two = work_dir() / "two_points.json";
  {
    std::ofstream out(two);
    out << R"({"schema_version": "1.0", "config": {"n": 1, "k": 1.0},
               "points": [{"eps": 0.1, "omega": 0.99, "Q": 0.2},
                          {"eps": 0.05, "omega": 0.998, "Q": 0.1}]})";
  }
  CHECK(run("charge-curve --in " + two.string()).exit_code == 2);

  const fs::path garbage = work_dir() / "garbage.json";
  {
    std::ofstream out(garbage);
    out << "not json at all {";
  }
  CHECK(run("charge-curve --in " + garbage.string()).exit_code == 2);

  const fs::path wrong_ver = work_dir() / "wrong_ver.json";
  {
    std::ofstream out(wrong_ver);
    out << R"({"schema_version": "2.0", "config": {}, "points": []})";
  }
  CHECK(run("charge-curve --in " + wrong_ver.string()).exit_code == 2);
}

TEST_CASE("verify: unknown suite lists the valid names") {
  const auto r = run("verify --suite nonsense");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("groundstate") != std::string::npos);
  CHECK(r.out.find("properties") != std::string::npos);
}

TEST_CASE("verify: the properties suite passes and reports JSON") {
  const auto r = run("verify --suite properties --json");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("pass") == true);
  REQUIRE(j.at("criteria").size() == 1);
  CHECK(j.at("criteria")[0].at("id") == "A13");
  CHECK(j.at("criteria")[0].at("measured").at("failures") == 0.0);
}

TEST_CASE("verify writes the report file when asked") {
  const fs::path report = work_dir() / "report.json";
  const auto r = run("verify --suite properties --out " + report.string());
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j.at("pass") == true);
}

TEST_CASE("oracle-shoot emits the profile and summary") {
  const fs::path csv = work_dir() / "shoot.csv";
  const auto r = run("oracle-shoot --n 1 --k 1 --m 1 --eps 0.05 --t-max 30 "
                     "--n-points 1501 --out " + csv.string());
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("V0").get<double>() - 1.0) < 0.01);
  CHECK(slurp(csv).rfind("t,V,U\n", 0) == 0);
}
