#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "solerwave/groundstate.hpp"
#include "solerwave/norms.hpp"

using namespace solerwave;

TEST_CASE("closed-form 1D groundstate satisfies the radial equation") {
  Grid g(25.0, 2501, 1);
  const auto gs = closed_form_groundstate_1d(1.0, 1.0, g);
  CHECK(gs.u0 == Catch::Approx(1.0));
  CHECK(gs.u[100] == Catch::Approx(1.0 / std::cosh(1.0)).epsilon(1e-12));
  // residual is pure truncation error and drops by ~4 under halving
  const double r1 = groundstate_residual(gs);
  Grid g2(25.0, 5001, 1);
  const double r2 = groundstate_residual(closed_form_groundstate_1d(1.0, 1.0, g2));
  CHECK(r1 < 1e-3);
  CHECK(r1 / r2 == Catch::Approx(4.0).margin(0.5));

  const auto q = closed_form_groundstate_1d(2.0, 1.0, g);
  CHECK(q.u0 == Catch::Approx(std::pow(1.5, 0.25)).epsilon(1e-12));
}

TEST_CASE("groundstate residual flags non-solutions and accepts zero") {
  Grid g(20.0, 801, 1);
  auto gs = closed_form_groundstate_1d(1.0, 1.0, g);
  auto perturbed = gs;
  for (auto& v : perturbed.u) v += 0.1;
  CHECK(groundstate_residual(perturbed) > 0.05);
  GroundstateProfile zero{g, std::vector<double>(g.n_points, 0.0),
                          std::vector<double>(g.n_points, 0.0), 1, 1.0, 1.0, 0.0};
  CHECK(groundstate_residual(zero) == 0.0);
}

TEST_CASE("shooting solve matches the sech oracle") {
  Grid g(30.0, 6001, 1);
  const auto gs = solve_groundstate(1, 1.0, 1.0, g);
  CHECK(gs.u0 == Catch::Approx(1.0).margin(1e-9));
  double err = 0.0;
  for (int j = 0; j < g.n_points && g.t(j) <= 20.0; ++j)
    err = std::max(err, std::abs(gs.u[j] - 1.0 / std::cosh(g.t(j))));
  CHECK(err < 1e-8);
}

TEST_CASE("shooting amplitude for the 3D cubic groundstate") {
  // pinned by an independent high-order integration: u0(n=3, k=1, m=0.5)
  Grid g(30.0, 6001, 3);
  const auto gs = solve_groundstate(3, 1.0, 0.5, g);
  CHECK(gs.u0 == Catch::Approx(4.3373876800).margin(2e-6));
  // two-resolution stability of the amplitude
  Grid g2(30.0, 12001, 3);
  CHECK(solve_groundstate(3, 1.0, 0.5, g2).u0 == Catch::Approx(gs.u0).margin(1e-7));
}

TEST_CASE("supercritical exponent is rejected") {
  Grid g(30.0, 1001, 3);
  CHECK_THROWS_AS(solve_groundstate(3, 2.0, 1.0, g), std::invalid_argument);
  CHECK_THROWS_AS(solve_groundstate(3, 2.5, 1.0, g), std::invalid_argument);
  Grid g4(30.0, 1001, 4);
  CHECK_THROWS_AS(solve_groundstate(4, 1.0, 1.0, g4), std::invalid_argument);
}

TEST_CASE("profile monotonicity and derivative bound") {
  Grid g(30.0, 3001, 2);
  const auto gs = solve_groundstate(2, 1.0, 1.0, g);
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * gs.u0;
  for (int j = 0; j + 1 < g.n_points; ++j) {
    if (gs.u[j] > floor) CHECK(gs.u[j + 1] < gs.u[j]);
    CHECK(gs.du[j] <= 1e-12);
  }
  CHECK(gs.du[0] == 0.0);
  // |u'/u| <= c1 r/<r> with a finite c1 over the whole grid
  double c1 = 0.0;
  for (int j = 1; j < g.n_points; ++j) {
    const double t = g.t(j);
    c1 = std::max(c1, std::abs(gs.du[j] / gs.u[j]) * std::hypot(1.0, t) / t);
  }
  CHECK(c1 < 5.0);
}

TEST_CASE("residual drops at second order under refinement") {
  Grid coarse(30.0, 1501, 1), fine(30.0, 3001, 1);
  const double rc = groundstate_residual(solve_groundstate(1, 1.0, 1.0, coarse));
  const double rf = groundstate_residual(solve_groundstate(1, 1.0, 1.0, fine));
  CHECK(rc / rf >= 3.5);
  CHECK(rc / rf <= 4.5);
}

TEST_CASE("shooting amplitude is insensitive to the domain half-width") {
  Grid a(25.0, 2501, 1), b(35.0, 3501, 1);
  GroundstateOptions opts;
  opts.tail_tol = 1e-10;  // sech(25) ~ 2.8e-11 relative
  const double ua = solve_groundstate(1, 1.0, 1.0, a, opts).u0;
  const double ub = solve_groundstate(1, 1.0, 1.0, b, opts).u0;
  CHECK(std::abs(ua - ub) < 1e-9);
}

TEST_CASE("hat pair structure and first-order relation") {
  Grid g(30.0, 3001, 1);
  const auto gs = solve_groundstate(1, 1.0, 1.0, g);
  const auto hat = hat_pair(gs, g);
  CHECK(hat.uhat.values[0] == 0.0);
  // uhat = sech tanh / 2 for the cubic 1D case
  for (int j : {50, 200, 800}) {
    const double t = g.t(j);
    CHECK(hat.uhat.values[j] ==
          Catch::Approx(0.5 * std::tanh(t) / std::cosh(t)).margin(1e-7));
  }
  Grid other(30.0, 3002, 1);
  CHECK_THROWS_AS(hat_pair(gs, other), GridMismatchError);
}

TEST_CASE("hat pair satisfies the limiting first-order system at grid order") {
  auto residual_first_line = [](int N) {
    Grid g(30.0, N, 1);
    const auto gs = solve_groundstate(1, 1.0, 1.0, g);
    const auto hat = hat_pair(gs, g);
    const auto du = derivative(hat.uhat);
    double r = 0.0;
    for (int j = 0; j + 1 < N; ++j) {
      const double res = hat.vhat.values[j] / 2.0 + du.values[j] -
                         std::pow(hat.vhat.values[j], 3.0);
      r = std::max(r, std::abs(res));
    }
    return r;
  };
  const double rc = residual_first_line(1501);
  const double rf = residual_first_line(3001);
  CHECK(rc < 1e-3);
  CHECK(rc / rf == Catch::Approx(4.0).margin(0.7));
}

TEST_CASE("limiting-pair residual with the radial damping term, n = 3") {
  Grid g(30.0, 3001, 3);
  const auto gs = solve_groundstate(3, 1.0, 1.0, g);
  const auto hat = hat_pair(gs, g);
  const auto du = derivative(hat.uhat);
  double r = 0.0;
  for (int j = 0; j + 1 < g.n_points; ++j) {
    const double damp = (j == 0) ? 2.0 * du.values[0] : 2.0 * hat.uhat.values[j] / g.t(j);
    const double res = hat.vhat.values[j] / 2.0 + du.values[j] + damp -
                       std::pow(hat.vhat.values[j], 2.0) * hat.vhat.values[j];
    r = std::max(r, std::abs(res));
  }
  CHECK(r < 5e-2 * gs.u0 * gs.u0 * gs.u0);  // C dt^2 with the amplitude-cubed scale
}

TEST_CASE("lambda_k combination") {
  Grid g(30.0, 3001, 1);
  const auto hat = hat_pair(solve_groundstate(1, 1.0, 1.0, g), g);
  CHECK(lambda_k(hat) == Catch::Approx(1.25).margin(1e-6));

  GridFunction z = GridFunction::zero(g, Parity::Even);
  GridFunction zo = GridFunction::zero(g, Parity::Odd);
  CHECK(lambda_k(z, zo, 1.0) == 0.0);

  std::vector<double> v2(hat.vhat.values), u2(hat.uhat.values);
  for (auto& x : v2) x *= 2.0;
  for (auto& x : u2) x *= 2.0;
  CHECK(lambda_k(GridFunction(g, v2, Parity::Even), GridFunction(g, u2, Parity::Odd), 1.0) ==
        Catch::Approx(2.0 * lambda_k(hat)).epsilon(1e-12));
}

TEST_CASE("decay constants over a tail window") {
  Grid g(30.0, 3001, 1);
  const auto gs = solve_groundstate(1, 1.0, 1.0, g);
  const auto [c, C] = decay_constants(gs, 5.0, 15.0);
  CHECK(c == Catch::Approx(2.0).margin(0.01));
  CHECK(C == Catch::Approx(2.0).margin(0.01));
  const auto [c0, C0] = decay_constants(gs, 10.0, 10.0);
  CHECK(c0 == C0);
  CHECK_THROWS_AS(decay_constants(gs, 5.0, 45.0), WindowError);

  Grid g3(30.0, 3001, 3);
  const auto gs3 = solve_groundstate(3, 1.0, 1.0, g3);
  const auto [c3, C3] = decay_constants(gs3, 5.0, 15.0);
  CHECK(C3 / c3 < 3.0);
}
