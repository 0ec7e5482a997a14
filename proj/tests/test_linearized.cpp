#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "solerwave/groundstate.hpp"
#include "solerwave/linearized.hpp"
#include "solerwave/norms.hpp"

using namespace solerwave;

namespace {

HatPair make_hat(int n, double k, double m, const Grid& g) {
  GroundstateOptions opts;
  opts.tail_tol = 1e-6;  // short test grids only need a qualitative tail
  return hat_pair(solve_groundstate(n, k, m, g, opts), g);
}

}  // namespace

TEST_CASE("assembly entries at eps = 0") {
  Grid g(25.0, 1001, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  const auto op = assemble_A(0.0, hat, g);
  Eigen::MatrixXd M(op.matrix);
  const int mid = 500;
  // (2,2) block entry is m + omega = 2m at eps = 0
  CHECK(M(2 * mid + 1, 2 * mid + 1) == Catch::Approx(2.0));
  // (1,1) block entry is -1/(2m) + 3 vhat^2
  CHECK(M(2 * mid, 2 * mid) ==
        Catch::Approx(-0.5 + 3.0 * std::pow(hat.vhat.values[mid], 2.0)));
  CHECK_THROWS_AS(assemble_A(1.5, hat, g), std::invalid_argument);
}

TEST_CASE("pair operator is linear and kills zero") {
  Grid g(20.0, 501, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  const auto op = assemble_A(0.0, hat, g);
  auto [rv, ru] = apply_A(op, GridFunction::zero(g, Parity::Even),
                          GridFunction::zero(g, Parity::Odd));
  for (int j = 0; j < g.n_points; ++j) {
    CHECK(rv.values[j] == 0.0);
    CHECK(ru.values[j] == 0.0);
  }
}

TEST_CASE("scaling-derivative pair is mapped to (vhat/m, 0)") {
  // A(0) applied to (vhat/k + t vhat', -(1/(2m)) d_t(vhat/k + t vhat'))
  auto residual = [](int N) {
    Grid g(30.0, N, 1);
    const auto gs = solve_groundstate(1, 1.0, 1.0, g);
    const auto hat = hat_pair(gs, g);
    std::vector<double> xi(N);
    for (int j = 0; j < N; ++j) xi[j] = gs.u[j] / gs.k + g.t(j) * gs.du[j];
    GridFunction xif(g, xi, Parity::Even);
    GridFunction eta = derivative(xif);
    for (auto& v : eta.values) v *= -0.5;
    const auto op = assemble_A(0.0, hat, g);
    auto [rv, ru] = apply_A(op, xif, eta);
    double r = 0.0;
    for (int j = 1; j + 1 < N; ++j) {
      r = std::max(r, std::abs(rv.values[j] - gs.u[j]));
      r = std::max(r, std::abs(ru.values[j]));
    }
    return r;
  };
  const double rc = residual(1501);
  const double rf = residual(3001);
  CHECK(rc < 5e-3);
  CHECK(rc / rf > 3.0);
  CHECK(rc / rf < 5.0);
}

TEST_CASE("direct solve: zero rhs, round trip, and the inverse identity") {
  Grid g(30.0, 1501, 1);
  const auto gs = solve_groundstate(1, 1.0, 1.0, g);
  const auto hat = hat_pair(gs, g);
  const auto op = assemble_A(0.0, hat, g);

  auto [zv, zu] = solve_A(op, GridFunction::zero(g, Parity::Even),
                          GridFunction::zero(g, Parity::Odd));
  CHECK(norm_X(zv, zu) == 0.0);

  // random smooth decaying rhs: apply(solve(rhs)) returns rhs on equation rows
  std::mt19937 gen(77u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> be(g.n_points), bo(g.n_points);
  for (int j = 0; j < g.n_points; ++j) {
    const double t = g.t(j);
    const double bump = std::exp(-0.5 * t);
    be[j] = bump * (1.0 + 0.3 * std::cos(t));
    bo[j] = bump * std::sin(t);
  }
  bo[0] = 0.0;
  (void)uni;
  GridFunction rhs_e(g, be, Parity::Even), rhs_o(g, bo, Parity::Odd);
  const BandedFactorization lu(op);
  auto [wv, wu] = lu.solve(rhs_e, rhs_o);
  auto [av, au] = apply_A(op, wv, wu);
  double rt = 0.0;
  for (int j = 1; j + 1 < g.n_points; ++j) {
    rt = std::max(rt, std::abs(av.values[j] - be[j]));
    rt = std::max(rt, std::abs(au.values[j] - bo[j]));
  }
  rt = std::max(rt, std::abs(av.values[0] - be[0]));
  CHECK(rt < 1e-10);
  CHECK(wu.values[0] == 0.0);

  // the inverse applied to (vhat/m, 0) recovers the scaling-derivative pair
  std::vector<double> rv(g.n_points);
  for (int j = 0; j < g.n_points; ++j) rv[j] = gs.u[j];
  auto [xv, xu] = lu.solve(GridFunction(g, rv, Parity::Even),
                           GridFunction::zero(g, Parity::Odd));
  double err = 0.0;
  for (int j = 0; j < g.n_points && g.t(j) <= 15.0; ++j) {
    const double xi = gs.u[j] + g.t(j) * gs.du[j];
    err = std::max(err, std::abs(xv.values[j] - xi));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("rhs parity validation") {
  Grid g(20.0, 301, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  const auto op = assemble_A(0.05, hat, g);
  CHECK_THROWS_AS(solve_A(op, GridFunction::zero(g, Parity::Odd),
                          GridFunction::zero(g, Parity::Odd)),
                  std::invalid_argument);
}

TEST_CASE("l-minus annihilates the groundstate at grid order") {
  auto residual = [](int N, int n) {
    Grid g(30.0, N, n);
    const auto gs = solve_groundstate(n, 1.0, 1.0, g);
    const auto res = apply_scalar(assemble_l_minus(gs), gs.u);
    double r = 0.0;
    for (int j = 0; j + 1 < N; ++j) r = std::max(r, std::abs(res[j]));
    return r;
  };
  const double rc = residual(1501, 1);
  const double rf = residual(3001, 1);
  CHECK(rc < 1e-3);
  CHECK(rc / rf == Catch::Approx(4.0).margin(0.5));
  CHECK(residual(3001, 3) < 0.2);  // larger amplitude, same order
}

TEST_CASE("l-plus on the scaling derivative and on zero") {
  for (int n : {1, 3}) {
    Grid g(30.0, 3001, n);
    const auto gs = solve_groundstate(n, 1.0, 1.0, g);
    const auto lp = assemble_l_plus(gs);
    std::vector<double> zero(g.n_points, 0.0);
    for (double v : apply_scalar(lp, zero)) CHECK(v == 0.0);
    std::vector<double> xi(g.n_points);
    for (int j = 0; j < g.n_points; ++j) xi[j] = gs.u[j] / gs.k + g.t(j) * gs.du[j];
    const auto res = apply_scalar(lp, xi);
    double r = 0.0;
    for (int j = 0; j + 1 < g.n_points; ++j)
      r = std::max(r, std::abs(res[j] + gs.u[j] / gs.m));
    CHECK(r < 0.1);  // second-order truncation with the n = 3 amplitude scale
  }
}

TEST_CASE("weighted symmetry of the pair operator") {
  for (int n : {1, 3}) {
    Grid g(25.0, 1001, n);
    const auto hat = make_hat(n, 1.0, 1.0, g);
    const auto op = assemble_A(0.05, hat, g);
    // random smooth decaying pairs with the right parities
    std::mt19937 gen(n == 1 ? 11u : 13u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto mk = [&](Parity p) {
      std::vector<double> v(g.n_points);
      const double a = uni(gen), b = uni(gen), c = uni(gen);
      for (int j = 0; j < g.n_points; ++j) {
        const double t = g.t(j);
        const double env = std::exp(-0.4 * t);
        v[j] = p == Parity::Even ? env * (a + b * std::cos(0.7 * t) + c * t * t * env)
                                 : env * std::sin(0.9 * t) * (a + 0.2 * b * t);
      }
      if (p == Parity::Odd) v[0] = 0.0;
      return GridFunction(g, v, p);
    };
    const auto w1v = mk(Parity::Even);
    const auto w1u = mk(Parity::Odd);
    const auto w2v = mk(Parity::Even);
    const auto w2u = mk(Parity::Odd);
    auto [a1v, a1u] = apply_A(op, w1v, w1u);
    auto [a2v, a2u] = apply_A(op, w2v, w2u);
    auto weighted = [&](const GridFunction& x, const GridFunction& y,
                        const GridFunction& p, const GridFunction& q) {
      std::vector<double> f(g.n_points);
      // skip constraint rows at the ends of the grid
      for (int j = 1; j + 1 < g.n_points; ++j)
        f[j] = x.values[j] * p.values[j] + y.values[j] * q.values[j];
      f[0] = 0.0;
      f[g.n_points - 1] = 0.0;
      return line_integral(g, f);
    };
    const double lhs = weighted(a1v, a1u, w2v, w2u);
    const double rhs = weighted(w1v, w1u, a2v, a2u);
    const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
    CHECK(std::abs(lhs - rhs) / scale < 5e-3);
  }
}

TEST_CASE("gap of the free pair operator under refinement") {
  // with vhat replaced by zero the eigenvalues must avoid the open interval
  // (-1/(m+w), m+w) up to a refinement-vanishing margin
  auto penetration = [](int N) {
    Grid g(20.0, N, 1);
    std::vector<double> tiny(N, 1e-300);
    GridFunction vh(g, tiny, Parity::Even);
    GridFunction uh = GridFunction::zero(g, Parity::Odd);
    HatPair hat(vh, uh, 1.0, 1.0, 1.0);
    const double eps = 0.05;
    const auto op = assemble_A(eps, hat, g);
    const double omega = std::sqrt(1.0 - eps * eps);
    const double lo = -1.0 / (1.0 + omega), hi = 1.0 + omega;
    // eliminate the constraint rows: keep the unknowns that carry equations
    Eigen::MatrixXd M(op.matrix);
    std::vector<int> keep;
    for (int i = 0; i < 2 * N; ++i)
      if (i != 1 && i != 2 * N - 2 && i != 2 * N - 1) keep.push_back(i);
    Eigen::MatrixXd Mi(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) Mi(r, c) = M(keep[r], keep[c]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Mi, false);
    double pen = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double re = es.eigenvalues()[i].real();
      if (re > lo && re < hi) pen = std::max(pen, std::min(re - lo, hi - re));
    }
    return pen;
  };
  const double p1 = penetration(201);
  const double p2 = penetration(401);
  CHECK(p1 < 1e-8);
  CHECK(p2 <= p1 + 1e-12);
}

TEST_CASE("operator entries move with eps only through omega") {
  Grid g(25.0, 801, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  const auto a0 = assemble_A(0.0, hat, g);
  auto max_entry_diff = [&](double eps) {
    const auto ae = assemble_A(eps, hat, g);
    Eigen::SparseMatrix<double> d = ae.matrix - a0.matrix;
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
        m = std::max(m, std::abs(it.value()));
    return m;
  };
  const double d1 = max_entry_diff(0.1);
  const double d2 = max_entry_diff(0.05);
  CHECK(d1 / d2 == Catch::Approx(4.0).margin(0.2));  // O(eps^2)
  CHECK(d1 < 0.1 * 0.1);                             // m - omega < eps^2 / m
}

TEST_CASE("smallest singular value: refinement stability and homogeneity") {
  Grid g1(25.0, 1001, 1);
  Grid g2(25.0, 2001, 1);
  const auto h1 = make_hat(1, 1.0, 1.0, g1);
  const auto h2 = make_hat(1, 1.0, 1.0, g2);
  const double s1 = min_singular_value(assemble_A(0.0, h1, g1));
  const double s2 = min_singular_value(assemble_A(0.0, h2, g2));
  CHECK(s1 > 0.0);
  CHECK(std::abs(s1 - s2) / s1 < 0.2);

  auto op = assemble_A(0.0, h1, g1);
  auto scaled = op;
  scaled.matrix = 2.0 * op.matrix;
  CHECK(min_singular_value(scaled) == Catch::Approx(2.0 * s1).epsilon(1e-6));

  // kernel triviality in the radial sector
  GroundstateOptions opts;
  opts.tail_tol = 1e-6;
  const auto gs = solve_groundstate(1, 1.0, 1.0, g1, opts);
  CHECK(min_singular_value(assemble_l_plus(gs)) > 0.0);
}

TEST_CASE("a singular matrix is reported as such") {
  Grid g(20.0, 61, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  auto op = assemble_A(0.05, hat, g);
  op.matrix = 0.0 * op.matrix;  // force a structurally singular system
  CHECK_THROWS_AS(solve_A(op, GridFunction::zero(g, Parity::Even),
                          GridFunction::zero(g, Parity::Odd)),
                  SingularOperatorError);
  CHECK_THROWS_AS(min_singular_value(op), SingularOperatorError);
}

TEST_CASE("gamma0 from the operator-norm sample admits the 0.1 weight") {
  // sup over an eps sample of 1/sigma_min feeds the weight ceiling; the
  // scaling fits run at gamma = 0.1, which must sit below it
  Grid g(30.0, 1501, 1);
  const auto hat = make_hat(1, 1.0, 1.0, g);
  double norm_sup = 0.0;
  for (double eps : {0.0, 0.05, 0.1})
    norm_sup = std::max(norm_sup, 1.0 / min_singular_value(assemble_A(eps, hat, g)));
  const double g0 = gamma0_estimate(norm_sup, 1.0);
  CHECK(g0 > 0.1);
  CHECK(g0 < 1.0 / 3.0);
}

TEST_CASE("gamma0 estimate") {
  CHECK(gamma0_estimate(0.0, 1.0) == Catch::Approx(1.0 / 3.0));
  CHECK(gamma0_estimate(1.0, 1.0) == Catch::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(gamma0_estimate(-1.0, 1.0), std::invalid_argument);
  std::mt19937 gen(5u);
  std::uniform_real_distribution<double> uni(0.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double k = 0.1 + uni(gen) / 10.0;
    CHECK(gamma0_estimate(uni(gen), k) < 1.0 / (1.0 + 2.0 * k));
  }
}
