#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lambda_lab/error.hpp"
#include "lambda_lab/expsum.hpp"
#include "lambda_lab/rng.hpp"
#include "oracles.hpp"

using namespace lambda_lab;

namespace {

FrequencySet lattice1(std::vector<std::int64_t> pts, std::int64_t R = 1) {
  return FrequencySet(ManifoldSpec(ManifoldKind::Lattice, 1), R, std::move(pts));
}

std::vector<Complex> random_coeffs(std::size_t n, std::uint64_t seed) {
  std::vector<Complex> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = {2.0 * counter_uniform(seed, i, 0) - 1.0, 2.0 * counter_uniform(seed, i, 1) - 1.0};
  return a;
}

// Random subset of [0, range) with `n` distinct values.
std::vector<std::int64_t> random_points(std::size_t n, std::int64_t range, std::uint64_t seed) {
  std::vector<std::int64_t> out;
  for (std::uint64_t t = 0; out.size() < n; ++t) {
    const auto v = static_cast<std::int64_t>(counter_uniform(seed, t) * static_cast<double>(range));
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate: single frequency has unit modulus, F(0) is the coefficient sum") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 4);
  const auto a = random_coeffs(f.size(), 3);
  const std::vector<double> origin{0.0, 0.0, 0.0};
  Complex sum = 0;
  for (auto v : a) sum += v;
  CHECK(std::abs(evaluate(f, a, origin)[0] - sum) < 1e-12);

  const FrequencySet one = f.subset(std::vector<std::size_t>{5}, {});
  const std::vector<Complex> unit{1.0};
  const std::vector<double> xs{0.3, 1.7, 2.9, 3.1, 0.01, 0.5};
  for (Complex v : evaluate(one, unit, xs)) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate: 1 + e(1/2) vanishes") {
  const FrequencySet f = lattice1({0, 1});
  const std::vector<Complex> a{1.0, 1.0};
  const std::vector<double> x{0.5};
  CHECK(std::abs(evaluate(f, a, x)[0]) < 1e-15);
}

TEST_CASE("count_energy: known values and brute force") {
  const std::vector<std::int64_t> s{1, 2, 3};
  CHECK(count_energy(s, 1, 2) == 19);
  CHECK(oracle::brute_energy(s, 2) == 19);
  for (int k = 1; k <= 4; ++k) CHECK(count_energy(std::vector<std::int64_t>{7}, 1, k) == 1);

  std::vector<std::int64_t> squares;
  for (std::int64_t m = 1; m <= 16; ++m) squares.push_back(m * m);
  CHECK(count_energy(squares, 1, 2) == oracle::brute_energy(squares, 2));

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = random_points(9, 40, seed);
    CHECK(count_energy(pts, 1, 2) == oracle::brute_energy(pts, 2));
    CHECK(count_energy(pts, 1, 3) == oracle::brute_energy(pts, 3));
  }
}

TEST_CASE("count_energy: two-dimensional sums use every coordinate") {
  // {(0,0),(1,0),(0,1),(1,1)}: 4-term sums; the 2-D energy is the product of 1-D energies.
  const std::vector<std::int64_t> pts{0, 0, 1, 0, 0, 1, 1, 1};
  const std::vector<std::int64_t> line{0, 1};
  CHECK(count_energy(pts, 2, 2) == count_energy(line, 1, 2) * count_energy(line, 1, 2));
  CHECK_THROWS_AS(count_energy(pts, 2, 2, 10.0), BudgetExceeded);
}

TEST_CASE("exact-even: {0,1} with p = 4 gives 6") {
  const FrequencySet f = lattice1({0, 1});
  const std::vector<Complex> a{1.0, 1.0};
  CHECK(exact_even_norm(f, a, 4) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(oracle::expansion_moment(f, a, 2) == doctest::Approx(6.0).epsilon(1e-14));
  const NormReport r = norm_lp(f, a, 4.0, {.method = NormMethod::ExactEven});
  CHECK(r.value == doctest::Approx(std::pow(6.0, 0.25)).epsilon(1e-14));
  CHECK(r.method == NormMethod::ExactEven);
}

TEST_CASE("exact-even: singleton has value 1 for every even p") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 3), 8).subset(std::vector<std::size_t>{3}, {});
  const std::vector<Complex> a{1.0};
  for (int p : {2, 4, 6, 8}) CHECK(norm_lp(f, a, p, {.method = NormMethod::ExactEven}).value == 1.0);
}

TEST_CASE("exact-even: Parseval on orthonormal sets") {
  for (auto kind : {ManifoldKind::EllipticParaboloid, ManifoldKind::SphereGraph, ManifoldKind::ConeGraph,
                    ManifoldKind::HyperbolicParaboloid}) {
    const FrequencySet f = full_grid(ManifoldSpec(kind, 3), 12);
    const auto a = random_coeffs(f.size(), 11);
    double l2 = 0;
    for (auto v : a) l2 += std::norm(v);
    CHECK(exact_even_norm(f, a, 2) == doctest::Approx(l2).epsilon(1e-12));
    const NormReport r = norm_lp(f, a, 2.0);
    CHECK(r.value == doctest::Approx(std::sqrt(l2)).epsilon(1e-10));
  }
}

TEST_CASE("exact-even: matches the brute-force 2k-linear expansion") {
  struct Case {
    ManifoldKind kind;
    int d;
    std::int64_t R;
  };
  for (const Case c : {Case{ManifoldKind::MomentCurve, 2, 16}, Case{ManifoldKind::MomentCurve, 3, 9},
                       Case{ManifoldKind::EllipticParaboloid, 3, 5}, Case{ManifoldKind::SphereGraph, 2, 20},
                       Case{ManifoldKind::ConeGraph, 3, 8}, Case{ManifoldKind::HyperbolicParaboloid, 3, 4}}) {
    const FrequencySet grid = full_grid(ManifoldSpec(c.kind, c.d), c.R);
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < grid.size() && pick.size() < 6; i += 1 + i % 3) pick.push_back(i);
    const FrequencySet f = grid.subset(pick, {});
    const auto a = random_coeffs(f.size(), 17 + c.R);
    for (int k = 1; k <= 3; ++k) {
      INFO("kind ", to_string(c.kind), " k ", k);
      const double want = oracle::expansion_moment(f, a, k);
      CHECK(exact_even_norm(f, a, 2 * k) == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact-even: equals the energy count on integer sets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = random_points(5 + seed, 60, seed + 100);
    const FrequencySet f = lattice1(pts, 64);
    const std::vector<Complex> ones(f.size(), 1.0);
    for (int k = 1; k <= 3; ++k) {
      const double energy = static_cast<double>(count_energy(pts, 1, k));
      CHECK(exact_even_norm(f, ones, 2 * k) == doctest::Approx(energy).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact-even: gradient satisfies Σ conj(a)·b = moment and matches finite differences") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 16).subset(
      std::vector<std::size_t>{0, 3, 4, 9, 15}, {});
  const auto a = random_coeffs(f.size(), 5);
  const ExactEvenPlan plan(f, 3);
  std::vector<Complex> g(f.size());
  const double m = plan.moment_and_gradient(a, g);
  Complex dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += std::conj(a[i]) * g[i];
  CHECK(dot.real() == doctest::Approx(m).epsilon(1e-12));
  CHECK(std::abs(dot.imag()) < 1e-10 * m);

  // d/dt ∫|F(a + t e_j)|^{2k} at t = 0 equals 2k·Re(conj(g_j))·... for real t: 2k·Re(g_j) since
  // ∂/∂a_j |F|^{2k} in the real direction is 2k|F|^{2k-2} Re(F conj(e_j)).
  const double h = 1e-6;
  for (std::size_t j = 0; j < a.size(); ++j) {
    auto up = a, dn = a;
    up[j] += h;
    dn[j] -= h;
    const double fd = (plan.moment(up) - plan.moment(dn)) / (2 * h);
    CHECK(fd == doctest::Approx(6.0 * g[j].real()).epsilon(1e-5));
  }
}

TEST_CASE("exact-even: budget and exponent errors") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 64);
  const std::vector<Complex> a(f.size(), 1.0);
  CHECK_THROWS_AS(exact_even_norm(f, a, 6, 1e3), BudgetExceeded);
  CHECK_THROWS_AS(exact_even_norm(f, a, 5), InvalidArgument);
  CHECK_THROWS_AS(norm_lp(f, a, 5.0, {.method = NormMethod::ExactEven}), InvalidArgument);
}

TEST_CASE("quadrature: exact on integer sets, close to exact-even elsewhere") {
  const FrequencySet lat = lattice1({0, 3, 4, 11, 12, 20}, 32);
  const auto a = random_coeffs(lat.size(), 8);
  const QuadratureEngine q(lat, 6.0);
  CHECK(q.exact());
  CHECK(q.moment(a) == doctest::Approx(exact_even_norm(lat, a, 6)).epsilon(1e-12));

  for (auto kind : {ManifoldKind::MomentCurve, ManifoldKind::SphereGraph}) {
    const FrequencySet f = full_grid(ManifoldSpec(kind, 2), 24);
    const auto b = random_coeffs(f.size(), 9);
    for (int p : {4, 6}) {
      const QuadratureEngine e(f, p);
      CHECK_FALSE(e.exact());
      CHECK(e.moment(b) == doctest::Approx(exact_even_norm(f, b, p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("quadrature: gradient agrees with exact-even") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 6);
  const auto a = random_coeffs(f.size(), 21);
  const QuadratureEngine q(f, 4.0);
  const ExactEvenPlan plan(f, 2);
  std::vector<Complex> gq(f.size()), ge(f.size());
  const double mq = q.moment_and_gradient(a, gq);
  const double me = plan.moment_and_gradient(a, ge);
  CHECK(mq == doctest::Approx(me).epsilon(1e-9));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(gq[i] - ge[i]) < 1e-8 * me);
}

TEST_CASE("quadrature: non-even exponent against a fine reference grid") {
  const FrequencySet f = lattice1({0, 1, 3}, 4);
  const std::vector<Complex> a{1.0, Complex(0.0, 1.0), 0.5};
  const NormReport r = norm_lp(f, a, 3.0, {.method = NormMethod::Quadrature, .resolution = 64.0});
  const double ref = oracle::grid_moment(f, a, 3.0, 20000);
  CHECK(r.moment == doctest::Approx(ref).epsilon(1e-6));
  CHECK(r.error >= 0.0);
}

TEST_CASE("quadrature: refuses resolution below 4") {
  const FrequencySet f = lattice1({0, 1});
  const std::vector<Complex> a{1.0, 1.0};
  CHECK_THROWS_AS(norm_lp(f, a, 4.0, {.method = NormMethod::Quadrature, .resolution = 3.0}), InvalidArgument);
}

TEST_CASE("monte-carlo: agrees with exact-even within 3 standard errors") {
  const FrequencySet f = lattice1({0, 1});
  const std::vector<Complex> a{1.0, 1.0};
  const NormReport r = norm_lp(f, a, 4.0, {.method = NormMethod::MonteCarlo, .samples = 1'000'000, .seed = 4});
  CHECK(std::abs(r.moment - 6.0) < 3.0 * r.moment_error);
  CHECK(std::abs(r.value - std::pow(6.0, 0.25)) < 3.0 * r.error);

  const FrequencySet g = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 16);
  const auto b = random_coeffs(g.size(), 2);
  const NormReport m = norm_lp(g, b, 4.0, {.method = NormMethod::MonteCarlo, .samples = 400'000, .seed = 1});
  CHECK(std::abs(m.moment - exact_even_norm(g, b, 4)) < 3.5 * m.moment_error);
}

TEST_CASE("norms: scaling covariance and p-monotonicity") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 12);
  const auto a = random_coeffs(f.size(), 31);
  auto b = a;
  for (auto& v : b) v *= 4.0;  // a power of two keeps every product exact
  for (int p : {2, 4, 6}) {
    CHECK(norm_lp(f, b, p).value == doctest::Approx(4.0 * norm_lp(f, a, p).value).epsilon(1e-13));
  }
  double prev = 0;
  for (int p : {2, 4, 6, 8}) {
    const NormReport r = norm_lp(f, a, p);
    CHECK(r.value + r.error >= prev);
    prev = r.value;
  }
}

TEST_CASE("norms: triangle inequality") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = random_coeffs(f.size(), seed);
    const auto b = random_coeffs(f.size(), seed + 50);
    std::vector<Complex> s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
    for (auto method : {NormMethod::ExactEven, NormMethod::Quadrature}) {
      const NormConfig cfg{.method = method};
      const NormReport ra = norm_lp(f, a, 4.0, cfg), rb = norm_lp(f, b, 4.0, cfg), rs = norm_lp(f, s, 4.0, cfg);
      CHECK(rs.value <= ra.value + rb.value + ra.error + rb.error + rs.error + 1e-12);
    }
  }
}

TEST_CASE("norm engine: auto falls back when the exact budget is exceeded") {
  const FrequencySet f = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 64);
  NormConfig cfg;
  cfg.exact_budget = 1e4;
  const NormEngine e(f, 6.0, cfg);
  CHECK(e.method() == NormMethod::Quadrature);
  cfg.quadrature_budget = 10;
  const NormEngine m(f, 6.0, cfg);
  CHECK(m.method() == NormMethod::MonteCarlo);
  CHECK_FALSE(m.has_gradient());
}

TEST_CASE("coefficients: norms") {
  const Coefficients c = Coefficients::steinhaus(50, 1, 2);
  CHECK(c.l2_norm() == doctest::Approx(std::sqrt(50.0)).epsilon(1e-14));
  CHECK(c.lp_norm(4.0) == doctest::Approx(std::pow(50.0, 0.25)).epsilon(1e-14));
  const Coefficients z = Coefficients::constant(4, 0.0);
  CHECK(z.l2_norm() == 0.0);
  const std::vector<std::size_t> idx{1, 3};
  CHECK(Coefficients::indicator(5, idx).l2_norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("exact-even: large convolutions are refused before they allocate") {
  std::vector<std::int64_t> n(20000);
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = static_cast<std::int64_t>(3 * i);
  const FrequencySet big(ManifoldSpec(ManifoldKind::Lattice, 1), 1, n);
  CHECK_THROWS_AS(ExactEvenPlan(big, 2), BudgetExceeded);
  const NormEngine engine(big, 4.0);
  CHECK(engine.method() == NormMethod::Quadrature);
}
