#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bht/errors.hpp"
#include "bht/pvquad.hpp"
#include "oracles.hpp"

using namespace bht;
using cplx = std::complex<double>;

namespace {

Polynomial P(const char* s) { return parse_polynomial(s); }
const auto g1 = TestFunction::gaussian();

}  // namespace

TEST_SUITE("pvquad") {

TEST_CASE("even pairs vanish") {
  const auto f = TestFunction::gaussian(0.8, 0.2, 1.0);
  const auto g = TestFunction::gaussian(1.5, -0.4, -2.0);
  const auto r = bht_truncated(P("t^2"), P("t^4"), f, g, 0.3, 1e-6, 64.0);
  CHECK(std::abs(r.value) <= 1e-10);
}

TEST_CASE("zero inputs give exact zeros") {
  const auto r = bht_truncated(P("t"), P("t^2"), TestFunction{}, g1, 0.1, 1e-6, 64.0);
  CHECK(r.value == cplx(0.0));
  CHECK(linear_multiplier_oracle(1.0, 2.0, g1, TestFunction{}, 0.0) == cplx(0.0));
}

TEST_CASE("truncation preconditions") {
  CHECK_THROWS_AS(bht_truncated(P("t"), P("t^2"), g1, g1, 0.0, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(bht_truncated(P("t"), P("t^2"), g1, g1, 0.0, -1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(linear_multiplier_oracle(2.0, 2.0, g1, g1, 0.0), PreconditionError);
}

TEST_CASE("epsilon schedule and convergence estimate") {
  const auto r = bht_truncated(P("t"), P("t^2"), g1, g1, 0.4, 1e-3, 32.0);
  REQUIRE(r.epsilon_schedule.size() == 2);
  CHECK(r.epsilon_schedule.back() == std::pair<double, double>{1e-3, 32.0});
  const auto coarse = bht_truncated(P("t"), P("t^2"), g1, g1, 0.4, 2e-3, 16.0);
  CHECK(r.convergence_estimate >= std::abs(r.value - coarse.value) - 1e-8);
}

TEST_CASE("truncated value matches a direct Simpson oracle") {
  const auto p = P("t");
  const auto q = P("t^2");
  const auto f = TestFunction::gaussian(1.0, 0.0, 0.5);
  const double x = 0.3, eps = 1e-3, R = 8.0;
  auto pair = [&](double t) {
    return (f(x - p.evaluate(t)) * g1(x - q.evaluate(t)) - f(x + t) * g1(x - t * t)) / t;
  };
  const cplx want = oracle::simpson<cplx>(pair, eps, 0.1, 400000) + oracle::simpson<cplx>(pair, 0.1, R, 400000);
  const auto r = bht_truncated(p, q, f, g1, x, eps, R);
  CHECK(std::abs(r.value - want) <= 1e-8);
}

TEST_CASE("linear pair matches the Fourier-side oracle") {
  for (double x : {0.0, 0.5, -0.9}) {
    CAPTURE(x);
    const auto r = bht_truncated(P("t"), P("2t"), g1, g1, x, 1e-9, 1e3);
    CHECK(std::abs(r.value - linear_multiplier_oracle(1.0, 2.0, g1, g1, x)) <= 1e-6);
  }
}

TEST_CASE("oracle value is purely imaginary for real even inputs") {
  const auto v = linear_multiplier_oracle(1.0, 2.0, g1, g1, 0.0);
  CHECK(std::abs(v.real()) < 1e-8);
}

TEST_CASE("time and frequency paths of T_j agree") {
  const std::vector<double> xs{-0.4, 0.0, 0.7};
  const auto a = tj(P("t"), P("t^2"), g1, g1, 3, xs);
  const auto b = tj_frequency(P("t"), P("t^2"), g1, g1, 3, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-6);
}

TEST_CASE("T_j annihilates near-constant inputs") {
  // The first-order term grows like 2 pi x 2^{-j} / sigma^2, so the bound is
  // checked near x = 0.
  const auto wide = TestFunction::gaussian(1e3);
  const std::vector<double> xs{0.0, 0.1};
  for (int j = 0; j <= 4; ++j) {
    const auto r = tj(P("t"), P("t^2"), wide, wide, j, xs);
    for (const auto& v : r.values) CHECK(std::abs(v) <= 1e-6);
  }
}

TEST_CASE("dyadic pieces sum to the truncated transform") {
  const std::vector<double> xs{-0.5, 0.7};
  const auto f = TestFunction::gaussian(1.0, 0.2, 0.5);
  std::vector<cplx> acc(xs.size());
  for (int j = -5; j <= 20; ++j) {
    const auto piece = tj(P("t"), P("t^2"), f, g1, j, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) acc[i] += piece.values[i];
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto r = bht_truncated(P("t"), P("t^2"), f, g1, xs[i], std::ldexp(1.0, -21), 64.0);
    CHECK(std::abs(acc[i] - r.value) <= 1e-5);
  }
}

TEST_CASE("band-restricted pieces") {
  // f-hat lives near xi = 3, g-hat near eta = -3.
  const auto f = TestFunction::gaussian(4.0, 0.0, 3.0);
  const auto g = TestFunction::gaussian(4.0, 0.0, -3.0);
  const auto xs = linspace(-1.0, 1.0, 65);
  const auto zero = tjmn(P("t"), P("t^2"), f, g, 0, -4, 1, xs);
  for (const auto& v : zero.values) CHECK(std::abs(v) < 1e-10);

  std::vector<cplx> acc(xs.size());
  for (int m = -1; m <= 4; ++m)
    for (int n = -1; n <= 4; ++n) {
      const auto piece = tjmn(P("t"), P("t^2"), f, g, 0, m, n, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) acc[i] += piece.values[i];
    }
  const auto whole = tj(P("t"), P("t^2"), f, g, 0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(acc[i] - whole.values[i]) <= 1e-5);
}

TEST_CASE("maximal function") {
  const auto wide = TestFunction::gaussian(100.0);
  const auto near_one = maximal(P("t"), P("t^2"), wide, wide, 0.0, default_eps_grid());
  CHECK(std::abs(near_one.value - 1.0) <= 1e-3);

  const auto f = TestFunction::gaussian(0.5, 0.3, 2.0);
  const auto r = maximal(P("t"), P("t^2"), f, g1, 0.6, default_eps_grid());
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    CHECK(r.averages[i] >= 0.0);
    CHECK(r.signed_averages[i] <= r.averages[i]);
  }
  CHECK(r.upper_bound >= r.value);

  std::vector<double> coarse{0.1, 0.5};
  CHECK_THROWS_AS(maximal(P("t"), P("t^2"), g1, g1, 0.0, coarse), PreconditionError);
  CHECK_THROWS_AS(maximal(P("t"), P("t^2"), g1, g1, 0.0, {}), PreconditionError);
}

TEST_CASE("maximal function is stable under eps-grid refinement") {
  const auto coarse = maximal(P("t"), P("t^2"), g1, g1, 0.0, default_eps_grid());
  std::vector<double> fine;
  for (int k = -400; k <= 120; ++k) fine.push_back(std::exp2(0.05 * k));
  const auto r = maximal(P("t"), P("t^2"), g1, g1, 0.0, fine);
  CHECK(std::abs(r.value - coarse.value) <= 1e-4);
}

TEST_CASE("jacobian scan for the reference pair") {
  const auto scan = jacobian_scan(P("t^6"), P("3t^4 - 3t^2"), 1, {4, 5, 6, 7, 8});
  CHECK(scan.multiplicity == 2);
  auto closed = [](double t) { return -6.0 * (t + 1.0) * t * t * (t + 2.0) * (t + 2.0); };
  for (double t : {-0.3, 0.01, 0.2}) CHECK(scan.jacobian.evaluate(t) == doctest::Approx(closed(t)).epsilon(1e-14));
  for (const auto& row : scan.rows) {
    const double lo = std::ldexp(1.0, -row.j - 1), hi = std::ldexp(1.0, -row.j + 1);
    double want = INFINITY;
    for (int s = 0; s <= 200000; ++s) {
      const double t = lo + (hi - lo) * s / 200000.0;
      want = std::min({want, std::abs(closed(t)), std::abs(closed(-t))});
    }
    CHECK(row.min_abs == doctest::Approx(want).epsilon(1e-8));
    CHECK(row.ratio == doctest::Approx(want * std::ldexp(1.0, 2 * row.j)).epsilon(1e-8));
  }
}

TEST_CASE("jacobian scan for a simple root") {
  const auto scan = jacobian_scan(P("t"), P("t^2"), Rational(1, 2), {2, 3, 4, 5, 6});
  CHECK(scan.multiplicity == 1);
  for (const auto& row : scan.rows) {
    CHECK(row.ratio >= 1.0 - 1e-12);
    CHECK(row.ratio <= 4.0);
  }
  CHECK(jacobian_scan(P("t"), P("t^2"), Rational(1, 2), {}).rows.empty());
  CHECK_THROWS_AS(jacobian_scan(P("t"), P("t^2"), 1, {2}), PreconditionError);
  CHECK_THROWS_AS(jacobian_scan(P("t"), P("t^2"), 0, {2}), PreconditionError);
}

TEST_CASE("grid helpers") {
  const auto xs = linspace(-1.0, 1.0, 5);
  CHECK(xs == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  const auto grid = default_eps_grid();
  CHECK(grid.front() == std::ldexp(1.0, -20));
  CHECK(grid.back() == std::ldexp(1.0, 6));
  const auto many = bht_on_grid(P("t"), P("t^2"), g1, g1, {0.1, 0.2}, 1e-4, 8.0);
  CHECK(many.size() == 2);
  CHECK(many[1].value == bht_truncated(P("t"), P("t^2"), g1, g1, 0.2, 1e-4, 8.0).value);
}

}  // TEST_SUITE
