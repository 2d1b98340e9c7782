#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "bht/errors.hpp"
#include "bht/kernels.hpp"
#include "bht/oscsym.hpp"
#include "oracles.hpp"

using namespace bht;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;
Polynomial P(const char* s) { return parse_polynomial(s); }

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int k = a; k <= b; ++k) v.push_back(k);
  return v;
}

}  // namespace

TEST_SUITE("oscsym") {

TEST_CASE("symbol at the origin vanishes") {
  for (int j : {0, 3}) CHECK(std::abs(mj(P("t"), P("t^2"), j, 0.0, 0.0).value) <= 1e-12);
}

TEST_CASE("reality symmetry") {
  for (auto [xi, eta] : {std::pair{1.3, -0.4}, std::pair{-7.0, 2.5}}) {
    const auto a = mj(P("t"), P("t^2"), 1, xi, eta);
    const auto b = mj(P("t"), P("t^2"), 1, -xi, -eta);
    CHECK(std::abs(a.value - std::conj(b.value)) <= 1e-10);
  }
}

TEST_CASE("unit-scale symbol matches a composite Simpson oracle") {
  const auto rho = make_rho();
  auto integrand = [&](double t) { return rho(t) * std::exp(cplx(0.0, -2.0 * pi * (t + t * t))); };
  const cplx want = oracle::simpson<cplx>(integrand, -2.0, -0.5, 1000000) +
                    oracle::simpson<cplx>(integrand, 0.5, 2.0, 1000000);
  CHECK(std::abs(mj(P("t"), P("t^2"), 0, 1.0, 1.0).value - want) <= 1e-9);
}

TEST_CASE("direct and rescaled symbols agree") {
  const auto p = P("t + t^3");
  const auto q = P("2t^2 - t^4");
  for (int j : {0, 2, 5}) {
    const PhaseModel model(p, q, j);
    const double xi = 3.0 * std::ldexp(1.0, j), eta = -2.0 * std::ldexp(1.0, 2 * j);
    CHECK_NOTHROW(mj(p, q, j, xi, eta, true));
    CHECK(std::abs(mj(p, q, j, xi, eta).value - mj_rescaled(model, xi, eta).value) <= 1e-9);
  }
}

TEST_CASE("rescaled symbol at m = 0 is the unit-scale symbol") {
  const auto v = rescaled_symbol(P("t"), P("t^2"), 0, 1.3, -0.7);
  CHECK(std::abs(v.value - mj(P("t"), P("t^2"), 0, 1.3, -0.7).value) <= 1e-9);
  CHECK_THROWS_AS(rescaled_symbol(P("t"), P("t^2"), 0, 0.0, 0.0), PreconditionError);
}

TEST_CASE("modulus bound") {
  const double bound = make_rho().abs_integral();
  for (int m : {0, 3, 8})
    for (double xi : {0.5, -1.2, 2.0})
      for (double eta : {0.6, -2.0}) CHECK(std::abs(rescaled_symbol(P("t"), P("t^2"), m, xi, eta).value) <= bound + 1e-12);
}

TEST_CASE("phase model rescales the error terms") {
  const PhaseModel model(P("t + t^3"), P("t^2"), 2);
  CHECK(model.a == 1);
  CHECK(model.b == 2);
  CHECK(model.eps_p == P("1/16*t^3"));
  CHECK(model.eps_q.is_zero());
  const PhaseModel scaled(P("3t^4 - 3t^2"), P("t^6"), 0);
  CHECK(scaled.p_scale == -3);
  CHECK(scaled.p_rescaled == P("t^2 - t^4"));
}

TEST_CASE("critical points in closed form") {
  auto a = critical_point(P("t"), P("t^2"), 2.0, -1.0);
  REQUIRE(a.records.size() == 1);
  CHECK(a.primary().t_crit == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.primary().phi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.primary().err_term == doctest::Approx(0.0));

  auto b = critical_point(P("t^2"), P("t^3"), 3.0, -2.0);
  REQUIRE_FALSE(b.non_stationary());
  CHECK(b.primary().t_crit == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.primary().phi == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(critical_point(P("t"), P("t^2"), 1.0, 1.0).non_stationary());
  CHECK_THROWS_AS(critical_point(P("t"), P("t^2"), 0.0, 0.0), PreconditionError);
}

TEST_CASE("critical point with an error term matches a grid oracle") {
  // phi'(s) = 2 (1 + 3 s^2 / 16) - 2 s at scale j = 2.
  auto dphi = [](double s) { return 2.0 * (1.0 + 3.0 * s * s / 16.0) - 2.0 * s; };
  double best = 0.5, best_v = INFINITY;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double s = 0.5 + 1.5 * i / n;
    if (std::abs(dphi(s)) < best_v) {
      best_v = std::abs(dphi(s));
      best = s;
    }
  }
  double lo = best - 3e-6, hi = best + 3e-6;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((dphi(mid) > 0) == (dphi(lo) > 0) ? lo : hi) = mid;
  }
  const auto cp = critical_point(P("t + t^3"), P("t^2"), 2.0, -1.0, 2);
  CHECK(cp.primary().t_crit == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
  CHECK(cp.primary().t_crit == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("monomial critical points") {
  const auto r = monomial_critical_points(1, 2, 2.0, -1.0);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(monomial_critical_points(1, 3, 3.0, -1.0).size() == 2);
}

TEST_CASE("stationary phase normalization") {
  const PhaseModel model(P("t"), P("t^2"), 0);
  const auto rows = stationary_phase_check(model, 2.0, -1.0, range(6, 10));
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.normalized_magnitude);
    hi = std::max(hi, r.normalized_magnitude);
  }
  CHECK(hi / lo <= 2.0);
  CHECK(std::abs(rows.back().phase_residual - pi / 4.0) < 0.05);
  CHECK(stationary_phase_check(model, 2.0, -1.0, {7}).size() == 1);
  CHECK_THROWS_AS(stationary_phase_check(model, 1.0, 1.0, {6}), PreconditionError);
}

TEST_CASE("non-stationary magnitudes decay") {
  const PhaseModel model(P("t"), P("t^2"), 0);
  const auto rows = symbol_magnitudes(model, 1.0, 1.0, range(2, 8));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].magnitude < rows[i - 1].magnitude);
}

TEST_CASE("off-diagonal cells are small") {
  const auto scan = symbol_decay_scan(P("t"), P("t^2"), 2, {6, 10}, {2, 6}, 8);
  std::map<std::pair<int, int>, double> sup;
  for (const auto& r : scan) sup[{r.m, r.n}] = r.sup_abs;
  CHECK(sup.at({10, 2}) <= 1e-3 * sup.at({6, 6}));
}

TEST_CASE("diagonal dominates its anti-diagonal far from the diagonal") {
  const auto ms = range(2, 10);
  const auto scan = symbol_decay_scan(P("t"), P("t^2"), 2, ms, ms, 6);
  std::map<std::pair<int, int>, double> sup;
  for (const auto& r : scan) sup[{r.m, r.n}] = r.sup_abs;
  for (const auto& [key, v] : sup) {
    const auto [m, n] = key;
    if (std::abs(m - n) < 5 || (m + n) % 2) continue;
    CAPTURE(m);
    CAPTURE(n);
    CHECK(v <= sup.at({(m + n) / 2, (m + n) / 2}));
  }
}

TEST_CASE("band samples") {
  const auto s = band_samples(8);
  REQUIRE(s.size() == 8);
  for (double v : s) {
    CHECK(std::abs(v) > 0.5);
    CHECK(std::abs(v) < 2.0);
  }
}

TEST_CASE("mixed derivative of the monomial critical value") {
  // phi*(xi, eta) = -xi^2 / (4 eta) for xi t + eta t^2.
  const PhaseModel model(P("t"), P("t^2"), 0);
  auto phi = [&](double xi, double eta) { return critical_value(model, xi, eta).value(); };
  for (auto [xi, eta] : {std::pair{2.0, -1.0}, std::pair{1.5, -0.8}, std::pair{-1.8, 1.2}}) {
    const double closed = xi / (2.0 * eta * eta);
    CHECK(std::abs(mixed_difference(phi, xi, eta, 1e-3) - closed) <= 1e-6);
  }
  CHECK_FALSE(critical_value(model, 1.0, 1.0).has_value());
}

TEST_CASE("mixed derivative check") {
  const PhaseModel model(P("t"), P("t^2"), 6);
  const auto grid = band_samples(8);
  const auto zero = mixed_derivative_check(model, 0.0, grid, grid);
  CHECK(zero.degenerate);
  const auto r = mixed_derivative_check(model, 0.05, grid, grid);
  CHECK_FALSE(r.degenerate);
  CHECK(r.evaluated > 0);
  CHECK(r.min_normalized >= 0.1);
}

TEST_CASE("beta function without error term") {
  const auto b = beta_function(1, 2, RealPoly{}, -2.0);
  REQUIRE(b.has_value());
  CHECK(b->zeta == doctest::Approx(1.0));
  CHECK(b->beta == doctest::Approx(-1.0));
  CHECK_FALSE(beta_function(1, 2, RealPoly{}, -10.0).has_value());
}

}  // TEST_SUITE
