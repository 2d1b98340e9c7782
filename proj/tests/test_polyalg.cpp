#include <doctest.h>

#include <random>
#include <string>

#include "algebra_catalog.hpp"
#include "bht/errors.hpp"
#include "bht/polynomial.hpp"
#include "oracles.hpp"

using namespace bht;

namespace {

Polynomial P(const char* s) { return parse_polynomial(s); }

// (t + t0)^n - t0^n via Pascal's triangle, computed independently of the
// polynomial class.
std::vector<Rational> binomial_shift(int n, const Rational& t0) {
  std::vector<Rational> row{1};
  for (int k = 1; k <= n; ++k) {
    std::vector<Rational> next(row.size() + 1);
    for (std::size_t i = 0; i < row.size(); ++i) {
      next[i] += row[i] * t0;
      next[i + 1] += row[i];
    }
    row = std::move(next);
  }
  row[0] = 0;
  return row;
}

Polynomial random_poly(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree), coef(-5, 5);
  std::vector<Rational> c(deg(rng) + 1);
  for (auto& x : c) x = Rational(coef(rng), 1 + (coef(rng) + 5) % 3);
  return Polynomial(std::move(c));
}

}  // namespace

TEST_SUITE("polyalg") {

TEST_CASE("parse reads coefficients") {
  CHECK(P("t^2 - 3t").coeffs() == std::vector<Rational>{0, -3, 1});
  CHECK(P("3t^4 - 3t^2").coeffs() == std::vector<Rational>{0, 0, -3, 0, 3});
  CHECK(P("3t^4 − 3t^2") == P("3t^4 - 3t^2"));
  CHECK(P("1/4*t^4 + 0.5*t") .coeffs() == std::vector<Rational>{0, Rational(1, 2), 0, 0, Rational(1, 4)});
  CHECK(P("t^2 + t^2").coeffs() == std::vector<Rational>{0, 0, 2});
  CHECK(P("t - t").is_zero());
}

TEST_CASE("malformed text raises a positioned parse error") {
  CHECK_THROWS_AS(P("t^^2"), ParseError);
  CHECK_THROWS_AS(P(""), ParseError);
  CHECK_THROWS_AS(P("t^"), ParseError);
  CHECK_THROWS_AS(P("3x"), ParseError);
  try {
    P("t^^2");
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("to_string round-trips through the parser") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_poly(rng, 7);
    CHECK(parse_polynomial(p.to_string()) == p);
  }
}

TEST_CASE("degree profile") {
  auto a = degree_profile(P("t^6"));
  CHECK(a.leading == 6);
  CHECK(a.trailing == 6);
  auto b = degree_profile(P("3t^4 - 3t^2"));
  CHECK(b.leading == 4);
  CHECK(b.trailing == 2);
  auto c = degree_profile(P("t"));
  CHECK(c.leading == 1);
  CHECK(c.trailing == 1);
  auto d = degree_profile(P("t^2 + 1"));
  CHECK_FALSE(d.constant_term_zero);
}

TEST_CASE("square-free decomposition reconstructs the input") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    auto p = random_poly(rng, 4) * random_poly(rng, 3);
    p = p * random_poly(rng, 2) * random_poly(rng, 2);
    if (p.degree() < 1) continue;
    Polynomial prod = Polynomial::constant(1);
    for (const auto& f : square_free_decomposition(p)) {
      CHECK(f.factor.leading_coeff() == 1);
      CHECK(gcd(f.factor, f.factor.derivative()).degree() == 0);
      for (int k = 0; k < f.multiplicity; ++k) prod = prod * f.factor;
    }
    CHECK(make_monic(p) == prod);
  }
}

TEST_CASE("Sturm counts match known roots") {
  SturmSequence s(P("t^3 - 2t"));
  CHECK(s.count_real_roots() == 3);
  CHECK(s.count_roots(0, 2) == 1);
  CHECK(s.count_roots(-2, 0) == 2);  // (-2, 0] holds -sqrt 2 and 0
  CHECK(SturmSequence(P("t^2 + 1")).count_real_roots() == 0);
}

TEST_CASE("correlation degree of the reference pairs") {
  CHECK(correlation_degree(P("t^6"), P("3t^4 - 3t^2")) == 2);
  CHECK(correlation_degree(P("t"), P("t^2")) == 1);
  for (int d = 3; d <= 6; ++d) {
    const auto q = Polynomial::monomial(1, d);
    const int exact = correlation_degree(P("t"), q);
    CHECK(exact == 1);
    CHECK(oracle::max_root_multiplicity((P("t").derivative() - q.derivative()).to_doubles()) == exact);
  }
  CHECK_THROWS_AS(correlation_degree(P("t^2 + t"), P("t^2 + t + 1")), DegeneratePairError);
}

TEST_CASE("correlation degree agrees with the floating multiplicity oracle") {
  for (const auto& pair : catalog::correlation_pairs()) {
    CAPTURE(pair.label);
    const auto h = (pair.p.derivative() - pair.q.derivative()).to_doubles();
    const int observed = oracle::max_root_multiplicity(h);
    const auto detail = correlation_degree_detail(pair.p, pair.q);
    CHECK(detail.degree == std::max(observed, 1));
    CHECK(detail.by_convention == (observed == 0));
  }
}

TEST_CASE("admissibility") {
  auto a = admissibility(P("t^6"), P("3t^4 - 3t^2"));
  CHECK(a.admissible);
  CHECK(a.correlation_degree == 2);
  CHECK(a.r_threshold == Rational(2, 3));
  auto b = admissibility(P("t + t^3"), P("t + t^2"));
  CHECK_FALSE(b.admissible);
  REQUIRE(b.failure_reason.has_value());
  CHECK(b.failure_reason->find("equal trailing degrees") != std::string::npos);
  auto c = admissibility(P("t"), P("t^2"));
  CHECK(c.admissible);
  CHECK(c.r_threshold == Rational(1, 2));
  CHECK_FALSE(admissibility(P("t^2 + 1"), P("t^3")).admissible);
}

TEST_CASE("recenter") {
  CHECK(recenter(P("t^2"), 1) == P("t^2 + 2t"));
  CHECK(recenter(P("t"), Rational(7, 3)) == P("t"));
  CHECK(recenter(P("t^6"), 1) == Polynomial(binomial_shift(6, 1)));
  CHECK(recenter(P("t^6"), 1) == P("t^6 + 6t^5 + 15t^4 + 20t^3 + 15t^2 + 6t"));
  CHECK(recenter(P("t^5"), Rational(-1, 2)) == Polynomial(binomial_shift(5, Rational(-1, 2))));
}

TEST_CASE("recentering preserves values") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_poly(rng, 6);
    const Rational t0(static_cast<int>(rng() % 9) - 4, 3);
    const auto r = recenter(p, t0);
    for (int k = -3; k <= 3; ++k) {
      const Rational t(k, 2);
      CHECK(r(t) == p(t + t0) - p(t0));
    }
  }
}

TEST_CASE("root multiplicity") {
  CHECK(root_multiplicity(P("t^3 - 3t^2 + 3t - 1"), 1) == 3);
  CHECK(root_multiplicity(P("t^2 + 1"), 1) == 0);
}

TEST_CASE("error part") {
  CHECK(error_part(P("t^2 + t")) == P("t^2"));
  CHECK(error_part(P("t^3")).is_zero());
  CHECK(error_part(P("t^2 + 5t^4")) == P("5t^4"));
  CHECK_THROWS_AS(error_part(P("3t^2 + t^3")), PreconditionError);
  CHECK(error_part(P("3t^2 + t^3"), true) == P("1/3*t^3"));
}

TEST_CASE("trailing normalization") {
  const auto n = normalize_trailing(P("-3t^2 + 3t^4"));
  CHECK(n.scale == -3);
  CHECK(n.trailing_degree == 2);
  CHECK(n.normalized == P("t^2 - t^4"));
  CHECK(n.normalized * n.scale == P("3t^4 - 3t^2"));
}

TEST_CASE("rational conversion is exact for doubles") {
  for (double v : {0.1, -3.75, 1e-300, 6.02e23}) CHECK(to_double(rational_from_double(v)) == v);
  CHECK(to_string(Rational(4, 6)) == "2/3");
}

}  // TEST_SUITE
