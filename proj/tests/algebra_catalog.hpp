#pragma once

#include <string>
#include <vector>

#include "bht/polynomial.hpp"

namespace catalog {

struct Pair {
  std::string label;
  bht::Polynomial p;
  bht::Polynomial q;
};

inline bht::Polynomial t_pow(int k, bht::Rational c = 1) { return bht::Polynomial::monomial(c, k); }

inline bht::Polynomial antiderivative(const bht::Polynomial& h) {
  std::vector<bht::Rational> c(h.coeffs().size() + 1);
  for (std::size_t k = 0; k < h.coeffs().size(); ++k) c[k + 1] = h.coeffs()[k] / bht::Rational(k + 1);
  return bht::Polynomial(std::move(c));
}

inline bht::Polynomial power(const bht::Polynomial& p, int k) {
  bht::Polynomial out = bht::Polynomial::constant(1);
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

/// Pair whose difference P' - Q' equals h: P = int h + t^7, Q = t^7.
inline Pair from_difference(const std::string& label, const bht::Polynomial& h) {
  return {label, antiderivative(h) + t_pow(7), t_pow(7)};
}

/// Twenty (P, Q) pairs covering simple, double, triple and quadruple nonzero
/// roots of P' - Q', roots only at zero, and no real roots at all.
inline std::vector<Pair> correlation_pairs() {
  using bht::parse_polynomial;
  const auto tm1 = parse_polynomial("t - 1");
  const auto tp1 = parse_polynomial("t + 1");
  std::vector<Pair> v;
  v.push_back({"t^6 vs 3t^4-3t^2", t_pow(6), parse_polynomial("3t^4 - 3t^2")});
  v.push_back({"t vs t^2", t_pow(1), t_pow(2)});
  for (int d = 3; d <= 6; ++d) v.push_back({"t vs t^" + std::to_string(d), t_pow(1), t_pow(d)});
  v.push_back({"t^2 vs t^3", t_pow(2), t_pow(3)});
  v.push_back({"double root at 1", parse_polynomial("1/4*t^4 + 1/2*t^2"), parse_polynomial("2/3*t^3")});
  v.push_back({"triple root at 1", parse_polynomial("1/4*t^4 + 3/2*t^2"), parse_polynomial("t^3 + t")});
  v.push_back({"t^2 vs t^4", t_pow(2), t_pow(4)});
  v.push_back({"t+t^3 vs t+t^2", parse_polynomial("t + t^3"), parse_polynomial("t + t^2")});
  v.push_back({"t^5 vs t^3", t_pow(5), t_pow(3)});
  v.push_back({"no real root", parse_polynomial("1/3*t^3 + t^2 + t"), t_pow(2)});
  v.push_back({"t^4-t^2 vs 2t^6+t^2", parse_polynomial("t^4 - t^2"), parse_polynomial("2t^6 + t^2")});
  v.push_back({"quadruple root at 2", parse_polynomial("1/5*t^5 + 8t^3 + 16t"),
               parse_polynomial("2t^4 + 16t^2")});
  v.push_back({"t^3 vs t^2", t_pow(3), t_pow(2)});
  v.push_back({"double root at -1/2", parse_polynomial("4/3*t^3 + t"), parse_polynomial("-2t^2")});
  v.push_back(from_difference("(t-1)^2 (t+1)^3", power(tm1, 2) * power(tp1, 3)));
  v.push_back(from_difference("t^2 (t-3)^2", t_pow(2) * power(parse_polynomial("t - 3"), 2)));
  v.push_back(from_difference("(t^2-2)^3", power(parse_polynomial("t^2 - 2"), 3)));
  return v;
}

}  // namespace catalog
