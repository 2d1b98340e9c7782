#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bht {

using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double value);
double to_double(const Rational& value);
/// "p" or "p/q" in lowest terms.
std::string to_string(const Rational& value);

/// Univariate polynomial in t with exact rational coefficients.
/// coeffs()[k] is the coefficient of t^k; the highest stored coefficient is
/// nonzero unless the polynomial is identically zero (empty storage).
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  Polynomial(std::initializer_list<Rational> coeffs)
      : Polynomial(std::vector<Rational>(coeffs)) {}

  static Polynomial monomial(const Rational& c, int power);
  static Polynomial constant(const Rational& c) { return monomial(c, 0); }

  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  /// Coefficient of t^k, zero outside the stored range.
  Rational coeff(int k) const;
  const Rational& leading_coeff() const;

  Rational operator()(const Rational& t) const;
  /// Horner evaluation on the double-rounded coefficients.
  double evaluate(double t) const;
  std::vector<double> to_doubles() const;

  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Rational& s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Human-readable form accepted back by parse_polynomial, e.g. "t^2 - 3*t".
  std::string to_string() const;

 private:
  void normalize();
  std::vector<Rational> coeffs_;
};

/// Quotient and remainder; throws PreconditionError on division by zero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den);
Polynomial make_monic(const Polynomial& p);
/// Monic greatest common divisor (zero if both inputs are zero).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

struct SquareFreeFactor {
  Polynomial factor;  // monic, square-free, non-constant
  int multiplicity;
};

/// Yun's algorithm: p = c * prod factor_i^multiplicity_i with pairwise coprime
/// square-free factors. Constant input yields an empty list.
std::vector<SquareFreeFactor> square_free_decomposition(const Polynomial& p);

/// Sturm chain of a square-free polynomial.
class SturmSequence {
 public:
  explicit SturmSequence(const Polynomial& square_free);

  int sign_changes_at(const Rational& x) const;
  int sign_changes_at_neg_inf() const;
  int sign_changes_at_pos_inf() const;
  /// Number of distinct roots in the half-open interval (lo, hi].
  int count_roots(const Rational& lo, const Rational& hi) const;
  int count_real_roots() const;

  const std::vector<Polynomial>& chain() const noexcept { return chain_; }

 private:
  std::vector<Polynomial> chain_;
};

/// Grammar: monomials `c`, `c*t^k`, `ct^k`, `t^k`, `t` joined by + / - (ASCII
/// hyphen or U+2212). Coefficients are integers, `p/q`, or finite decimals.
Polynomial parse_polynomial(std::string_view text);

struct DegreeProfile {
  int leading = 0;
  /// Lowest positive power with nonzero coefficient; 0 for constants.
  int trailing = 0;
  bool constant_term_zero = true;
};

DegreeProfile degree_profile(const Polynomial& p);

struct CorrelationDegree {
  int degree = 1;
  /// True when P' - Q' has no nonzero real root and the value 1 is the
  /// adopted convention rather than an observed multiplicity.
  bool by_convention = false;
};

/// Maximum multiplicity over the nonzero real roots of P' - Q', computed
/// exactly (square-free decomposition, then Sturm counts away from t = 0).
CorrelationDegree correlation_degree_detail(const Polynomial& p, const Polynomial& q);
int correlation_degree(const Polynomial& p, const Polynomial& q);

struct AdmissibilityReport {
  bool admissible = false;
  int correlation_degree = 1;
  bool degree_by_convention = false;
  Rational r_threshold;  // d / (d + 1)
  std::optional<std::string> failure_reason;
};

AdmissibilityReport admissibility(const Polynomial& p, const Polynomial& q);

/// t -> P(t + t0) - P(t0), expanded exactly.
Polynomial recenter(const Polynomial& p, const Rational& t0);

/// Multiplicity of t0 as a root of p (0 if p(t0) != 0).
int root_multiplicity(const Polynomial& p, const Rational& t0);

/// p = scale * normalized where normalized has trailing coefficient 1.
/// Substituting frequency xi -> scale * xi undoes the rescaling in every
/// symbol built from the normalized polynomial.
struct TrailingNormalization {
  Polynomial normalized;
  Rational scale;
  int trailing_degree = 0;
};

TrailingNormalization normalize_trailing(const Polynomial& p);

/// P_eps = P - t^a where a is the trailing degree. Requires trailing
/// coefficient 1 unless `allow_normalization` is set, in which case the
/// error part of the normalized polynomial is returned.
Polynomial error_part(const Polynomial& p, bool allow_normalization = false);

}  // namespace bht
