#include "bht/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "bht/errors.hpp"

namespace bht {

namespace mp = boost::multiprecision;

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw PreconditionError("cannot convert non-finite double to a rational");
  }
  if (value == 0.0) return Rational(0);
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  mp::cpp_int num(scaled);
  if (exponent >= 0) {
    num <<= exponent;
    return Rational(num);
  }
  mp::cpp_int den(1);
  den <<= -exponent;
  return Rational(num, den);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string to_string(const Rational& value) {
  if (mp::denominator(value) == 1) return mp::numerator(value).str();
  return mp::numerator(value).str() + "/" + mp::denominator(value).str();
}

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  normalize();
}

Polynomial Polynomial::monomial(const Rational& c, int power) {
  if (power < 0) throw PreconditionError("negative monomial power");
  std::vector<Rational> cs(static_cast<std::size_t>(power) + 1);
  cs.back() = c;
  return Polynomial(std::move(cs));
}

void Polynomial::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::coeff(int k) const {
  if (k < 0 || k > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(k)];
}

const Rational& Polynomial::leading_coeff() const {
  if (is_zero()) throw PreconditionError("zero polynomial has no leading coefficient");
  return coeffs_.back();
}

Rational Polynomial::operator()(const Rational& t) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Polynomial::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * t + to_double(*it);
  }
  return acc;
}

std::vector<double> Polynomial::to_doubles() const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(to_double(c));
  return out;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> cs(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) cs[k - 1] = coeffs_[k] * static_cast<long>(k);
  return Polynomial(std::move(cs));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  normalize();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  normalize();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  for (auto& c : coeffs_) c *= s;
  normalize();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> cs(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) cs[i + k] += a.coeffs_[i] * b.coeffs_[k];
  }
  return Polynomial(std::move(cs));
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

std::string Polynomial::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    Rational mag = mp::abs(c);
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    const bool unit = (mag == 1) && k > 0;
    if (!unit) {
      out += bht::to_string(mag);
      if (k > 0) out += "*";
    }
    if (k >= 1) out += "t";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw PreconditionError("polynomial division by zero");
  std::vector<Rational> rem = num.coeffs();
  const int dd = den.degree();
  const Rational& lead = den.leading_coeff();
  if (num.degree() < dd) return {Polynomial{}, num};
  std::vector<Rational> quot(static_cast<std::size_t>(num.degree() - dd) + 1);
  for (int k = num.degree(); k >= dd; --k) {
    const Rational c = rem[static_cast<std::size_t>(k)] / lead;
    quot[static_cast<std::size_t>(k - dd)] = c;
    if (c == 0) continue;
    for (int i = 0; i <= dd; ++i) {
      rem[static_cast<std::size_t>(k - dd + i)] -= c * den.coeffs()[static_cast<std::size_t>(i)];
    }
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial make_monic(const Polynomial& p) {
  if (p.is_zero()) return p;
  return p * (Rational(1) / p.leading_coeff());
}

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  Polynomial x = a;
  Polynomial y = b;
  while (!y.is_zero()) {
    Polynomial r = divmod(x, y).second;
    x = std::move(y);
    y = make_monic(r);
  }
  return make_monic(x);
}

std::vector<SquareFreeFactor> square_free_decomposition(const Polynomial& p) {
  std::vector<SquareFreeFactor> out;
  if (p.degree() < 1) return out;
  const Polynomial dp = p.derivative();
  Polynomial a = gcd(p, dp);
  Polynomial b = divmod(p, a).first;
  Polynomial c = divmod(dp, a).first;
  Polynomial d = c - b.derivative();
  int i = 1;
  while (b.degree() >= 1) {
    Polynomial g = gcd(b, d);
    if (g.degree() >= 1) out.push_back({make_monic(g), i});
    b = divmod(b, g).first;
    c = divmod(d, g).first;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

namespace {

int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

int count_changes(const std::vector<int>& signs) {
  int changes = 0;
  int prev = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

SturmSequence::SturmSequence(const Polynomial& square_free) {
  if (square_free.is_zero()) throw PreconditionError("Sturm sequence of zero polynomial");
  chain_.push_back(square_free);
  Polynomial next = square_free.derivative();
  while (!next.is_zero()) {
    chain_.push_back(next);
    Polynomial r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
    // Positive rescaling keeps signs and bounds coefficient growth.
    if (!r.is_zero()) r = make_monic(r) * Rational(sign_of(r.leading_coeff()) < 0 ? 1 : -1);
    next = std::move(r);
  }
}

int SturmSequence::sign_changes_at(const Rational& x) const {
  std::vector<int> signs;
  signs.reserve(chain_.size());
  for (const auto& p : chain_) signs.push_back(sign_of(p(x)));
  return count_changes(signs);
}

int SturmSequence::sign_changes_at_pos_inf() const {
  std::vector<int> signs;
  for (const auto& p : chain_) signs.push_back(sign_of(p.leading_coeff()));
  return count_changes(signs);
}

int SturmSequence::sign_changes_at_neg_inf() const {
  std::vector<int> signs;
  for (const auto& p : chain_) {
    int s = sign_of(p.leading_coeff());
    if (p.degree() % 2 == 1) s = -s;
    signs.push_back(s);
  }
  return count_changes(signs);
}

int SturmSequence::count_roots(const Rational& lo, const Rational& hi) const {
  if (hi <= lo) return 0;
  return sign_changes_at(lo) - sign_changes_at(hi);
}

int SturmSequence::count_real_roots() const {
  return sign_changes_at_neg_inf() - sign_changes_at_pos_inf();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : s_(text) {}

  Polynomial parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    Polynomial acc;
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (!first || peek_sign()) {
        if (!consume_sign(sign)) {
          if (at_end()) break;
          throw ParseError("expected '+' or '-'", pos_);
        }
        skip_ws();
      }
      acc += parse_term() * Rational(sign);
      first = false;
      skip_ws();
      if (at_end()) break;
    }
    return acc;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char cur() const { return s_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(cur()))) ++pos_;
  }
  bool is_unicode_minus() const {
    return s_.substr(pos_, 3) == "\xE2\x88\x92";
  }
  bool peek_sign() const {
    return !at_end() && (cur() == '+' || cur() == '-' || is_unicode_minus());
  }
  bool consume_sign(int& sign) {
    if (at_end()) return false;
    if (cur() == '+') { sign = 1; ++pos_; return true; }
    if (cur() == '-') { sign = -1; ++pos_; return true; }
    if (is_unicode_minus()) { sign = -1; pos_ += 3; return true; }
    return false;
  }

  mp::cpp_int parse_digits() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(cur()))) ++pos_;
    if (start == pos_) throw ParseError("expected digits", pos_);
    return mp::cpp_int(std::string(s_.substr(start, pos_ - start)));
  }

  Rational parse_coefficient() {
    mp::cpp_int whole = parse_digits();
    if (!at_end() && cur() == '.') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(cur()))) ++pos_;
      if (start == pos_) throw ParseError("expected digits after decimal point", pos_);
      std::string frac(s_.substr(start, pos_ - start));
      mp::cpp_int den = mp::pow(mp::cpp_int(10), static_cast<unsigned>(frac.size()));
      reject_exponent();
      return Rational(whole * den + mp::cpp_int(frac), den);
    }
    if (!at_end() && cur() == '/') {
      ++pos_;
      std::size_t at = pos_;
      mp::cpp_int den = parse_digits();
      if (den == 0) throw ParseError("zero denominator", at);
      reject_exponent();
      return Rational(whole, den);
    }
    reject_exponent();
    return Rational(whole);
  }

  void reject_exponent() {
    if (!at_end() && (cur() == 'e' || cur() == 'E')) {
      throw ParseError("non-rational coefficient (exponent notation)", pos_);
    }
    if (!at_end() && cur() == '.') throw ParseError("malformed decimal", pos_);
  }

  Polynomial parse_term() {
    if (at_end()) throw ParseError("expected a monomial", pos_);
    Rational coef(1);
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(cur()))) {
      coef = parse_coefficient();
      have_coef = true;
      skip_ws();
      if (!at_end() && cur() == '*') {
        ++pos_;
        skip_ws();
        if (at_end() || cur() != 't') throw ParseError("expected 't' after '*'", pos_);
      }
    }
    if (!at_end() && cur() == 't') {
      ++pos_;
      int power = 1;
      skip_ws();
      if (!at_end() && cur() == '^') {
        ++pos_;
        skip_ws();
        std::size_t at = pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(cur()))) {
          throw ParseError("expected non-negative integer exponent", pos_);
        }
        mp::cpp_int e = parse_digits();
        if (e > 4096) throw ParseError("exponent too large", at);
        power = e.convert_to<int>();
      }
      return Polynomial::monomial(coef, power);
    }
    if (!have_coef) {
      throw ParseError(std::isalpha(static_cast<unsigned char>(cur()))
                           ? "non-rational coefficient or unknown symbol"
                           : "unexpected character",
                       pos_);
    }
    return Polynomial::constant(coef);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text) { return PolyParser(text).parse(); }

// ---------------------------------------------------------------------------
// Degree data, correlation degree, admissibility

DegreeProfile degree_profile(const Polynomial& p) {
  if (p.is_zero()) throw PreconditionError("degree profile of the zero polynomial");
  DegreeProfile out;
  out.leading = p.degree();
  out.constant_term_zero = p.coeff(0) == 0;
  out.trailing = 0;
  for (int k = 1; k <= p.degree(); ++k) {
    if (p.coeff(k) != 0) {
      out.trailing = k;
      break;
    }
  }
  return out;
}

CorrelationDegree correlation_degree_detail(const Polynomial& p, const Polynomial& q) {
  const Polynomial diff = p.derivative() - q.derivative();
  if (diff.is_zero()) {
    throw DegeneratePairError("P' - Q' vanishes identically; P - Q is constant");
  }
  int best = 0;
  for (const auto& [factor, mult] : square_free_decomposition(diff)) {
    SturmSequence sturm(factor);
    int roots = sturm.count_real_roots();
    if (factor(Rational(0)) == 0) --roots;
    if (roots > 0) best = std::max(best, mult);
  }
  if (best == 0) return {1, true};
  return {best, false};
}

int correlation_degree(const Polynomial& p, const Polynomial& q) {
  return correlation_degree_detail(p, q).degree;
}

AdmissibilityReport admissibility(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) {
    throw PreconditionError("admissibility requires nonzero polynomials");
  }
  const CorrelationDegree cd = correlation_degree_detail(p, q);
  AdmissibilityReport rep;
  rep.correlation_degree = cd.degree;
  rep.degree_by_convention = cd.by_convention;
  rep.r_threshold = Rational(cd.degree, cd.degree + 1);

  const DegreeProfile dp = degree_profile(p);
  const DegreeProfile dq = degree_profile(q);
  if (!dp.constant_term_zero || !dq.constant_term_zero) {
    rep.failure_reason = "nonzero constant term";
  } else if (dp.leading == dq.leading) {
    rep.failure_reason = "equal leading degrees";
  } else if (dp.trailing == dq.trailing) {
    rep.failure_reason = "equal trailing degrees";
  }
  rep.admissible = !rep.failure_reason.has_value();
  return rep;
}

Polynomial recenter(const Polynomial& p, const Rational& t0) {
  // Taylor shift by repeated synthetic division.
  std::vector<Rational> c = p.coeffs();
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += t0 * c[k];
  }
  if (!c.empty()) c[0] = 0;
  return Polynomial(std::move(c));
}

int root_multiplicity(const Polynomial& p, const Rational& t0) {
  if (p.is_zero()) throw PreconditionError("multiplicity in the zero polynomial");
  int mult = 0;
  Polynomial cur = p;
  const Polynomial linear({-t0, Rational(1)});
  while (cur.degree() >= 1 && cur(t0) == 0) {
    cur = divmod(cur, linear).first;
    ++mult;
  }
  return mult;
}

TrailingNormalization normalize_trailing(const Polynomial& p) {
  const DegreeProfile prof = degree_profile(p);
  if (!prof.constant_term_zero) {
    throw PreconditionError("trailing normalization needs a zero constant term");
  }
  TrailingNormalization out;
  out.trailing_degree = prof.trailing;
  out.scale = p.coeff(prof.trailing);
  out.normalized = p * (Rational(1) / out.scale);
  return out;
}

Polynomial error_part(const Polynomial& p, bool allow_normalization) {
  const DegreeProfile prof = degree_profile(p);
  if (!prof.constant_term_zero || prof.trailing == 0) {
    throw PreconditionError("error part needs a zero constant term");
  }
  Polynomial base = p;
  if (p.coeff(prof.trailing) != 1) {
    if (!allow_normalization) {
      throw PreconditionError("trailing coefficient is not 1; normalize first");
    }
    base = normalize_trailing(p).normalized;
  }
  return base - Polynomial::monomial(Rational(1), prof.trailing);
}

}  // namespace bht
