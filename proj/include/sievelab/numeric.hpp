#ifndef SIEVELAB_NUMERIC_HPP
#define SIEVELAB_NUMERIC_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sievelab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ~168 bits of mantissa; used wherever a transcendental value needs to be
// bracketed by rationals.
using BigFloat = boost::multiprecision::cpp_bin_float_50;

// 128-bit-mantissa float, the overflow-safe fallback for reciprocal sums
// whose exact denominators grow past the configured bit threshold.
using Float128 = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<
        128, boost::multiprecision::backends::digit_base_2, void, int32_t>>;

// Exact conversion: every double is a dyadic rational.
inline Rational rat(double x) { return Rational(x); }

inline Rational pow_rat(const Rational& base, unsigned e) {
  Rational r = 1, b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline BigInt pow_int(const BigInt& base, unsigned e) {
  BigInt r = 1, b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Exact value of a binary float as a rational.
inline Rational to_rational(const BigFloat& v) {
  if (v == 0) return Rational(0);
  int e = 0;
  BigFloat m = frexp(v, &e);  // v = m * 2^e, |m| in [1/2, 1)
  constexpr int kBits = 200;
  m = ldexp(m, kBits);
  BigInt mi = m.convert_to<BigInt>();
  Rational r(mi);
  int shift = kBits - e;
  if (shift >= 0)
    r /= Rational(BigInt(1) << shift);
  else
    r *= Rational(BigInt(1) << (-shift));
  return r;
}

// Closed rational interval guaranteed to contain the true value.
struct RatInterval {
  Rational lo, hi;
};

// Pads a ~168-bit evaluation outward by 2^(exponent-128).  The padding
// dominates the few-ulp error of the elementary functions, so comparisons
// made through the bracket are conservative.
inline RatInterval outward(const BigFloat& v) {
  if (v == 0) {
    Rational eps = Rational(1, BigInt(1) << 128);
    return {-eps, eps};
  }
  int e = 0;
  (void)frexp(v, &e);
  Rational center = to_rational(v);
  Rational pad;
  int pe = e - 128;
  if (pe >= 0)
    pad = Rational(BigInt(1) << pe);
  else
    pad = Rational(1, BigInt(1) << (-pe));
  return {center - pad, center + pad};
}

inline RatInterval log_outward(const Rational& x) {
  BigFloat v = log(BigFloat(numerator(x)) / BigFloat(denominator(x)));
  return outward(v);
}

inline RatInterval exp_outward(double x) {
  return outward(exp(BigFloat(x)));
}

// floor(sqrt(n)) for n >= 0.
inline BigInt isqrt(const BigInt& n) { return sqrt(n); }

// Rational bracket of sqrt(n) of width 10^-digits; exact when n is a square.
inline RatInterval sqrt_bracket(const BigInt& n, unsigned digits = 12) {
  BigInt scale = pow_int(10, digits);
  BigInt s = isqrt(n * scale * scale);
  if (s * s == n * scale * scale) {
    Rational v(s, scale);
    return {v, v};
  }
  return {Rational(s, scale), Rational(s + 1, scale)};
}

inline double to_double(const Rational& r) {
  if (r == 0) return 0.0;
  BigFloat v = BigFloat(numerator(r)) / BigFloat(denominator(r));
  return v.convert_to<double>();
}

inline std::string rational_str(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

// ln of a positive rational, usable far outside double range.
inline double log_double(const Rational& r) {
  BigFloat v = log(BigFloat(numerator(r))) - log(BigFloat(denominator(r)));
  return v.convert_to<double>();
}

// Balanced pairwise summation; keeps intermediate operand sizes
// quasi-linear in the output instead of quadratic.
inline Rational sum_rationals(std::vector<Rational> terms) {
  if (terms.empty()) return Rational(0);
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2)
      terms[out++] = terms[i] + terms[i + 1];
    if (terms.size() & 1) terms[out++] = terms.back();
    terms.resize(out);
  }
  return terms[0];
}

// Unnormalized fraction.  Rational's canonical form runs a gcd on every
// operation, which is quadratic-cost poison for megabit sums; this type
// adds and compares without ever reducing.
struct RawFraction {
  BigInt num = 0;
  BigInt den = 1;

  RawFraction() = default;
  RawFraction(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {}
  explicit RawFraction(const Rational& r)
      : num(numerator(r)), den(denominator(r)) {}

  RawFraction operator+(const RawFraction& o) const {
    return {num * o.den + o.num * den, den * o.den};
  }

  // sign of (*this - r); exact
  int compare(const Rational& r) const {
    BigInt lhs = num * denominator(r);
    BigInt rhs = numerator(r) * den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  int compare(const RawFraction& o) const {
    BigInt lhs = num * o.den;
    BigInt rhs = o.num * den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }

  double to_double() const {
    if (num == 0) return 0.0;
    BigFloat v = BigFloat(num) / BigFloat(den);
    return v.convert_to<double>();
  }
  Rational normalized() const { return Rational(num, den); }
};

// 128-bit-float rendering of a sum of fractions.
inline double sum_fractions_double(const std::vector<RawFraction>& terms) {
  Float128 s = 0;
  for (const auto& t : terms) s += Float128(t.num) / Float128(t.den);
  return s.convert_to<double>();
}

inline RawFraction sum_fractions(std::vector<RawFraction> terms) {
  if (terms.empty()) return RawFraction();
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2)
      terms[out++] = terms[i] + terms[i + 1];
    if (terms.size() & 1) terms[out++] = std::move(terms.back());
    terms.resize(out);
  }
  return terms[0];
}

// Exact sum of 1/v over the given values as an unnormalized fraction.
inline RawFraction sum_reciprocals(const std::vector<std::uint64_t>& vals) {
  std::vector<RawFraction> terms;
  terms.reserve(vals.size());
  for (std::uint64_t v : vals) terms.emplace_back(BigInt(1), BigInt(v));
  return sum_fractions(std::move(terms));
}

// Certified sign of (sum of terms - threshold).  A 128-bit-float pass with
// a directed error bound settles fat margins; indecisive cases fall back
// to the exact pairwise tree, so the verdict always equals the exact one.
inline int compare_sum(const std::vector<RawFraction>& terms,
                       const Rational& threshold) {
  Float128 s = 0, mag = 0;
  for (const auto& t : terms) {
    Float128 v = Float128(t.num) / Float128(t.den);
    s += v;
    mag += fabs(v);
  }
  Float128 thr =
      Float128(numerator(threshold)) / Float128(denominator(threshold));
  Float128 err = (mag + fabs(thr) + 1) *
                 Float128(8.0 * (double)(terms.size() + 4)) *
                 ldexp(Float128(1), -113);
  Float128 diff = s - thr;
  if (diff > err) return 1;
  if (diff < -err) return -1;
  return sum_fractions(terms).compare(threshold);
}

// Certified sign of (sum(lhs) - factor * sum(rhs)).
inline int compare_sums(const std::vector<RawFraction>& lhs,
                        const Rational& factor,
                        const std::vector<RawFraction>& rhs) {
  std::vector<RawFraction> combined = lhs;
  combined.reserve(lhs.size() + rhs.size());
  for (const auto& t : rhs)
    combined.emplace_back(-t.num * numerator(factor),
                          t.den * denominator(factor));
  return compare_sum(combined, Rational(0));
}

// floor(x^(1/e)) for real exponent e >= 1, evaluated with ~168-bit mantissa.
inline std::uint64_t floor_root(double x, double e) {
  BigFloat v = exp(log(BigFloat(x)) / BigFloat(e));
  BigFloat f = floor(v);
  return f.convert_to<std::uint64_t>();
}

}  // namespace sievelab

#endif  // SIEVELAB_NUMERIC_HPP
