#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hypwalk/errors.hpp"

namespace hypwalk {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "3", "-1/4" or "0.25"-free strings of the form num[/den].
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Rational r(s);
      r.canonicalize();
      return r;
    }
    Rational r(s.substr(0, slash) + "/" + s.substr(slash + 1));
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw Error(Errc::config_invalid, "bad rational literal: " + s);
  }
}

inline Rational pow_rational(long base, long exp) {
  if (base <= 0) throw std::domain_error("pow_rational needs a positive base");
  Rational r(1);
  if (exp >= 0) {
    mpz_ui_pow_ui(r.get_num_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(exp));
  } else {
    mpz_ui_pow_ui(r.get_den_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(-exp));
  }
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

// Element of the real quadratic ring Q(sqrt(rad)): value = rat + irr*sqrt(rad).
// rad is the fixed radicand 2k-1; values with irr == 0 may carry rad == 0 and
// combine freely with any radicand.
struct QuadExt {
  Rational rat;
  Rational irr;
  int rad = 0;

  QuadExt() = default;
  explicit QuadExt(Rational r) : rat(std::move(r)) {}
  QuadExt(Rational r, Rational i, int radicand) : rat(std::move(r)), irr(std::move(i)), rad(radicand) {
    if (irr == 0) rad = 0;
  }

  static QuadExt zero() { return QuadExt(); }
  static QuadExt one() { return QuadExt(Rational(1)); }

  bool pure_rational() const { return irr == 0; }
  double value() const;
};

namespace detail {
inline int join_rad(const QuadExt& a, const QuadExt& b) {
  if (a.rad == 0) return b.rad;
  if (b.rad == 0 || a.rad == b.rad) return a.rad;
  throw std::logic_error("QuadExt radicand mismatch");
}
}  // namespace detail

inline double QuadExt::value() const {
  double v = to_double(rat);
  if (irr != 0) v += to_double(irr) * std::sqrt(static_cast<double>(rad));
  return v;
}

inline QuadExt operator+(const QuadExt& a, const QuadExt& b) {
  return QuadExt(a.rat + b.rat, a.irr + b.irr, detail::join_rad(a, b));
}
inline QuadExt operator-(const QuadExt& a, const QuadExt& b) {
  return QuadExt(a.rat - b.rat, a.irr - b.irr, detail::join_rad(a, b));
}
inline QuadExt operator-(const QuadExt& a) { return QuadExt(-a.rat, -a.irr, a.rad); }
inline QuadExt operator*(const QuadExt& a, const QuadExt& b) {
  int rad = detail::join_rad(a, b);
  Rational r = a.rat * b.rat;
  if (a.irr != 0 && b.irr != 0) r += a.irr * b.irr * rad;
  return QuadExt(r, a.rat * b.irr + a.irr * b.rat, rad);
}
inline QuadExt operator*(const QuadExt& a, const Rational& c) {
  return QuadExt(a.rat * c, a.irr * c, a.rad);
}
inline QuadExt operator*(const Rational& c, const QuadExt& a) { return a * c; }
inline QuadExt& operator+=(QuadExt& a, const QuadExt& b) { return a = a + b; }
inline QuadExt& operator-=(QuadExt& a, const QuadExt& b) { return a = a - b; }
inline QuadExt& operator*=(QuadExt& a, const QuadExt& b) { return a = a * b; }

inline QuadExt inverse(const QuadExt& a) {
  // 1/(r + i s) = (r - i s) / (r^2 - i^2 rad), s = sqrt(rad)
  Rational norm = a.rat * a.rat - a.irr * a.irr * a.rad;
  if (norm == 0) throw std::domain_error("QuadExt division by zero");
  return QuadExt(a.rat / norm, -a.irr / norm, a.rad);
}
inline QuadExt operator/(const QuadExt& a, const QuadExt& b) { return a * inverse(b); }

inline bool operator==(const QuadExt& a, const QuadExt& b) {
  return a.rat == b.rat && a.irr == b.irr;  // rad irrelevant when irr parts match
}
inline bool operator!=(const QuadExt& a, const QuadExt& b) { return !(a == b); }

// Exact sign of rat + irr*sqrt(rad).
inline int sign(const QuadExt& a) {
  int sr = sgn(a.rat), si = sgn(a.irr);
  if (si == 0) return sr;
  if (sr == 0) return si;
  if (sr == si) return sr;
  // opposite signs: compare rat^2 vs irr^2 * rad
  Rational lhs = a.rat * a.rat, rhs = a.irr * a.irr * a.rad;
  int c = cmp(lhs, rhs);
  return c == 0 ? 0 : (c > 0 ? sr : si);
}
inline bool operator<(const QuadExt& a, const QuadExt& b) { return sign(a - b) < 0; }
inline bool operator>(const QuadExt& a, const QuadExt& b) { return sign(a - b) > 0; }
inline QuadExt abs(const QuadExt& a) { return sign(a) < 0 ? -a : a; }

// rad^(e/2) exactly: integer powers stay rational, half powers pick up sqrt(rad).
inline QuadExt half_power(int rad, long exp2) {
  if (exp2 % 2 == 0) return QuadExt(pow_rational(rad, exp2 / 2));
  long p = (exp2 - 1) / 2;  // floor for negative odd too: (-3-1)/2 = -2, 3^-2*sqrt(3) = 3^{-3/2} ok
  return QuadExt(Rational(0), pow_rational(rad, p), rad);
}

}  // namespace hypwalk
