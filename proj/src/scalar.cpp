#include "rnf/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rnf {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Rational q(s);
      if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator");
      q.canonicalize();
      return q;
    }
    bool decimal = s.find_first_of(".eE") != std::string::npos;
    if (!decimal) return Rational(mpz_class(s));
    // Exact decimal: mantissa digits scaled by a power of ten.
    std::size_t epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) exp10 = std::stol(s.substr(epos + 1));
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant.erase(0, 1);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
      exp10 -= static_cast<long>(mant.size() - dot - 1);
      mant.erase(dot, 1);
    }
    if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad number: " + s);
    mpz_class m(mant);
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    Rational q = exp10 >= 0 ? Rational(m * p) : Rational(m, p);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad number: " + s);
  }
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Rational rational_approximation(double x, long max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  if (max_den < 1) throw std::invalid_argument("max denominator must be positive");
  // Continued fraction convergents, then the best semiconvergent.
  long double v = x;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    long double a = std::floor(v);
    long long ai = static_cast<long long>(a);
    long long q2 = q0 + ai * q1;
    if (q2 > max_den) {
      long long k = (max_den - q0) / q1;
      long long pk = p0 + k * p1, qk = q0 + k * q1;
      Rational c1(static_cast<long>(p1), static_cast<long>(q1)), ck(static_cast<long>(pk), static_cast<long>(qk));
      c1.canonicalize();
      ck.canonicalize();
      Rational xr(x);
      return abs(ck - xr) < abs(c1 - xr) ? ck : c1;
    }
    long long p2 = p0 + ai * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    long double frac = v - a;
    if (frac < 1e-18L) break;
    v = 1.0L / frac;
  }
  Rational r(static_cast<long>(p1), static_cast<long>(q1));
  r.canonicalize();
  return r;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (sgn(im) == 0 && sgn(o.im) == 0) {
    re *= o.re;
    return *this;
  }
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  if (sgn(o.im) == 0) {
    re /= o.re;
    im /= o.re;
    return *this;
  }
  Rational d = o.norm2();
  Rational r = (re * o.re + im * o.im) / d;
  Rational i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string ScalarTraits<GaussianRational>::format(const GaussianRational& v) {
  return format_rational(v.re) + " " + format_rational(v.im);
}

GaussianRational ScalarTraits<GaussianRational>::parse(std::string_view re, std::string_view im) {
  return {parse_rational(re), parse_rational(im)};
}

std::string ScalarTraits<Complex>::format(const Complex& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
  return buf;
}

Complex ScalarTraits<Complex>::parse(std::string_view re, std::string_view im) {
  auto one = [](std::string_view t) {
    std::string s(t);
    if (s.find('/') != std::string::npos) return parse_rational(s).get_d();
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
  };
  try {
    return {one(re), one(im)};
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("number out of range");
  }
}

}  // namespace rnf
