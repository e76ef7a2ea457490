#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace rnf {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Parses "n", "-n", "n/d" or a finite decimal such as "-1.25e-3" exactly.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);
/// Best rational approximation with denominator at most max_den.
Rational rational_approximation(double x, long max_den);

/// Exact complex number with rational real and imaginary parts.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(long v) : re(v), im(0) {}  // NOLINT
  GaussianRational(Rational r) : re(std::move(r)), im(0) { re.canonicalize(); }  // NOLINT
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  GaussianRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  Complex to_complex() const { return {re.get_d(), im.get_d()}; }

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussianRational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static bool is_zero(const GaussianRational& v, double) { return v.is_zero(); }
  static double abs(const GaussianRational& v) { return std::abs(v.to_complex()); }
  static Complex to_complex(const GaussianRational& v) { return v.to_complex(); }
  /// Chooses the exact or the floating representation of a known value.
  static GaussianRational from_pair(const GaussianRational& exact, Complex) { return exact; }
  static GaussianRational from_rational(const Rational& r) { return GaussianRational(r); }
  static std::string format(const GaussianRational& v);
  static GaussianRational parse(std::string_view re, std::string_view im);
  static bool approx_equal(const GaussianRational& a, const GaussianRational& b, double) {
    return a == b;
  }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static bool is_zero(const Complex& v, double tol) { return std::abs(v) <= tol; }
  static double abs(const Complex& v) { return std::abs(v); }
  static Complex to_complex(const Complex& v) { return v; }
  static Complex from_pair(const GaussianRational&, Complex numeric) { return numeric; }
  static Complex from_rational(const Rational& r) { return {r.get_d(), 0.0}; }
  static std::string format(const Complex& v);
  static Complex parse(std::string_view re, std::string_view im);
  static bool approx_equal(const Complex& a, const Complex& b, double tol) {
    return std::abs(a - b) <= tol;
  }
};

}  // namespace rnf
