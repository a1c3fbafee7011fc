#pragma once
#include <gmpxx.h>
#include <complex>
#include <stdexcept>
#include <string>

namespace hilb {

using Rat = mpq_class;

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_from_string(const std::string& s) {
  Rat r(s);
  r.canonicalize();
  return r;
}

inline std::complex<double> rat_to_complex(const Rat& r) {
  return {r.get_d(), 0.0};
}

/// Gaussian rational re + i*im, the coefficient field Q(i).
/// Square-root branches of negative monomials are resolved into the
/// imaginary unit before they reach coefficients, so Q(i) is enough.
struct GaussRational {
  Rat re{0}, im{0};

  GaussRational() = default;
  GaussRational(long v) : re(v) {}
  GaussRational(Rat r) : re(std::move(r)) {}
  GaussRational(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GaussRational unit_i() { return {Rat(0), Rat(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  bool is_one() const { return re == 1 && im == 0; }

  GaussRational operator-() const { return {-re, -im}; }
  GaussRational& operator+=(const GaussRational& o) { re += o.re; im += o.im; return *this; }
  GaussRational& operator-=(const GaussRational& o) { re -= o.re; im -= o.im; return *this; }
  GaussRational& operator*=(const GaussRational& o) {
    Rat r = re * o.re - im * o.im;
    Rat i = re * o.im + im * o.re;
    re = std::move(r); im = std::move(i);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    if (o.is_zero()) throw std::domain_error("GaussRational: division by zero");
    Rat n = o.re * o.re + o.im * o.im;
    Rat r = (re * o.re + im * o.im) / n;
    Rat i = (im * o.re - re * o.im) / n;
    re = std::move(r); im = std::move(i);
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  GaussRational inv() const {
    GaussRational one(1);
    return one /= *this, one;
  }

  /// i^k for integer k (used by the (-x)^e := i^{2e} x^e branch rule).
  GaussRational mul_i_pow(long k) const {
    long m = ((k % 4) + 4) % 4;
    switch (m) {
      case 0: return *this;
      case 1: return {-im, re};
      case 2: return {-re, -im};
      default: return {im, -re};
    }
  }

  GaussRational pow_int(long k) const {
    if (k == 0) return GaussRational(1);
    GaussRational base = *this;
    if (k < 0) { base = GaussRational(1) / base; k = -k; }
    GaussRational acc(1);
    while (k) {
      if (k & 1) acc *= base;
      base *= base;
      k >>= 1;
    }
    return acc;
  }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  std::string str() const {
    if (im == 0) return rat_to_string(re);
    std::string s = rat_to_string(re);
    s += (im > 0 ? "+" : "-");
    Rat ai = abs(im);
    if (ai != 1) s += rat_to_string(ai) + "*";
    s += "i";
    return s;
  }
};

/// Reduced rational with small integer parts; slopes, walls, exponents.
struct Rational64 {
  long num = 0;
  long den = 1;

  Rational64() = default;
  Rational64(long n) : num(n), den(1) {}
  Rational64(long n, long d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw std::domain_error("Rational64: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long a = num < 0 ? -num : num, b = den;
    while (b) { long t = a % b; a = b; b = t; }
    if (a > 1) { num /= a; den /= a; }
    if (num == 0) den = 1;
  }

  friend Rational64 operator+(Rational64 a, Rational64 b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational64 operator-(Rational64 a, Rational64 b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational64 operator*(Rational64 a, Rational64 b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational64 operator/(Rational64 a, Rational64 b) {
    if (b.num == 0) throw std::domain_error("Rational64: division by zero");
    return {a.num * b.den, a.den * b.num};
  }
  Rational64 operator-() const { Rational64 r; r.num = -num; r.den = den; return r; }
  friend bool operator==(Rational64 a, Rational64 b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(Rational64 a, Rational64 b) { return !(a == b); }
  friend bool operator<(Rational64 a, Rational64 b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Rational64 a, Rational64 b) { return a.num * b.den <= b.num * a.den; }
  friend bool operator>(Rational64 a, Rational64 b) { return b < a; }
  friend bool operator>=(Rational64 a, Rational64 b) { return b <= a; }

  bool is_integer() const { return den == 1; }
  long floor() const { return num >= 0 ? num / den : -((-num + den - 1) / den); }
  long ceil() const { return -((-*this).floor()); }
  double to_double() const { return double(num) / double(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  static Rational64 parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational64(std::stol(s));
    return Rational64(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
  }
};

} // namespace hilb
