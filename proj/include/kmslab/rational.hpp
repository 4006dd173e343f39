#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kmslab {

using Rational = mpq_class;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element of Q(i). Arithmetic is exact; values are kept canonical by GMP.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(const Rational& r) : re(r), im(0) {}  // NOLINT(implicit)
  GaussianRational(long r) : re(r), im(0) {}              // NOLINT(implicit)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i_unit() { return {Rational(0), Rational(1)}; }

  GaussianRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    const Rational d = o.norm2();
    if (sgn(d) == 0) throw Error("division by zero in Q(i)");
    Rational r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  GaussianRational operator-() const { return {-re, -im}; }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const GaussianRational& x) { return x.is_zero(); }

inline double to_double(const Rational& x) { return x.get_d(); }
inline std::complex<double> to_complex(const GaussianRational& x) { return {x.re.get_d(), x.im.get_d()}; }

/// Bit size of numerator plus denominator, used for witness tie-breaking.
std::size_t bit_size(const Rational& x);
std::size_t bit_size(const GaussianRational& x);

/// "p/q" (or "p" when q = 1).
std::string to_string(const Rational& x);
/// Parses "p/q", "p", or a decimal such as "1.5" (exactly).
Rational parse_rational(std::string_view s);

/// "a", "bi", "a+bi", "a-bi" with a, b in p/q form.
std::string to_string(const GaussianRational& x);
GaussianRational parse_gaussian(std::string_view s);

/// Exact value of a finite double.
Rational exact_rational(double x);

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
Rational approximate_rational(double x, std::int64_t max_den);

/// Rational r with r >= sqrt(x) and r - sqrt(x) small; x >= 0.
Rational sqrt_upper(const Rational& x);
/// Rational r with 0 <= r <= sqrt(x).
Rational sqrt_lower(const Rational& x);

}  // namespace kmslab
