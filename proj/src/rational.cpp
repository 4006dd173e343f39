#include "kmslab/rational.hpp"

#include <cmath>
#include <limits>

namespace kmslab {

std::size_t bit_size(const Rational& x) {
  const mpz_class& num = x.get_num();
  const mpz_class& den = x.get_den();
  std::size_t bits = sgn(num) == 0 ? 0 : mpz_sizeinbase(num.get_mpz_t(), 2);
  bits += mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
  return bits;
}

std::size_t bit_size(const GaussianRational& x) { return bit_size(x.re) + bit_size(x.im); }

std::string to_string(const Rational& x) { return x.get_str(); }

Rational parse_rational(std::string_view s) {
  std::string str(s);
  while (!str.empty() && str.front() == ' ') str.erase(str.begin());
  while (!str.empty() && str.back() == ' ') str.pop_back();
  if (str.empty()) throw Error("empty rational literal");
  if (str.front() == '+') str.erase(str.begin());
  const auto dot = str.find('.');
  if (dot != std::string::npos) {
    if (str.find('/') != std::string::npos) throw Error("malformed rational literal: " + std::string(s));
    std::string digits = str.substr(0, dot) + str.substr(dot + 1);
    const std::size_t decimals = str.size() - dot - 1;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, decimals);
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw Error("malformed rational literal: " + std::string(s));
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  Rational r;
  if (r.set_str(str, 10) != 0) throw Error("malformed rational literal: " + std::string(s));
  if (sgn(r.get_den()) == 0) throw Error("zero denominator in rational literal: " + std::string(s));
  r.canonicalize();
  return r;
}

std::string to_string(const GaussianRational& x) {
  if (x.is_real()) return to_string(x.re);
  std::string im_part;
  if (x.im == 1) {
    im_part = "i";
  } else if (x.im == -1) {
    im_part = "-i";
  } else {
    im_part = to_string(x.im) + "i";
  }
  if (sgn(x.re) == 0) return im_part;
  if (im_part.front() == '-') return to_string(x.re) + im_part;
  return to_string(x.re) + "+" + im_part;
}

GaussianRational parse_gaussian(std::string_view s) {
  std::string str;
  for (char c : s)
    if (c != ' ') str.push_back(c);
  if (str.empty()) throw Error("empty Gaussian rational literal");
  if (str.back() != 'i') return GaussianRational(parse_rational(str));
  str.pop_back();
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = str.size(); k-- > 1;) {
    if (str[k] == '+' || str[k] == '-') {
      split = k;
      break;
    }
  }
  auto parse_coeff = [&](std::string t) -> Rational {
    if (t.empty() || t == "+") return Rational(1);
    if (t == "-") return Rational(-1);
    return parse_rational(t);
  };
  if (split == std::string::npos) return {Rational(0), parse_coeff(str)};
  return {parse_rational(str.substr(0, split)), parse_coeff(str.substr(split))};
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value has no rational representation");
  return Rational(x);
}

Rational approximate_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw Error("non-finite value has no rational approximation");
  const bool neg = x < 0;
  double v = std::fabs(x);
  // Convergents h/k.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(v));
  mpz_class k_prev = 0, k = 1;
  double frac = v - std::floor(v);
  Rational best(h, k);
  const double target = v;
  while (frac > 1e-15) {
    const double inv = 1.0 / frac;
    const double a_d = std::floor(inv);
    if (a_d > static_cast<double>(std::numeric_limits<long>::max())) break;
    const long a = static_cast<long>(a_d);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (cmp(k_next, max_den) > 0) {
      // Best semiconvergent within the cap.
      mpz_class t = (mpz_class(max_den) - k_prev) / k;
      if (t > 0) {
        Rational semi(t * h + h_prev, t * k + k_prev);
        semi.canonicalize();
        if (std::fabs(semi.get_d() - target) < std::fabs(best.get_d() - target)) best = semi;
      }
      break;
    }
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    best = Rational(h, k);
    best.canonicalize();
    frac = inv - a_d;
  }
  return neg ? Rational(-best) : best;
}

Rational sqrt_upper(const Rational& x) {
  if (sgn(x) < 0) throw Error("sqrt of negative rational");
  if (sgn(x) == 0) return 0;
  Rational r = exact_rational(std::sqrt(x.get_d()) * (1.0 + 1e-12) + 1e-300);
  while (r * r < x) r *= Rational(1000001, 1000000);
  return r;
}

Rational sqrt_lower(const Rational& x) {
  if (sgn(x) < 0) throw Error("sqrt of negative rational");
  if (sgn(x) == 0) return 0;
  Rational r = exact_rational(std::sqrt(x.get_d()) * (1.0 - 1e-12));
  while (r * r > x) r *= Rational(999999, 1000000);
  return r;
}

}  // namespace kmslab
