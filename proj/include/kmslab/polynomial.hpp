#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kmslab/rational.hpp"

namespace kmslab {

/// Exponent vector of a monomial x^e in n variables.
using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

/// Graded lexicographic order: lower total degree first, then lexicographically
/// larger exponents first (x1 > x2 > ... within a degree).
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/// All exponents of total degree d in n variables, in graded-lex order.
std::vector<Exponent> monomials_of_degree(std::size_t n, int d);

/// Number of monomials of total degree d in n variables.
std::size_t monomial_count(std::size_t n, int d);

/// Multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t j);
  static Polynomial monomial(const Exponent& e, const Rational& c);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous(int d) const;

  Rational coefficient(const Exponent& e) const;
  void add_term(const Exponent& e, const Rational& c);

  Polynomial derivative(std::size_t j) const;
  Polynomial derivative(const Exponent& alpha) const;

  template <class S>
  S evaluate(const std::vector<S>& x) const {
    S acc(0);
    for (const auto& [e, c] : terms_) {
      S term = convert<S>(c);
      for (std::size_t j = 0; j < e.size(); ++j)
        for (int p = 0; p < e[j]; ++p) term = term * x[j];
      acc = acc + term;
    }
    return acc;
  }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string to_string() const;

 private:
  template <class S>
  static S convert(const Rational& c) {
    if constexpr (std::is_same_v<S, double>) {
      return c.get_d();
    } else if constexpr (std::is_same_v<S, std::complex<double>>) {
      return {c.get_d(), 0.0};
    } else {
      return S(c);
    }
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

/// Matrix-valued polynomial field x -> P(x) in R^{rows x cols}, row-major.
struct PolyField {
  std::size_t nvars = 0;
  std::size_t rows = 0;
  std::size_t cols = 1;
  std::vector<Polynomial> comps;

  PolyField() = default;
  PolyField(std::size_t n, std::size_t r, std::size_t c)
      : nvars(n), rows(r), cols(c), comps(r * c, Polynomial(n)) {}

  std::size_t dim() const { return rows * cols; }
  Polynomial& at(std::size_t i, std::size_t j) { return comps[i * cols + j]; }
  const Polynomial& at(std::size_t i, std::size_t j) const { return comps[i * cols + j]; }
  bool is_zero() const;
  int degree() const;

  std::vector<Rational> evaluate(const std::vector<Rational>& x) const;
  std::vector<double> evaluate(const std::vector<double>& x) const;
  /// Partial derivative of every component.
  PolyField derivative(const Exponent& alpha) const;
  /// Transposed matrix field.
  PolyField transpose() const;

  friend bool operator==(const PolyField& a, const PolyField& b) {
    return a.rows == b.rows && a.cols == b.cols && a.comps == b.comps;
  }
};

/// Random polynomial with small integer-over-small-denominator coefficients,
/// every monomial of degree <= max_degree present with probability `density`.
Polynomial random_polynomial(std::size_t nvars, int max_degree, std::mt19937_64& rng, double density = 0.6);
PolyField random_field(std::size_t nvars, std::size_t rows, std::size_t cols, int max_degree,
                       std::mt19937_64& rng, double density = 0.6);

}  // namespace kmslab
