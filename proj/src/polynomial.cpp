#include "kmslab/polynomial.hpp"

#include <numeric>
#include <sstream>

namespace kmslab {

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a > b;
}

namespace {

void enumerate(std::size_t n, std::size_t pos, int remaining, Exponent& cur, std::vector<Exponent>& out) {
  if (pos + 1 == n) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    enumerate(n, pos + 1, remaining - k, cur, out);
  }
}

}  // namespace

std::vector<Exponent> monomials_of_degree(std::size_t n, int d) {
  std::vector<Exponent> out;
  if (d < 0 || n == 0) return out;
  Exponent cur(n, 0);
  enumerate(n, 0, d, cur, out);
  return out;
}

std::size_t monomial_count(std::size_t n, int d) {
  if (d < 0) return 0;
  // C(d + n - 1, n - 1)
  std::size_t r = 1;
  for (std::size_t k = 1; k < n; ++k) r = r * (static_cast<std::size_t>(d) + k) / k;
  return r;
}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t j) {
  Exponent e(nvars, 0);
  e[j] = 1;
  return monomial(e, 1);
}

Polynomial Polynomial::monomial(const Exponent& e, const Rational& c) {
  Polynomial p(e.size());
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

bool Polynomial::is_homogeneous(int d) const {
  for (const auto& [e, c] : terms_)
    if (total_degree(e) != d) return false;
  return true;
}

Rational Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  if (e.size() != nvars_) throw Error("monomial arity mismatch");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(std::size_t j) const {
  Polynomial d(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[j] == 0) continue;
    Exponent f = e;
    f[j] -= 1;
    d.add_term(f, c * e[j]);
  }
  return d;
}

Polynomial Polynomial::derivative(const Exponent& alpha) const {
  Polynomial d(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    Rational factor = c;
    bool vanishes = false;
    for (std::size_t j = 0; j < nvars_ && !vanishes; ++j) {
      if (e[j] < alpha[j]) {
        vanishes = true;
        break;
      }
      for (int k = 0; k < alpha[j]; ++k) factor *= (e[j] - k);
      f[j] -= alpha[j];
    }
    if (!vanishes) d.add_term(f, factor);
  }
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r(std::max(a.nvars_, b.nvars_));
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e = ea;
      for (std::size_t j = 0; j < e.size(); ++j) e[j] += eb[j];
      r.add_term(e, ca * cb);
    }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    first = false;
    const Rational a = abs(c);
    const bool is_const = total_degree(e) == 0;
    if (a != 1 || is_const) os << a.get_str();
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      os << "x" << (j + 1);
      if (e[j] > 1) os << "^" << e[j];
    }
  }
  return os.str();
}

bool PolyField::is_zero() const {
  for (const auto& p : comps)
    if (!p.is_zero()) return false;
  return true;
}

int PolyField::degree() const {
  int d = -1;
  for (const auto& p : comps) d = std::max(d, p.degree());
  return d;
}

std::vector<Rational> PolyField::evaluate(const std::vector<Rational>& x) const {
  std::vector<Rational> out;
  out.reserve(comps.size());
  for (const auto& p : comps) out.push_back(p.evaluate(x));
  return out;
}

std::vector<double> PolyField::evaluate(const std::vector<double>& x) const {
  std::vector<double> out;
  out.reserve(comps.size());
  for (const auto& p : comps) out.push_back(p.evaluate(x));
  return out;
}

PolyField PolyField::derivative(const Exponent& alpha) const {
  PolyField d(nvars, rows, cols);
  for (std::size_t k = 0; k < comps.size(); ++k) d.comps[k] = comps[k].derivative(alpha);
  return d;
}

PolyField PolyField::transpose() const {
  PolyField t(nvars, cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

Polynomial random_polynomial(std::size_t nvars, int max_degree, std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 5);
  Polynomial p(nvars);
  for (int d = 0; d <= max_degree; ++d)
    for (const auto& e : monomials_of_degree(nvars, d))
      if (coin(rng) < density) {
        Rational c(num(rng), den(rng));
        c.canonicalize();
        p.add_term(e, c);
      }
  return p;
}

PolyField random_field(std::size_t nvars, std::size_t rows, std::size_t cols, int max_degree,
                       std::mt19937_64& rng, double density) {
  PolyField f(nvars, rows, cols);
  for (auto& c : f.comps) c = random_polynomial(nvars, max_degree, rng, density);
  return f;
}

}  // namespace kmslab
