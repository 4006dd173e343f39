#include "kmslab/polymatrix.hpp"

namespace kmslab {

namespace {

template <class S>
S monomial_value(const Exponent& alpha, const std::vector<S>& xi) {
  S v(1);
  for (std::size_t j = 0; j < alpha.size(); ++j)
    for (int p = 0; p < alpha[j]; ++p) v = v * xi[j];
  return v;
}

template <class T>
Matrix<T> exact_at(const PolyMatrix& m, const std::vector<T>& xi) {
  if (xi.size() != m.n) throw Error("frequency has wrong dimension");
  Matrix<T> out(m.rows, m.cols);
  for (const auto& [alpha, c] : m.coeffs) {
    const T mono = monomial_value(alpha, xi);
    if (is_zero(mono)) continue;
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t k = 0; k < m.cols; ++k)
        if (sgn(c(r, k)) != 0) out(r, k) += mono * T(c(r, k));
  }
  return out;
}

template <class M, class S>
M float_at(const PolyMatrix& m, const std::vector<S>& xi) {
  if (xi.size() != m.n) throw Error("frequency has wrong dimension");
  M out = M::Zero(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
  for (const auto& [alpha, c] : m.coeffs) {
    const S mono = monomial_value(alpha, xi);
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t k = 0; k < m.cols; ++k)
        if (sgn(c(r, k)) != 0) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) += mono * c(r, k).get_d();
  }
  return out;
}

}  // namespace

QMatrix PolyMatrix::at(const QVector& xi) const { return exact_at(*this, xi); }
GMatrix PolyMatrix::at(const GVector& xi) const { return exact_at(*this, xi); }
Eigen::MatrixXd PolyMatrix::at(const std::vector<double>& xi) const { return float_at<Eigen::MatrixXd>(*this, xi); }
Eigen::MatrixXcd PolyMatrix::at(const std::vector<std::complex<double>>& xi) const {
  return float_at<Eigen::MatrixXcd>(*this, xi);
}

Polynomial PolyMatrix::entry(std::size_t r, std::size_t c) const {
  Polynomial p(n);
  for (const auto& [alpha, m] : coeffs) p.add_term(alpha, m(r, c));
  return p;
}

PolyMatrix restricted_symbol(const PartMap& a, const HomOperator& b) {
  if (a.domain().dim() != b.domain.dim())
    throw Error("operator " + b.label + " does not act on the domain of " + a.name());
  PolyMatrix m;
  m.n = b.n;
  m.order = b.order;
  m.rows = b.codomain.dim();
  m.cols = a.kernel_dim();
  const QMatrix t = a.parametrization();
  for (const auto& [alpha, c] : b.coeffs) {
    QMatrix ct = c * t;
    if (!ct.is_zero()) m.coeffs.emplace(alpha, std::move(ct));
  }
  return m;
}

std::vector<QVector> homogeneous_kernel_slice(const PolyMatrix& m, int d) {
  const auto in_monos = monomials_of_degree(m.n, d);
  const std::size_t nd = in_monos.size();
  const std::size_t unknowns = m.cols * nd;
  if (d < m.order || m.coeffs.empty()) {
    std::vector<QVector> all;
    for (std::size_t u = 0; u < unknowns; ++u) {
      QVector v(unknowns, 0);
      v[u] = 1;
      all.push_back(std::move(v));
    }
    return all;
  }
  const auto out_monos = monomials_of_degree(m.n, d - m.order);
  std::map<Exponent, std::size_t> out_index;
  for (std::size_t i = 0; i < out_monos.size(); ++i) out_index[out_monos[i]] = i;
  const std::size_t ne = out_monos.size();
  QMatrix sys(m.rows * ne, unknowns);
  for (const auto& [alpha, c] : m.coeffs) {
    for (std::size_t mi = 0; mi < nd; ++mi) {
      const Exponent& mono = in_monos[mi];
      Exponent rest = mono;
      long factor = 1;
      bool vanishes = false;
      for (std::size_t j = 0; j < m.n; ++j) {
        if (mono[j] < alpha[j]) {
          vanishes = true;
          break;
        }
        for (int k = 0; k < alpha[j]; ++k) factor *= mono[j] - k;
        rest[j] -= alpha[j];
      }
      if (vanishes) continue;
      const std::size_t eq = out_index.at(rest);
      for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t k = 0; k < m.cols; ++k)
          if (sgn(c(r, k)) != 0) sys(r * ne + eq, k * nd + mi) += c(r, k) * factor;
    }
  }
  return nullspace(std::move(sys));
}

PolyField slice_vector_to_field(const PolyMatrix& m, int d, const QVector& coeffs) {
  const auto monos = monomials_of_degree(m.n, d);
  if (coeffs.size() != m.cols * monos.size()) throw Error("slice vector has wrong length");
  PolyField f(m.n, m.cols, 1);
  for (std::size_t k = 0; k < m.cols; ++k)
    for (std::size_t mi = 0; mi < monos.size(); ++mi) f.comps[k].add_term(monos[mi], coeffs[k * monos.size() + mi]);
  return f;
}

}  // namespace kmslab
