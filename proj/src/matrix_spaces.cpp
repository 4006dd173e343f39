#include "kmslab/matrix_spaces.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace kmslab {

const std::vector<PartKind>& catalog_parts() {
  static const std::vector<PartKind> parts = {PartKind::Id,     PartKind::dev,  PartKind::sym, PartKind::devsym,
                                              PartKind::skewtr, PartKind::skew, PartKind::tr};
  return parts;
}

std::string part_name(PartKind k) {
  switch (k) {
    case PartKind::Id: return "Id";
    case PartKind::dev: return "dev";
    case PartKind::sym: return "sym";
    case PartKind::devsym: return "devsym";
    case PartKind::skewtr: return "skewtr";
    case PartKind::skew: return "skew";
    case PartKind::tr: return "tr";
    case PartKind::zero: return "zero";
    case PartKind::custom: return "custom";
  }
  return "custom";
}

PartKind parse_part_kind(const std::string& name) {
  for (PartKind k : {PartKind::Id, PartKind::dev, PartKind::sym, PartKind::devsym, PartKind::skewtr, PartKind::skew,
                     PartKind::tr, PartKind::zero})
    if (part_name(k) == name) return k;
  if (name == "id") return PartKind::Id;
  if (name == "dev_sym" || name == "dev-sym") return PartKind::devsym;
  if (name == "skew+tr" || name == "skew_tr") return PartKind::skewtr;
  throw Error("unknown part map: " + name);
}

double InjectivityConstant::approx() const {
  if (infinite) return std::numeric_limits<double>::infinity();
  return std::sqrt(0.5 * (lambda_sq_lo.get_d() + lambda_sq_hi.get_d()));
}

QVector unit_matrix(std::size_t n, std::size_t i, std::size_t j) {
  QVector v(n * n, 0);
  v[i * n + j] = 1;
  return v;
}

QVector identity_matrix(std::size_t n) {
  QVector v(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1;
  return v;
}

QVector anti(const QVector& v) {
  if (v.size() != 3) throw Error("Anti needs a vector in R^3");
  const Rational &a = v[0], &b = v[1], &c = v[2];
  return {0, -c, b, c, 0, -a, -b, a, 0};
}

QVector anti_inverse(const QVector& m) {
  if (m.size() != 9) throw Error("Anti inverse needs a 3x3 matrix");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (m[i * 3 + j] != -m[j * 3 + i]) throw Error("matrix is not skew-symmetric");
  return {m[7], m[2], m[3]};
}

QMatrix dev_matrix(std::size_t n) {
  QMatrix m = QMatrix::identity(n * n);
  const Rational f(1, static_cast<long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i * n + i, j * n + j) -= f;
  return m;
}

QMatrix sym_matrix(std::size_t n) {
  QMatrix m(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i * n + j, i * n + j) += Rational(1, 2);
      m(i * n + j, j * n + i) += Rational(1, 2);
    }
  return m;
}

QMatrix skew_matrix(std::size_t n) { return QMatrix::identity(n * n) - sym_matrix(n); }

QMatrix trace_matrix(std::size_t n) {
  QMatrix m(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i * n + i, j * n + j) = 1;
  return m;
}

QMatrix transpose_matrix(std::size_t rows, std::size_t cols) {
  QMatrix m(rows * cols, rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(j * rows + i, i * cols + j) = 1;
  return m;
}

std::vector<QVector> orthogonalize(const std::vector<QVector>& vs) {
  std::vector<QVector> out;
  QVector gram;
  for (const auto& v : vs) {
    QVector w = v;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const Rational c = frobenius_dot(w, out[k]) / gram[k];
      if (sgn(c) == 0) continue;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * out[k][i];
    }
    const Rational g = frobenius_dot(w, w);
    if (sgn(g) == 0) continue;
    out.push_back(std::move(w));
    gram.push_back(g);
  }
  return out;
}

namespace {

std::vector<QVector> skew_span(std::size_t n) {
  std::vector<QVector> out;
  if (n == 3) {
    for (int k = 0; k < 3; ++k) {
      QVector e(3, 0);
      e[k] = 1;
      out.push_back(anti(e));
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      QVector v(n * n, 0);
      v[j * n + i] = 1;
      v[i * n + j] = -1;
      out.push_back(v);
    }
  return out;
}

std::vector<QVector> sym_span(std::size_t n) {
  std::vector<QVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(unit_matrix(n, i, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      QVector v(n * n, 0);
      v[i * n + j] = 1;
      v[j * n + i] = 1;
      out.push_back(v);
    }
  return out;
}

std::vector<QVector> tracefree_diagonal_span(std::size_t n) {
  std::vector<QVector> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    QVector v(n * n, 0);
    v[i * n + i] = 1;
    v[(n - 1) * n + (n - 1)] = -1;
    out.push_back(v);
  }
  return out;
}

}  // namespace

void PartMap::finish(std::vector<QVector> kernel_span) {
  kernel_ = orthogonalize(kernel_span);
  gram_.clear();
  for (const auto& k : kernel_) gram_.push_back(frobenius_dot(k, k));
  if (kernel_.size() != domain_.dim() - rank(matrix_)) throw Error("kernel basis of " + name_ + " is incomplete");
  for (const auto& k : kernel_)
    for (const auto& x : matrix_.apply(k))
      if (sgn(x) != 0) throw Error("kernel basis of " + name_ + " is not annihilated");
}

PartMap PartMap::build(PartKind kind, std::size_t n) {
  if (n < 2) throw Error("part maps need n >= 2");
  PartMap p;
  p.kind_ = kind;
  p.name_ = part_name(kind);
  p.domain_ = {n, n};
  p.codomain_ = {n, n};
  std::vector<QVector> span;
  switch (kind) {
    case PartKind::Id:
      p.matrix_ = QMatrix::identity(n * n);
      break;
    case PartKind::dev:
      p.matrix_ = dev_matrix(n);
      span = {identity_matrix(n)};
      break;
    case PartKind::sym:
      p.matrix_ = sym_matrix(n);
      span = skew_span(n);
      break;
    case PartKind::devsym:
      p.matrix_ = dev_matrix(n) * sym_matrix(n);
      span = skew_span(n);
      span.push_back(identity_matrix(n));
      break;
    case PartKind::skewtr:
      p.matrix_ = skew_matrix(n) + trace_matrix(n);
      span = sym_span(n);
      span.erase(span.begin(), span.begin() + static_cast<long>(n));
      for (auto& v : tracefree_diagonal_span(n)) span.push_back(v);
      break;
    case PartKind::skew:
      p.matrix_ = skew_matrix(n);
      span = sym_span(n);
      break;
    case PartKind::tr:
      p.matrix_ = trace_matrix(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) span.push_back(unit_matrix(n, i, j));
      for (auto& v : tracefree_diagonal_span(n)) span.push_back(v);
      break;
    case PartKind::zero:
      p.matrix_ = QMatrix(n * n, n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) span.push_back(unit_matrix(n, i, j));
      break;
    case PartKind::custom:
      throw Error("custom part maps need an explicit matrix");
  }
  p.finish(std::move(span));
  return p;
}

PartMap PartMap::build(const std::string& name, std::size_t n) { return build(parse_part_kind(name), n); }

PartMap PartMap::custom(const std::string& name, Space domain, Space codomain, QMatrix matrix) {
  if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim())
    throw Error("custom part map matrix has shape " + std::to_string(matrix.rows()) + "x" +
                std::to_string(matrix.cols()) + ", expected " + std::to_string(codomain.dim()) + "x" +
                std::to_string(domain.dim()));
  PartMap p;
  p.kind_ = PartKind::custom;
  p.name_ = name;
  p.domain_ = domain;
  p.codomain_ = codomain;
  p.matrix_ = std::move(matrix);
  p.finish(nullspace(p.matrix_));
  return p;
}

QMatrix PartMap::parametrization() const {
  QMatrix t(domain_.dim(), kernel_.size());
  for (std::size_t j = 0; j < kernel_.size(); ++j) t.set_col(j, kernel_[j]);
  return t;
}

QMatrix PartMap::projector_kernel() const {
  const std::size_t d = domain_.dim();
  QMatrix p(d, d);
  for (std::size_t k = 0; k < kernel_.size(); ++k) {
    const Rational inv = 1 / gram_[k];
    for (std::size_t i = 0; i < d; ++i) {
      if (sgn(kernel_[k][i]) == 0) continue;
      const Rational f = kernel_[k][i] * inv;
      for (std::size_t j = 0; j < d; ++j)
        if (sgn(kernel_[k][j]) != 0) p(i, j) += f * kernel_[k][j];
    }
  }
  return p;
}

QMatrix PartMap::projector_complement() const { return QMatrix::identity(domain_.dim()) - projector_kernel(); }

GVector PartMap::kernel_coordinates(const GVector& x) const {
  if (x.size() != domain_.dim()) throw Error("element has wrong dimension for " + name_);
  GVector c(kernel_.size());
  for (std::size_t k = 0; k < kernel_.size(); ++k) {
    GaussianRational s(0);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (sgn(kernel_[k][i]) != 0) s += x[i] * GaussianRational(kernel_[k][i]);
    c[k] = s / GaussianRational(gram_[k]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    GaussianRational s(0);
    for (std::size_t k = 0; k < kernel_.size(); ++k) s += c[k] * GaussianRational(kernel_[k][i]);
    if (s != x[i]) throw Error("element is not in the kernel of " + name_);
  }
  return c;
}

InjectivityConstant PartMap::injectivity_constant() const {
  InjectivityConstant out;
  const std::size_t d = domain_.dim();
  const std::size_t perp = d - kernel_.size();
  if (perp == 0) {
    out.infinite = true;
    return out;
  }
  const QMatrix c = matrix_.transpose() * matrix_;
  const QMatrix proj = projector_complement();
  auto below = [&](const Rational& mu) { return is_positive_semidefinite(c - proj * mu); };

  Eigen::MatrixXd cd(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) cd(i, j) = c(i, j).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cd);
  // The kernel contributes exactly dim ker zero eigenvalues; the next one is lambda^2.
  const double guess = es.eigenvalues()(static_cast<Eigen::Index>(kernel_.size()));

  const Rational snapped = approximate_rational(guess, 1000);
  if (sgn(snapped) > 0 && below(snapped) && rank(c - proj * snapped) < perp) {
    out.exact = true;
    out.lambda_sq_lo = out.lambda_sq_hi = snapped;
    const mpz_class &num = snapped.get_num(), &den = snapped.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t()))
      out.lambda = Rational(sqrt(num), sqrt(den));
    return out;
  }
  Rational lo = 0;
  Rational hi = exact_rational(guess * 1.01 + 1e-6);
  while (below(hi)) hi *= 2;
  for (int it = 0; it < 48; ++it) {
    const Rational mid = (lo + hi) / 2;
    if (below(mid)) lo = mid;
    else hi = mid;
  }
  out.lambda_sq_lo = lo;
  out.lambda_sq_hi = hi;
  return out;
}

nlohmann::json to_json(const QMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

QMatrix qmatrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error("matrix must be a non-empty array of rows");
  const std::size_t r = j.size();
  const std::size_t c = j[0].size();
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (j[i].size() != c) throw Error("ragged matrix rows");
    for (std::size_t k = 0; k < c; ++k) {
      const auto& x = j[i][k];
      m(i, k) = x.is_string() ? parse_rational(x.get<std::string>()) : parse_rational(x.dump());
    }
  }
  return m;
}

nlohmann::json PartMap::to_json() const {
  nlohmann::json j;
  j["name"] = name_;
  j["n"] = n();
  if (kind_ == PartKind::custom) {
    j["domain"] = {domain_.rows, domain_.cols};
    j["codomain"] = {codomain_.rows, codomain_.cols};
    j["matrix"] = kmslab::to_json(matrix_);
  }
  return j;
}

PartMap PartMap::from_json(const nlohmann::json& j) {
  const std::size_t n = j.at("n").get<std::size_t>();
  if (!j.contains("matrix")) return build(j.at("name").get<std::string>(), n);
  Space dom{n, n}, cod{n, n};
  if (j.contains("domain")) dom = {j["domain"][0].get<std::size_t>(), j["domain"][1].get<std::size_t>()};
  if (j.contains("codomain")) cod = {j["codomain"][0].get<std::size_t>(), j["codomain"][1].get<std::size_t>()};
  return custom(j.value("name", std::string("custom")), dom, cod, qmatrix_from_json(j.at("matrix")));
}

}  // namespace kmslab
