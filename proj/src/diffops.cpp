#include "kmslab/diffops.hpp"

namespace kmslab {

std::string operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::grad: return "grad";
    case OperatorKind::div_rowwise: return "div_rowwise";
    case OperatorKind::curl_generalized: return "curl_generalized";
    case OperatorKind::curl_classical3: return "curl_classical3";
    case OperatorKind::inc3: return "inc3";
    case OperatorKind::custom: return "custom";
  }
  return "custom";
}

OperatorKind parse_operator_kind(const std::string& name) {
  if (name == "grad" || name == "D") return OperatorKind::grad;
  if (name == "div" || name == "div_rowwise" || name == "Div") return OperatorKind::div_rowwise;
  if (name == "curl_generalized") return OperatorKind::curl_generalized;
  if (name == "curl" || name == "Curl" || name == "curl_classical3") return OperatorKind::curl_classical3;
  if (name == "inc" || name == "inc3") return OperatorKind::inc3;
  if (name == "custom") return OperatorKind::custom;
  throw Error("unknown operator kind: " + name);
}

namespace {

template <class T>
Matrix<T> symbol_impl(const HomOperator& op, const std::vector<T>& xi) {
  if (xi.size() != op.n) throw Error("frequency has wrong dimension");
  Matrix<T> s(op.codomain.dim(), op.domain.dim());
  for (const auto& [alpha, b] : op.coeffs) {
    T mono(1);
    for (std::size_t j = 0; j < alpha.size(); ++j)
      for (int p = 0; p < alpha[j]; ++p) mono = mono * xi[j];
    if (is_zero(mono)) continue;
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c)
        if (sgn(b(r, c)) != 0) s(r, c) += mono * T(b(r, c));
  }
  return s;
}

Exponent unit_exponent(std::size_t n, std::size_t j) {
  Exponent e(n, 0);
  e[j] = 1;
  return e;
}

void add_coeff(HomOperator& op, const Exponent& alpha, const QMatrix& m) {
  auto it = op.coeffs.find(alpha);
  if (it == op.coeffs.end()) op.coeffs.emplace(alpha, m);
  else it->second += m;
}

void prune(HomOperator& op) {
  for (auto it = op.coeffs.begin(); it != op.coeffs.end();) {
    if (it->second.is_zero()) it = op.coeffs.erase(it);
    else ++it;
  }
}

}  // namespace

QMatrix HomOperator::symbol(const QVector& xi) const { return symbol_impl(*this, xi); }
GMatrix HomOperator::symbol(const GVector& xi) const { return symbol_impl(*this, xi); }

bool HomOperator::is_zero() const {
  for (const auto& [a, m] : coeffs)
    if (!m.is_zero()) return false;
  return true;
}

QVector generalized_cross(const QVector& a, const QVector& b) {
  const std::size_t n = a.size();
  if (n < 2) throw Error("generalized cross product needs n >= 2");
  if (b.size() != n) throw Error("generalized cross product of vectors of different length");
  if (n == 2) return {a[0] * b[1] - a[1] * b[0]};
  QVector abar(a.begin(), a.end() - 1), bbar(b.begin(), b.end() - 1);
  QVector out = generalized_cross(abar, bbar);
  for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(b[n - 1] * abar[i] - a[n - 1] * bbar[i]);
  return out;
}

QMatrix cross_matrix(const QVector& a) {
  const std::size_t n = a.size();
  if (n < 2) throw Error("cross matrix needs n >= 2");
  QMatrix m(n * (n - 1) / 2, n);
  for (std::size_t j = 0; j < n; ++j) {
    QVector e(n, 0);
    e[j] = 1;
    m.set_col(j, generalized_cross(a, e));
  }
  return m;
}

QMatrix cross_convention_permutation() {
  QMatrix s(3, 3);
  s(0, 2) = 1;
  s(1, 1) = -1;
  s(2, 0) = 1;
  return s;
}

HomOperator build_operator(OperatorKind kind, std::size_t n) { return build_operator(kind, n, n); }

HomOperator build_operator(OperatorKind kind, std::size_t n, std::size_t rows) {
  if (n < 2) throw Error("operators need n >= 2");
  HomOperator op;
  op.kind = kind;
  op.n = n;
  op.order = 1;
  switch (kind) {
    case OperatorKind::grad: {
      op.label = "D";
      op.domain = {rows, 1};
      op.codomain = {rows, n};
      for (std::size_t j = 0; j < n; ++j) {
        QMatrix b(rows * n, rows);
        for (std::size_t i = 0; i < rows; ++i) b(i * n + j, i) = 1;
        op.coeffs.emplace(unit_exponent(n, j), b);
      }
      break;
    }
    case OperatorKind::div_rowwise: {
      op.label = "Div";
      op.domain = {rows, n};
      op.codomain = {rows, 1};
      for (std::size_t j = 0; j < n; ++j) {
        QMatrix b(rows, rows * n);
        for (std::size_t i = 0; i < rows; ++i) b(i, i * n + j) = 1;
        op.coeffs.emplace(unit_exponent(n, j), b);
      }
      break;
    }
    case OperatorKind::curl_generalized: {
      const std::size_t m = n * (n - 1) / 2;
      op.label = "Curl";
      op.domain = {rows, n};
      op.codomain = {rows, m};
      for (std::size_t j = 0; j < n; ++j) {
        QVector e(n, 0);
        e[j] = 1;
        const QMatrix c = cross_matrix(e);
        QMatrix b(rows * m, rows * n);
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t a = 0; a < m; ++a)
            for (std::size_t l = 0; l < n; ++l) b(i * m + a, i * n + l) = c(a, l);
        op.coeffs.emplace(unit_exponent(n, j), b);
      }
      break;
    }
    case OperatorKind::curl_classical3: {
      if (n != 3) throw Error("the classical Curl needs n = 3");
      op.label = "Curl";
      op.domain = {rows, 3};
      op.codomain = {rows, 3};
      for (std::size_t j = 0; j < 3; ++j) {
        QVector e(3, 0);
        e[j] = 1;
        const QVector an = anti(e);
        QMatrix b(rows * 3, rows * 3);
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t m = 0; m < 3; ++m)
            for (std::size_t l = 0; l < 3; ++l) b(i * 3 + m, i * 3 + l) = -an[l * 3 + m];
        op.coeffs.emplace(unit_exponent(3, j), b);
      }
      break;
    }
    case OperatorKind::inc3: {
      if (n != 3 || rows != 3) throw Error("inc needs 3x3 matrix fields on R^3");
      op.label = "inc";
      op.order = 2;
      op.domain = {3, 3};
      op.codomain = {3, 3};
      // inc P = -Anti(d) P^T Anti(d) on the symbol level.
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          QVector ej(3, 0), ek(3, 0);
          ej[j] = 1;
          ek[k] = 1;
          const QVector aj = anti(ej), ak = anti(ek);
          QMatrix b(9, 9);
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t bb = 0; bb < 3; ++bb)
              for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t d = 0; d < 3; ++d) b(a * 3 + bb, d * 3 + c) -= aj[a * 3 + c] * ak[d * 3 + bb];
          Exponent alpha(3, 0);
          alpha[j] += 1;
          alpha[k] += 1;
          add_coeff(op, alpha, b);
        }
      prune(op);
      break;
    }
    case OperatorKind::custom:
      throw Error("custom operators are read from JSON");
  }
  return op;
}

HomOperator compose_part(const PartMap& part, const HomOperator& op) {
  if (part.domain().dim() != op.codomain.dim())
    throw Error("part map " + part.name() + " does not act on the codomain of " + op.label);
  HomOperator out = compose_linear(part.matrix(), part.codomain(), op,
                                   part.kind() == PartKind::Id ? op.label : part.name() + " " + op.label);
  return out;
}

HomOperator compose_linear(const QMatrix& map, const Space& codomain, const HomOperator& op, const std::string& label) {
  if (map.cols() != op.codomain.dim() || map.rows() != codomain.dim()) throw Error("linear map shape mismatch");
  HomOperator out;
  out.kind = OperatorKind::custom;
  out.label = label;
  out.n = op.n;
  out.order = op.order;
  out.domain = op.domain;
  out.codomain = codomain;
  for (const auto& [alpha, b] : op.coeffs) out.coeffs.emplace(alpha, map * b);
  prune(out);
  return out;
}

HomOperator compose(const HomOperator& outer, const HomOperator& inner) {
  if (outer.n != inner.n) throw Error("composing operators in different dimensions");
  if (outer.domain.dim() != inner.codomain.dim()) throw Error("composition shape mismatch");
  HomOperator out;
  out.kind = OperatorKind::custom;
  out.label = outer.label + " " + inner.label;
  out.n = inner.n;
  out.order = outer.order + inner.order;
  out.domain = inner.domain;
  out.codomain = outer.codomain;
  for (const auto& [a, b2] : outer.coeffs)
    for (const auto& [b, b1] : inner.coeffs) {
      Exponent g = a;
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += b[j];
      add_coeff(out, g, b2 * b1);
    }
  prune(out);
  return out;
}

HomOperator inc_by_composition() {
  const HomOperator curl = build_operator(OperatorKind::curl_classical3, 3);
  const HomOperator t = compose_linear(transpose_matrix(3, 3), {3, 3}, curl, "Curl^T");
  HomOperator inc = compose(curl, t);
  inc.label = "inc";
  return inc;
}

PolyField apply_symbolic(const HomOperator& op, const PolyField& f) {
  if (f.dim() != op.domain.dim()) throw Error("field does not match operator domain");
  PolyField out(f.nvars, op.codomain.rows, op.codomain.cols);
  for (const auto& [alpha, b] : op.coeffs) {
    std::vector<Polynomial> d;
    d.reserve(f.dim());
    for (const auto& c : f.comps) d.push_back(c.derivative(alpha));
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c)
        if (sgn(b(r, c)) != 0 && !d[c].is_zero()) out.comps[r] += d[c] * b(r, c);
  }
  return out;
}

PolyField apply_pointwise(const QMatrix& map, const PolyField& f, std::size_t rows, std::size_t cols) {
  if (map.cols() != f.dim() || map.rows() != rows * cols) throw Error("pointwise map shape mismatch");
  PolyField out(f.nvars, rows, cols);
  for (std::size_t r = 0; r < map.rows(); ++r)
    for (std::size_t c = 0; c < map.cols(); ++c)
      if (sgn(map(r, c)) != 0) out.comps[r] += f.comps[c] * map(r, c);
  return out;
}

PolyField add(const PolyField& a, const PolyField& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw Error("field shape mismatch");
  PolyField out = a;
  for (std::size_t k = 0; k < out.comps.size(); ++k) out.comps[k] += b.comps[k];
  return out;
}

PolyField subtract(const PolyField& a, const PolyField& b) { return add(a, scale(b, -1)); }

PolyField scale(const PolyField& a, const Rational& s) {
  PolyField out = a;
  for (auto& c : out.comps) c *= s;
  return out;
}

PolyField times_identity(const Polynomial& p, std::size_t n) {
  PolyField out(p.nvars(), n, n);
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = p;
  return out;
}

Polynomial trace(const PolyField& m) {
  if (m.rows != m.cols) throw Error("trace of a non-square field");
  Polynomial t(m.nvars);
  for (std::size_t i = 0; i < m.rows; ++i) t += m.at(i, i);
  return t;
}

PolyField anti_field(const PolyField& a) {
  if (a.dim() != 3) throw Error("Anti needs a field with values in R^3");
  PolyField out(a.nvars, 3, 3);
  const auto &x = a.comps[0], &y = a.comps[1], &z = a.comps[2];
  out.at(0, 1) = z * Rational(-1);
  out.at(0, 2) = y;
  out.at(1, 0) = z;
  out.at(1, 2) = x * Rational(-1);
  out.at(2, 0) = y * Rational(-1);
  out.at(2, 1) = x;
  return out;
}

NyeReport check_nye(const PolyField& a) {
  if (a.nvars != 3 || a.dim() != 3) throw Error("Nye's formulas need a field R^3 -> R^3");
  PolyField vec = a;
  vec.rows = 3;
  vec.cols = 1;
  const HomOperator curl = build_operator(OperatorKind::curl_classical3, 3);
  const HomOperator grad = build_operator(OperatorKind::grad, 3, 3);
  const PolyField curl_anti = apply_symbolic(curl, anti_field(vec));
  const PolyField da = apply_symbolic(grad, vec);
  const Polynomial div = trace(da);

  NyeReport r;
  r.curl_anti_residual = subtract(curl_anti, subtract(times_identity(div, 3), da.transpose()));
  r.gradient_residual =
      subtract(da, subtract(times_identity(trace(curl_anti) * Rational(1, 2), 3), curl_anti.transpose()));
  const QMatrix devsym = dev_matrix(3) * sym_matrix(3);
  r.dev_sym_residual = add(apply_pointwise(devsym, curl_anti, 3, 3), apply_pointwise(devsym, da, 3, 3));

  // Generalized convention: Curl P = (classical Curl P) S row by row.
  const HomOperator gcurl = build_operator(OperatorKind::curl_generalized, 3);
  const PolyField gen = apply_symbolic(gcurl, anti_field(vec));
  const QMatrix s = cross_convention_permutation();
  QMatrix right_s(9, 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t l = 0; l < 3; ++l) right_s(i * 3 + m, i * 3 + l) = s(l, m);
  r.generalized_residual =
      subtract(gen, apply_pointwise(right_s, subtract(times_identity(div, 3), da.transpose()), 3, 3));
  r.holds = r.curl_anti_residual.is_zero() && r.gradient_residual.is_zero() && r.dev_sym_residual.is_zero() &&
            r.generalized_residual.is_zero();
  return r;
}

nlohmann::json HomOperator::to_json() const {
  nlohmann::json j;
  j["kind"] = operator_kind_name(kind);
  j["label"] = label;
  j["n"] = n;
  j["k"] = order;
  j["domain"] = {domain.rows, domain.cols};
  j["codomain"] = {codomain.rows, codomain.cols};
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& [alpha, b] : coeffs) cs.push_back({{"alpha", alpha}, {"matrix", kmslab::to_json(b)}});
  j["coeffs"] = cs;
  return j;
}

HomOperator HomOperator::from_json(const nlohmann::json& j) {
  const OperatorKind kind = parse_operator_kind(j.value("kind", std::string("custom")));
  const std::size_t n = j.at("n").get<std::size_t>();
  if (kind != OperatorKind::custom && !j.contains("coeffs")) {
    const std::size_t rows = j.value("rows", n);
    return build_operator(kind, n, rows);
  }
  HomOperator op;
  op.kind = kind;
  op.label = j.value("label", std::string("B"));
  op.n = n;
  op.order = j.at("k").get<int>();
  op.domain = {j.at("domain")[0].get<std::size_t>(), j.at("domain")[1].get<std::size_t>()};
  op.codomain = {j.at("codomain")[0].get<std::size_t>(), j.at("codomain")[1].get<std::size_t>()};
  for (const auto& c : j.at("coeffs")) {
    const Exponent alpha = c.at("alpha").get<Exponent>();
    if (alpha.size() != n || total_degree(alpha) != op.order) throw Error("coefficient multi-index has wrong order");
    QMatrix m = qmatrix_from_json(c.at("matrix"));
    if (m.rows() != op.codomain.dim() || m.cols() != op.domain.dim()) throw Error("coefficient matrix shape mismatch");
    add_coeff(op, alpha, m);
  }
  prune(op);
  if (op.coeffs.empty()) throw Error("operator has no nonzero coefficients");
  return op;
}

}  // namespace kmslab
