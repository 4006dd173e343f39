#include "kmslab/poly_kernel.hpp"

namespace kmslab {

KernelBasis kernel_polynomials(const PartMap& a, const HomOperator& b, int degree_cap) {
  const PolyMatrix m = restricted_symbol(a, b);
  KernelBasis k;
  k.A = a.name();
  k.B = b.label;
  k.n = b.n;
  const QMatrix t = a.parametrization();
  const Space& v = a.domain();
  for (int d = 0;; ++d) {
    const auto slice = homogeneous_kernel_slice(m, d);
    if (slice.empty()) {
      k.empty_slice_degree = d;
      break;
    }
    if (d >= degree_cap) throw CapExceeded(degree_cap, slice.size());
    k.slice_dims.push_back(slice.size());
    for (const auto& s : slice) {
      const PolyField coords = slice_vector_to_field(m, d, s);
      k.elements.push_back(apply_pointwise(t, coords, v.rows, v.cols));
      k.degrees.push_back(d);
    }
    k.degree_bound = d;
  }
  return k;
}

std::size_t kernel_dim(const PartMap& a, const HomOperator& b, int degree_cap) {
  return kernel_polynomials(a, b, degree_cap).dim();
}

QVector field_coefficients(const PolyField& f, int max_degree) {
  std::vector<Exponent> monos;
  for (int d = 0; d <= max_degree; ++d)
    for (auto& e : monomials_of_degree(f.nvars, d)) monos.push_back(std::move(e));
  QVector out;
  out.reserve(f.comps.size() * monos.size());
  for (const auto& p : f.comps)
    for (const auto& e : monos) out.push_back(p.coefficient(e));
  return out;
}

std::string check_kernel_basis(const KernelBasis& k, const PartMap& a, const HomOperator& b) {
  const int top = std::max(k.degree_bound, 0);
  QMatrix span(k.dim() == 0 ? 0 : field_coefficients(k.elements[0], top).size(), k.dim());
  for (std::size_t i = 0; i < k.dim(); ++i) {
    const PolyField& e = k.elements[i];
    if (!apply_pointwise(a.matrix(), e, a.codomain().rows, a.codomain().cols).is_zero())
      return "element " + std::to_string(i) + " is not annihilated by " + a.name();
    if (!apply_symbolic(b, e).is_zero()) return "element " + std::to_string(i) + " is not annihilated by " + b.label;
    span.set_col(i, field_coefficients(e, top));
  }
  const std::size_t r = rank(span);
  if (r != k.dim()) return "elements are linearly dependent";
  for (std::size_t i = 0; i < k.dim(); ++i)
    for (std::size_t j = 0; j < k.n; ++j) {
      Exponent alpha(k.n, 0);
      alpha[j] = 1;
      const PolyField d = k.elements[i].derivative(alpha);
      if (d.is_zero()) continue;
      QMatrix ext(span.rows(), k.dim() + 1);
      for (std::size_t c = 0; c < k.dim(); ++c) ext.set_col(c, span.col(c));
      ext.set_col(k.dim(), field_coefficients(d, top));
      if (rank(ext) != r) return "derivative of element " + std::to_string(i) + " leaves the span";
    }
  return {};
}

nlohmann::json KernelBasis::to_json() const {
  nlohmann::json j;
  j["schema"] = "kmslab.kernel/1";
  j["A"] = A;
  j["B"] = B;
  j["n"] = n;
  j["dim"] = dim();
  j["degree_bound"] = degree_bound;
  j["empty_slice_degree"] = empty_slice_degree;
  j["slice_dims"] = slice_dims;
  nlohmann::json basis = nlohmann::json::array();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const PolyField& f = elements[i];
    // group coefficients by monomial
    std::map<Exponent, std::vector<Rational>, GradedLex> by_mono;
    for (std::size_t c = 0; c < f.comps.size(); ++c)
      for (const auto& [e, coef] : f.comps[c].terms()) {
        auto& slot = by_mono[e];
        if (slot.empty()) slot.assign(f.comps.size(), Rational(0));
        slot[c] = coef;
      }
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, vals] : by_mono) {
      nlohmann::json coeff = nlohmann::json::array();
      for (std::size_t r = 0; r < f.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < f.cols; ++c) row.push_back(to_string(vals[r * f.cols + c]));
        coeff.push_back(row);
      }
      terms.push_back({{"exponent", e}, {"coefficient", coeff}});
    }
    basis.push_back({{"degree", degrees[i]}, {"terms", terms}});
  }
  j["basis"] = basis;
  return j;
}

}  // namespace kmslab
