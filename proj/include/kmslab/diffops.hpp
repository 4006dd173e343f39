#pragma once

#include <map>
#include <string>

#include "kmslab/matrix_spaces.hpp"
#include "kmslab/polynomial.hpp"

namespace kmslab {

enum class OperatorKind { grad, div_rowwise, curl_generalized, curl_classical3, inc3, custom };

std::string operator_kind_name(OperatorKind k);
OperatorKind parse_operator_kind(const std::string& name);

/// Homogeneous constant-coefficient operator sum_{|alpha|=k} B_alpha d^alpha.
struct HomOperator {
  OperatorKind kind = OperatorKind::custom;
  std::string label;
  std::size_t n = 0;
  int order = 0;
  Space domain;
  Space codomain;
  std::map<Exponent, QMatrix, GradedLex> coeffs;

  /// Real symbol sum_alpha xi^alpha B_alpha (derivatives replaced by xi).
  QMatrix symbol(const QVector& xi) const;
  GMatrix symbol(const GVector& xi) const;
  bool is_zero() const;

  nlohmann::json to_json() const;
  static HomOperator from_json(const nlohmann::json& j);

  friend bool operator==(const HomOperator& a, const HomOperator& b) {
    return a.order == b.order && a.domain == b.domain && a.codomain == b.codomain && a.coeffs == b.coeffs;
  }
};

/// a x_n b: the inductively defined cross product R^n x R^n -> R^{n(n-1)/2}.
QVector generalized_cross(const QVector& a, const QVector& b);
/// [a] with [a] b = a x_n b.
QMatrix cross_matrix(const QVector& a);
/// Signed permutation S with (generalized cross) = S (classical cross) in R^3.
QMatrix cross_convention_permutation();

/// `rows` is the number of rows of the matrix fields the operator acts on
/// (or the length of the vector field for grad).
HomOperator build_operator(OperatorKind kind, std::size_t n, std::size_t rows);
HomOperator build_operator(OperatorKind kind, std::size_t n);

/// B_part o op.
HomOperator compose_part(const PartMap& part, const HomOperator& op);
/// L o op for a linear map L on the codomain of op.
HomOperator compose_linear(const QMatrix& map, const Space& codomain, const HomOperator& op, const std::string& label);
/// outer o inner; orders add.
HomOperator compose(const HomOperator& outer, const HomOperator& inner);
/// inc built as Curl o transpose o Curl from the classical Curl.
HomOperator inc_by_composition();

/// Exact differentiation of a polynomial field.
PolyField apply_symbolic(const HomOperator& op, const PolyField& f);
/// Pointwise linear map applied to a polynomial field, result shaped rows x cols.
PolyField apply_pointwise(const QMatrix& map, const PolyField& f, std::size_t rows, std::size_t cols);

PolyField add(const PolyField& a, const PolyField& b);
PolyField subtract(const PolyField& a, const PolyField& b);
PolyField scale(const PolyField& a, const Rational& s);
/// Scalar polynomial times the identity matrix.
PolyField times_identity(const Polynomial& p, std::size_t n);
Polynomial trace(const PolyField& m);
/// Anti(a) for a vector field a: R^3 -> R^3.
PolyField anti_field(const PolyField& a);

struct NyeReport {
  bool holds = false;
  PolyField curl_anti_residual;
  PolyField gradient_residual;
  PolyField dev_sym_residual;
  PolyField generalized_residual;
};

/// Checks both of Nye's formulas, the dev-sym identity, and the first formula
/// in the generalized cross-product convention.
NyeReport check_nye(const PolyField& a);

}  // namespace kmslab
