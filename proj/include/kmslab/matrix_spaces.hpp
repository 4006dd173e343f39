#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmslab/exact_matrix.hpp"

namespace kmslab {

using QVector = std::vector<Rational>;
using GVector = std::vector<GaussianRational>;

/// Real inner product space R^{rows x cols} with the Frobenius product.
/// Vectors are stored row-major over matrix entries.
struct Space {
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t dim() const { return rows * cols; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * cols + j; }
  bool square() const { return rows == cols; }
  friend bool operator==(const Space&, const Space&) = default;
};

enum class PartKind { Id, dev, sym, devsym, skewtr, skew, tr, zero, custom };

/// Catalog order used for the classification tables.
const std::vector<PartKind>& catalog_parts();
std::string part_name(PartKind k);
PartKind parse_part_kind(const std::string& name);

/// Certified value of the injectivity constant. lambda_sq_lo <= lambda^2 <= lambda_sq_hi,
/// with equality when `exact`. `infinite` when ker(A)^perp = {0}.
struct InjectivityConstant {
  bool infinite = false;
  bool exact = false;
  Rational lambda_sq_lo;
  Rational lambda_sq_hi;
  /// lambda itself when lambda^2 is the square of a rational.
  std::optional<Rational> lambda;
  double approx() const;
};

/// Linear map on a matrix space, with an orthogonal (unnormalized) kernel basis.
class PartMap {
 public:
  /// Catalog map on R^{n x n}.
  static PartMap build(PartKind kind, std::size_t n);
  static PartMap build(const std::string& name, std::size_t n);
  /// Custom map given by its matrix (codomain dim x domain dim).
  static PartMap custom(const std::string& name, Space domain, Space codomain, QMatrix matrix);

  PartKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t n() const { return domain_.rows; }
  const Space& domain() const { return domain_; }
  const Space& codomain() const { return codomain_; }
  const QMatrix& matrix() const { return matrix_; }

  QVector apply(const QVector& x) const { return matrix_.apply(x); }

  /// Pairwise orthogonal kernel basis; empty when A is injective.
  const std::vector<QVector>& kernel_basis() const { return kernel_; }
  /// Squared Frobenius norms of the kernel basis elements.
  const QVector& kernel_gram() const { return gram_; }
  std::size_t kernel_dim() const { return kernel_.size(); }

  /// Parametrization T: R^M -> ker(A), columns are the kernel basis.
  QMatrix parametrization() const;
  /// Orthogonal projector onto ker(A) or onto its complement.
  QMatrix projector_kernel() const;
  QMatrix projector_complement() const;

  /// Coordinates of a kernel element in the kernel basis; throws if x is not in ker(A).
  GVector kernel_coordinates(const GVector& x) const;

  InjectivityConstant injectivity_constant() const;

  nlohmann::json to_json() const;
  static PartMap from_json(const nlohmann::json& j);

 private:
  PartMap() = default;
  void finish(std::vector<QVector> kernel_span);

  PartKind kind_ = PartKind::custom;
  std::string name_;
  Space domain_;
  Space codomain_;
  QMatrix matrix_;
  std::vector<QVector> kernel_;
  QVector gram_;
};

/// Rational Gram-Schmidt without normalization; drops dependent vectors.
std::vector<QVector> orthogonalize(const std::vector<QVector>& vs);

/// Standard basis matrix E_ij of R^{n x n} as a vector.
QVector unit_matrix(std::size_t n, std::size_t i, std::size_t j);
QVector identity_matrix(std::size_t n);
/// Anti(v) for v in R^3, row-major.
QVector anti(const QVector& v);
/// Inverse of Anti on so(3).
QVector anti_inverse(const QVector& m);

QMatrix dev_matrix(std::size_t n);
QMatrix sym_matrix(std::size_t n);
QMatrix skew_matrix(std::size_t n);
QMatrix trace_matrix(std::size_t n);
QMatrix transpose_matrix(std::size_t rows, std::size_t cols);

nlohmann::json to_json(const QMatrix& m);
QMatrix qmatrix_from_json(const nlohmann::json& j);

}  // namespace kmslab
