#pragma once

#include <complex>
#include <map>

#include <Eigen/Dense>

#include "kmslab/diffops.hpp"

namespace kmslab {

/// Matrix of homogeneous degree-k polynomials, M(xi) = sum_alpha xi^alpha C_alpha.
struct PolyMatrix {
  std::size_t n = 0;
  int order = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::map<Exponent, QMatrix, GradedLex> coeffs;

  QMatrix at(const QVector& xi) const;
  GMatrix at(const GVector& xi) const;
  Eigen::MatrixXd at(const std::vector<double>& xi) const;
  Eigen::MatrixXcd at(const std::vector<std::complex<double>>& xi) const;
  Polynomial entry(std::size_t r, std::size_t c) const;
};

/// M(xi) = B[xi] T with T the kernel parametrization of A.
PolyMatrix restricted_symbol(const PartMap& a, const HomOperator& b);

/// Exact nullspace of M(d) acting on homogeneous degree-d polynomial maps
/// R^n -> R^cols. Coefficient vectors are indexed by component * count + monomial,
/// monomials in graded-lex order.
std::vector<QVector> homogeneous_kernel_slice(const PolyMatrix& m, int d);

/// Polynomial field of a slice vector (values in R^cols).
PolyField slice_vector_to_field(const PolyMatrix& m, int d, const QVector& coeffs);

}  // namespace kmslab
