#pragma once

#include <string>
#include <vector>

#include "kmslab/polymatrix.hpp"

namespace kmslab {

/// Raised when the slice at degree_cap is still non-empty.
struct CapExceeded : Error {
  CapExceeded(int cap, std::size_t slice_dim)
      : Error("cap exceeded: degree " + std::to_string(cap) + " slice still has dimension " +
              std::to_string(slice_dim)),
        cap(cap) {}
  int cap;
};

/// Polynomial fields P with A[P] = 0 pointwise and B P = 0.
struct KernelBasis {
  std::string A;
  std::string B;
  std::size_t n = 0;
  /// First degree with an empty homogeneous slice.
  int empty_slice_degree = 0;
  /// Highest degree present, -1 for the trivial kernel.
  int degree_bound = -1;
  /// Values in the domain of A, shaped like it.
  std::vector<PolyField> elements;
  std::vector<int> degrees;
  /// Per-degree slice dimensions, index = degree.
  std::vector<std::size_t> slice_dims;

  std::size_t dim() const { return elements.size(); }
  nlohmann::json to_json() const;
};

KernelBasis kernel_polynomials(const PartMap& a, const HomOperator& b, int degree_cap = 8);
std::size_t kernel_dim(const PartMap& a, const HomOperator& b, int degree_cap = 8);

/// Checks A[P] = 0 and B P = 0 exactly, linear independence, and that every
/// first derivative of every element lies in the span. Returns an empty string or the first failure.
std::string check_kernel_basis(const KernelBasis& k, const PartMap& a, const HomOperator& b);

/// Coefficient vector of a field over (component, monomial of degree <= d) in graded-lex order.
QVector field_coefficients(const PolyField& f, int max_degree);

}  // namespace kmslab
