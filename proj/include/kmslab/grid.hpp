#pragma once

#include <string>
#include <vector>

#include "kmslab/matrix_spaces.hpp"
#include "kmslab/polynomial.hpp"

namespace kmslab {

/// Uniform periodic grid on [0, 2pi)^n; the interior is the centred subcube of
/// side 2pi * interior.
struct GridDomain {
  std::size_t n = 3;
  std::size_t N = 64;
  double interior = 0.5;

  void validate() const;
  std::size_t points() const;
  double spacing() const;
  double cell_volume() const;
  double interior_lo() const;
  double interior_hi() const;
  /// Row-major point index, last axis fastest.
  std::vector<double> coordinates(std::size_t point) const;
  bool in_interior(std::size_t point) const;
  std::vector<std::size_t> interior_points() const;
};

/// Values point-major: values[point * dim + component].
struct GridField {
  GridDomain domain;
  Space space;
  std::vector<double> values;
  std::string provenance;
  std::vector<std::string> warnings;

  GridField() = default;
  GridField(const GridDomain& d, Space s, std::string prov = {})
      : domain(d), space(s), values(d.points() * s.dim(), 0.0), provenance(std::move(prov)) {}

  std::size_t dim() const { return space.dim(); }
  std::size_t points() const { return domain.points(); }
  double* at(std::size_t p) { return values.data() + p * dim(); }
  const double* at(std::size_t p) const { return values.data() + p * dim(); }
  double max_abs() const;
};

GridField sample(const PolyField& f, const GridDomain& d, const std::string& provenance = "polynomial");

/// Pointwise linear map (rows = target dim, cols = field dim).
GridField apply_pointwise(const QMatrix& map, const GridField& f, Space target);

enum class Region { box, interior };

}  // namespace kmslab
