#include "kmslab/grid.hpp"

#include <cmath>
#include <numbers>

namespace kmslab {

void GridDomain::validate() const {
  if (n < 1) throw Error("grid dimension must be positive");
  if (N < 4 || (N & (N - 1)) != 0) throw Error("samples per axis must be a power of two >= 4");
  if (!(interior > 0 && interior < 1)) throw Error("interior fraction must lie in (0, 1)");
}

std::size_t GridDomain::points() const {
  std::size_t p = 1;
  for (std::size_t j = 0; j < n; ++j) p *= N;
  return p;
}

double GridDomain::spacing() const { return 2 * std::numbers::pi / static_cast<double>(N); }

double GridDomain::cell_volume() const { return std::pow(spacing(), static_cast<double>(n)); }

double GridDomain::interior_lo() const { return std::numbers::pi * (1 - interior); }
double GridDomain::interior_hi() const { return std::numbers::pi * (1 + interior); }

std::vector<double> GridDomain::coordinates(std::size_t point) const {
  std::vector<double> x(n);
  for (std::size_t j = n; j-- > 0;) {
    x[j] = spacing() * static_cast<double>(point % N);
    point /= N;
  }
  return x;
}

bool GridDomain::in_interior(std::size_t point) const {
  // index test avoids rounding at the faces
  const double lo = 0.5 * (1 - interior) * static_cast<double>(N), hi = 0.5 * (1 + interior) * static_cast<double>(N);
  for (std::size_t j = 0; j < n; ++j) {
    const double i = static_cast<double>(point % N);
    point /= N;
    if (i < lo || i >= hi) return false;
  }
  return true;
}

std::vector<std::size_t> GridDomain::interior_points() const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < points(); ++p)
    if (in_interior(p)) out.push_back(p);
  return out;
}

double GridField::max_abs() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

GridField sample(const PolyField& f, const GridDomain& d, const std::string& provenance) {
  d.validate();
  if (f.nvars != d.n) throw Error("polynomial field has wrong number of variables");
  GridField out(d, {f.rows, f.cols}, provenance);
  for (std::size_t p = 0; p < d.points(); ++p) {
    const auto v = f.evaluate(d.coordinates(p));
    std::copy(v.begin(), v.end(), out.at(p));
  }
  return out;
}

GridField apply_pointwise(const QMatrix& map, const GridField& f, Space target) {
  if (map.cols() != f.dim() || map.rows() != target.dim()) throw Error("pointwise map has wrong shape");
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (std::size_t r = 0; r < map.rows(); ++r)
    for (std::size_t c = 0; c < map.cols(); ++c)
      if (sgn(map(r, c)) != 0) entries.emplace_back(r, c, map(r, c).get_d());
  GridField out(f.domain, target, f.provenance);
  out.warnings = f.warnings;
  const std::size_t dim = f.dim(), tdim = target.dim();
  for (std::size_t p = 0; p < f.points(); ++p) {
    const double* in = f.values.data() + p * dim;
    double* o = out.values.data() + p * tdim;
    for (const auto& [r, c, v] : entries) o[r] += v * in[c];
  }
  return out;
}

}  // namespace kmslab
