#include <doctest.h>

#include "kmslab/ellipticity.hpp"
#include "kmslab/embedded_data.hpp"
#include "kmslab/poly_kernel.hpp"
#include "kmslab/spectral.hpp"

using namespace kmslab;

namespace {

HomOperator curl() { return base_operator("curl", 3); }

// Nullity of B o T on all polynomials of degree <= d, by direct symbolic differentiation.
std::size_t brute_force_dim(const PartMap& a, const HomOperator& b, int d) {
  const QMatrix t = a.parametrization();
  const std::size_t n = b.n;
  std::vector<Exponent> monos;
  for (int e = 0; e <= d; ++e)
    for (auto& m : monomials_of_degree(n, e)) monos.push_back(m);
  std::vector<QVector> columns;
  const int out_degree = std::max(d - b.order, 0);
  for (std::size_t k = 0; k < t.cols(); ++k)
    for (const auto& m : monos) {
      PolyField coords(n, t.cols(), 1);
      coords.comps[k] = Polynomial::monomial(m, 1);
      const PolyField f = apply_pointwise(t, coords, a.domain().rows, a.domain().cols);
      columns.push_back(field_coefficients(apply_symbolic(b, f), out_degree));
    }
  QMatrix sys(columns.empty() ? 0 : columns[0].size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) sys.set_col(c, columns[c]);
  return columns.size() - rank(sys);
}

}  // namespace

TEST_SUITE("poly_kernel") {
  TEST_CASE("dimensions match the frozen table") {
    const auto table = nlohmann::json::parse(embedded::kernel_dims);
    for (const auto& e : table.at("entries")) {
      const std::string a = e.at("A"), bp = e.at("B_part"), base = e.at("base");
      const std::size_t n = e.at("n");
      CAPTURE(a);
      CAPTURE(bp);
      CAPTURE(base);
      CAPTURE(n);
      const PartMap pa = domain_part(a, base, n);
      const HomOperator b = assembled_operator(bp, base, n);
      const KernelBasis k = kernel_polynomials(pa, b);
      CHECK(k.dim() == e.at("dim").get<std::size_t>());
      if (e.contains("degree_bound")) CHECK(k.degree_bound == e.at("degree_bound").get<int>());
      CHECK(check_kernel_basis(k, pa, b).empty());
      // every kernel is polynomial of degree < empty slice degree
      CHECK(brute_force_dim(pa, b, k.empty_slice_degree) == k.dim());
    }
  }

  TEST_CASE("non complex-elliptic pairs exceed the cap") {
    const auto table = nlohmann::json::parse(embedded::kernel_dims);
    for (const auto& e : table.at("cap_exceeded")) {
      const PartMap pa = domain_part(e.at("A"), e.at("base"), e.at("n"));
      const HomOperator b = assembled_operator(e.at("B_part"), e.at("base"), e.at("n"));
      CHECK_THROWS_AS(kernel_polynomials(pa, b, 5), CapExceeded);
      // every slice up to the cap is non-empty
      const PolyMatrix m = restricted_symbol(pa, b);
      for (int d = 0; d <= 5; ++d) CHECK_FALSE(homogeneous_kernel_slice(m, d).empty());
    }
  }

  TEST_CASE("named kernels") {
    // constant skew matrices
    const KernelBasis k = kernel_polynomials(PartMap::build("sym", 3), curl());
    CHECK(k.dim() == 3);
    CHECK(k.degree_bound == 0);
    for (const auto& e : k.elements) {
      const PolyField s = add(e, e.transpose());
      CHECK(s.is_zero());
    }
    // gamma 1
    const KernelBasis k2 = kernel_polynomials(PartMap::build("dev", 3), assembled_operator("skew", "curl", 3));
    REQUIRE(k2.dim() == 1);
    const auto& e = k2.elements[0];
    CHECK(e.at(0, 0) == e.at(1, 1));
    CHECK(e.at(1, 1) == e.at(2, 2));
    CHECK(e.at(0, 1).is_zero());
    // (<a,x> + alpha) 1
    const KernelBasis k3 = kernel_polynomials(PartMap::build("dev", 3), assembled_operator("sym", "inc", 3));
    CHECK(k3.dim() == 4);
    CHECK(k3.degree_bound == 1);
    CHECK(k3.slice_dims == std::vector<std::size_t>{1, 3});
    // trivial kernel
    for (const char* b : {"Id", "dev", "skew"}) {
      const KernelBasis z = kernel_polynomials(PartMap::build("Id", 3), assembled_operator(b, "curl", 3));
      CHECK(z.dim() == 0);
      CHECK(z.degree_bound == -1);
    }
  }

  TEST_CASE("slice emptiness is monotone") {
    for (const auto* base : {"curl", "inc"})
      for (PartKind a : catalog_parts())
        for (PartKind b : catalog_parts()) {
          const PolyMatrix m = restricted_symbol(PartMap::build(a, 3), assembled_operator(part_name(b), base, 3));
          const int d = first_empty_kernel_slice(m, 5);
          if (d < 0) continue;
          for (int e = d + 1; e <= 5; ++e) CHECK(homogeneous_kernel_slice(m, e).empty());
        }
  }

  TEST_CASE("json layout") {
    const KernelBasis k = kernel_polynomials(PartMap::build("dev", 3), assembled_operator("sym", "inc", 3));
    const auto j = k.to_json();
    CHECK(j.at("dim") == 4);
    CHECK(j.at("basis").size() == 4);
    const auto& t = j.at("basis")[1].at("terms")[0];
    CHECK(t.at("exponent").size() == 3);
    CHECK(t.at("coefficient").size() == 3);
    CHECK(j.dump() == kernel_polynomials(PartMap::build("dev", 3), assembled_operator("sym", "inc", 3)).to_json().dump());
  }

  TEST_CASE("kernel projection") {
    GridDomain d{3, 32, 0.5};
    const PartMap dev = PartMap::build("dev", 3);
    const KernelBasis k = kernel_polynomials(dev, curl());
    REQUIRE(k.dim() == 1);
    const double gamma = 0.7;
    // gamma 1 plus a bump orthogonal to 1 pointwise
    FieldParams prm;
    prm.radius = 1.2;
    prm.value = {0, 1, 0, 0, 1, 0, 0, 0, -1};
    GridField bump = make_field(FieldKind::bump_times_const, d, prm);
    GridField p = bump;
    for (std::size_t q = 0; q < p.points(); ++q)
      for (int i = 0; i < 3; ++i) p.at(q)[i * 4] += gamma;
    const Projection pr = project_onto_kernel(p, k, 0, 2.0);
    const double elem = k.elements[0].comps[0].coefficient({0, 0, 0}).get_d();
    CHECK(pr.coefficients[0] * elem == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(pr.residual == doctest::Approx(lebesgue_norm(bump, 2.0, Region::interior)).epsilon(1e-10));
    // mean of tr P / 3 for a general field
    FieldParams r;
    r.max_mode = 4;
    const GridField f = make_field(FieldKind::band_limited_random, d, r);
    double mean = 0;
    const auto pts = d.interior_points();
    for (std::size_t q : pts) mean += (f.at(q)[0] + f.at(q)[4] + f.at(q)[8]) / 3;
    mean /= static_cast<double>(pts.size());
    CHECK(project_onto_kernel(f, k, 0, 2.0).coefficients[0] * elem == doctest::Approx(mean).epsilon(1e-10));
    // element of the span: zero residual for any q
    GridField inside(d, {3, 3});
    for (std::size_t q = 0; q < inside.points(); ++q)
      for (int i = 0; i < 3; ++i) inside.at(q)[i * 4] = -1.5;
    for (double q : {1.5, 2.0, 4.0})
      CHECK(project_onto_kernel(inside, k, 0, q).residual < 1e-12 * lebesgue_norm(inside, q, Region::interior));
    // IRLS against a direct scalar minimization
    const double q = 4.0;
    auto cost = [&](double g) {
      GridField t = f;
      for (std::size_t pt = 0; pt < t.points(); ++pt)
        for (int i = 0; i < 3; ++i) t.at(pt)[i * 4] -= g;
      return lebesgue_norm(t, q, Region::interior);
    };
    double lo = -5, hi = 5;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      (cost(m1) < cost(m2) ? hi : lo) = (cost(m1) < cost(m2) ? m2 : m1);
    }
    const Projection irls = project_onto_kernel(f, k, 0, q);
    CHECK(irls.residual == doctest::Approx(cost(0.5 * (lo + hi))).epsilon(1e-8));
    CHECK(irls.coefficients[0] * elem == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-5));
  }

}
