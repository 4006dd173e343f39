#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kmslab/ellipticity.hpp"
#include "kmslab/spectral.hpp"

using namespace kmslab;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const GridField& a, const GridField& b) {
  REQUIRE(a.values.size() == b.values.size());
  double m = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::fabs(a.values[i] - b.values[i]));
  return m;
}

GridField from_function(const GridDomain& d, Space s,
                        const std::function<void(const std::vector<double>&, double*)>& fill) {
  GridField f(d, s);
  for (std::size_t p = 0; p < d.points(); ++p) fill(d.coordinates(p), f.at(p));
  return f;
}

HomOperator curl() { return base_operator("curl", 3); }

GridField part(const char* name, const GridField& f) {
  const PartMap a = PartMap::build(name, 3);
  return apply_pointwise(a.matrix(), f, a.codomain());
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("single Fourier modes match the exact symbol") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    GridDomain d{3, 16, 0.5};
    for (const auto& op : {curl(), base_operator("inc", 3), base_operator("div", 3), base_operator("curl_generalized", 3)}) {
      for (int trial = 0; trial < 4; ++trial) {
        FieldParams prm;
        prm.space = op.domain;
        for (std::size_t c = 0; c < op.domain.dim(); ++c) prm.value.push_back(g(rng));
        prm.wave = {trial - 1, 2, -3 + trial};
        const GridField f = make_field(FieldKind::plane_wave, d, prm);
        const GridField got = apply_operator_fft(op, f);
        // d^alpha cos = Re(i^k xi^alpha e^{i xi.x})
        QVector xi;
        for (int w : prm.wave) xi.emplace_back(w);
        const QMatrix sym = op.symbol(xi);
        const GridField expected = from_function(d, op.codomain, [&](const std::vector<double>& x, double* v) {
          double phase = 0;
          for (std::size_t j = 0; j < 3; ++j) phase += prm.wave[j] * x[j];
          const double wave = op.order == 1 ? -std::sin(phase) : -std::cos(phase);
          for (std::size_t r = 0; r < sym.rows(); ++r) {
            double s = 0;
            for (std::size_t c = 0; c < sym.cols(); ++c) s += sym(r, c).get_d() * prm.value[c];
            v[r] = wave * s;
          }
        });
        const double scale = std::max(1.0, expected.max_abs());
        CHECK(max_abs_diff(got, expected) < 1e-12 * scale);
        CHECK(got.warnings.empty());
      }
    }
  }

  TEST_CASE("spherical bump: dev and sym Curl vanish, Curl matches -Anti(grad phi)") {
    GridDomain d{3, 64, 0.5};
    FieldParams prm;
    const GridField p = make_field(FieldKind::spherical_bump, d, prm);
    const double pmax = p.max_abs();
    CHECK(part("dev", p).max_abs() < 1e-10 * pmax);
    const GridField c = apply_operator_fft(curl(), p);
    CHECK(part("sym", c).max_abs() < 1e-10 * pmax);
    const std::vector<double> center(3, pi);
    const GridField expected = from_function(d, {3, 3}, [&](const std::vector<double>& x, double* v) {
      const auto gr = bump_gradient(x, center, prm.radius, prm.width_ratio);
      v[1] = gr[2];
      v[2] = -gr[1];
      v[3] = -gr[2];
      v[5] = gr[0];
      v[6] = gr[1];
      v[7] = -gr[0];
    });
    CHECK(max_abs_diff(c, expected) < 1e-8 * expected.max_abs());
  }

  TEST_CASE("anti-gradient bump: Curl is the symmetric Hessian pattern") {
    GridDomain d{3, 64, 0.5};
    FieldParams prm;
    const GridField p = make_field(FieldKind::anti_gradient_bump, d, prm);
    CHECK(part("sym", p).max_abs() < 1e-14);
    const GridField c = apply_operator_fft(curl(), p);
    CHECK(part("skew", c).max_abs() < 1e-10 * p.max_abs());
    const double s = prm.radius * prm.width_ratio;
    const GridField expected = from_function(d, {3, 3}, [&](const std::vector<double>& x, double* v) {
      const double psi = bump_value(x, std::vector<double>(3, pi), prm.radius, prm.width_ratio);
      double hess[3][3], lap = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          hess[i][j] = ((x[i] - pi) * (x[j] - pi) / (s * s * s * s) - (i == j ? 1.0 / (s * s) : 0.0)) * psi;
      for (int i = 0; i < 3; ++i) lap += hess[i][i];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[i * 3 + j] = (i == j ? lap : 0.0) - hess[i][j];
    });
    CHECK(max_abs_diff(c, expected) < 1e-8 * expected.max_abs());
  }

  TEST_CASE("constants and rigid motions") {
    GridDomain d{3, 16, 0.5};
    FieldParams prm;
    prm.value = {0.3, -1.2, 2.0};
    const GridField p = make_field(FieldKind::rigid_motion_gradient, d, prm);
    CHECK(part("sym", p).max_abs() == 0.0);
    CHECK(apply_operator_fft(curl(), p).max_abs() < 1e-12);
    // |c 1| = |c| sqrt(3), box volume (2 pi)^3
    GridField c1(d, {3, 3});
    for (std::size_t q = 0; q < c1.points(); ++q)
      for (int i = 0; i < 3; ++i) c1.at(q)[i * 4] = -2.5;
    const double vol = std::pow(2 * pi, 3);
    for (double q : {1.0, 2.0, 3.5, 6.0})
      CHECK(lebesgue_norm(c1, q) == doctest::Approx(2.5 * std::sqrt(3.0) * std::pow(vol, 1 / q)).epsilon(1e-12));
    CHECK(sobolev_seminorm(c1, 1, 2.0) < 1e-12);
  }

  TEST_CASE("inc annihilates symmetric gradients") {
    GridDomain d{3, 32, 0.5};
    FieldParams prm;
    prm.max_mode = 4;
    prm.seed = 9;
    const GridField du = make_field(FieldKind::random_gradient, d, prm);
    const GridField e = part("sym", du);
    CHECK(apply_operator_fft(base_operator("inc", 3), e).max_abs() < 1e-10 * e.max_abs());
    CHECK(apply_operator_fft(curl(), du).max_abs() < 1e-10 * du.max_abs());
  }

  TEST_CASE("quadrature and seminorm closed forms") {
    GridDomain d{3, 32, 0.5};
    FieldParams prm;
    prm.max_mode = 4;
    prm.space = {3, 3};
    const GridField f = make_field(FieldKind::band_limited_random, d, prm);
    double sum = 0;
    for (double v : f.values) sum += v * v;
    const double direct = std::sqrt(sum * d.cell_volume());
    CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(direct).epsilon(1e-12));
    const GridField grads = apply_operator_fft(build_operator(OperatorKind::grad, 3, 9), f);
    CHECK(sobolev_seminorm(f, 1, 2.0) == doctest::Approx(lebesgue_norm(grads, 2.0)).epsilon(1e-12));
    // sin(x1) E: first derivatives cos(x1) E, L2 norm^2 = pi (2 pi)^2 |E|^2
    const std::vector<double> e = {1, 2, 0, -1, 0, 3, 0, 0, 2};
    double e2 = 0;
    for (double x : e) e2 += x * x;
    const GridField s = from_function(d, {3, 3}, [&](const std::vector<double>& x, double* v) {
      for (int c = 0; c < 9; ++c) v[c] = std::sin(x[0]) * e[c];
    });
    CHECK(sobolev_seminorm(s, 1, 2.0) == doctest::Approx(std::sqrt(pi * 4 * pi * pi * e2)).epsilon(1e-12));
    CHECK(sobolev_seminorm(s, 0, 3.0) == lebesgue_norm(s, 3.0));
    // only d11 survives, with the same L2 norm
    CHECK(sobolev_seminorm(s, 2, 2.0) == doctest::Approx(std::sqrt(pi * 4 * pi * pi * e2)).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_seminorm(s, 3, 2.0), Error);
  }

  TEST_CASE("Parseval identity through the spectrum") {
    GridDomain d{2, 64, 0.5};
    FieldParams prm;
    prm.space = {1, 1};
    prm.max_mode = 8;
    prm.seed = 4;
    const GridField f = make_field(FieldKind::band_limited_random, d, prm);
    // Fourier coefficients by direct quadrature
    double parseval = 0;
    for (int k1 = -8; k1 <= 8; ++k1)
      for (int k2 = -8; k2 <= 8; ++k2) {
        double re = 0, im = 0;
        for (std::size_t p = 0; p < d.points(); ++p) {
          const auto x = d.coordinates(p);
          const double ph = k1 * x[0] + k2 * x[1];
          re += f.values[p] * std::cos(ph);
          im -= f.values[p] * std::sin(ph);
        }
        re /= static_cast<double>(d.points());
        im /= static_cast<double>(d.points());
        parseval += re * re + im * im;
      }
    parseval *= 4 * pi * pi;
    CHECK(std::sqrt(parseval) == doctest::Approx(lebesgue_norm(f, 2.0)).epsilon(1e-10));
  }

  TEST_CASE("aliasing warning") {
    GridDomain d{2, 16, 0.5};
    FieldParams prm;
    prm.space = {1, 1};
    prm.value = {1.0};
    prm.wave = {7, 0};
    const HomOperator g = build_operator(OperatorKind::grad, 2, 1);
    CHECK_FALSE(apply_operator_fft(g, make_field(FieldKind::plane_wave, d, prm)).warnings.empty());
    prm.wave = {2, 1};
    CHECK(apply_operator_fft(g, make_field(FieldKind::plane_wave, d, prm)).warnings.empty());
    CHECK(high_frequency_fraction(make_field(FieldKind::plane_wave, d, prm)) < 1e-20);
  }

  TEST_CASE("field factory preconditions") {
    GridDomain d{3, 32, 0.5};
    FieldParams prm;
    prm.radius = 2.0;
    CHECK_THROWS_AS(make_field(FieldKind::spherical_bump, d, prm), Error);
    prm.radius = 1.0;
    prm.max_mode = 8;
    CHECK_THROWS_AS(make_field(FieldKind::band_limited_random, d, prm), Error);
    CHECK_THROWS_AS((GridDomain{3, 48, 0.5}.validate()), Error);
    CHECK_THROWS_AS((GridDomain{3, 32, 1.0}.validate()), Error);
    // bumps vanish outside the interior
    prm.radius = pi / 2;
    const GridField b = make_field(FieldKind::spherical_bump, d, prm);
    for (std::size_t p = 0; p < b.points(); ++p)
      if (!d.in_interior(p))
        for (std::size_t c = 0; c < 9; ++c) CHECK(b.at(p)[c] == 0.0);
    // same random field at every resolution
    FieldParams r;
    r.max_mode = 4;
    const GridField f32 = make_field(FieldKind::band_limited_random, GridDomain{3, 32, 0.5}, r);
    const GridField f64 = make_field(FieldKind::band_limited_random, GridDomain{3, 64, 0.5}, r);
    for (std::size_t p = 0; p < f32.points(); p += 97) {
      const auto x = f32.domain.coordinates(p);
      std::size_t q = 0;
      for (double xi : x) q = q * 64 + static_cast<std::size_t>(std::lround(xi / f64.domain.spacing()));
      for (std::size_t c = 0; c < 9; ++c) CHECK(f32.at(p)[c] == doctest::Approx(f64.at(q)[c]).epsilon(1e-12));
    }
  }

  TEST_CASE("first-kind ratios on the counterexample families") {
    GridDomain d{3, 64, 0.5};
    const GridField p11 = make_field(FieldKind::spherical_bump, d, {});
    const auto r11 = kms1_ratio(p11, PartMap::build("dev", 3), assembled_operator("sym", "curl", 3), 2.0);
    CHECK(r11.infinite);
    CHECK(r11.rhs() < 1e-10 * r11.field_norm);
    CHECK(r11.lhs > 1e-2 * r11.field_norm);
    const GridField p12 = make_field(FieldKind::anti_gradient_bump, d, {});
    const auto r12 = kms1_ratio(p12, PartMap::build("sym", 3), assembled_operator("skew", "curl", 3), 2.0);
    CHECK(r12.infinite);
    // the same fields are controlled once the full Curl is used
    CHECK_FALSE(kms1_ratio(p11, PartMap::build("dev", 3), curl(), 2.0).infinite);
    CHECK_THROWS_AS(kms1_ratio(p11, PartMap::build("dev", 3), curl(), 3.0), Error);
  }

  TEST_CASE("first-kind ratios are stable under refinement for an elliptic pair") {
    double sup32 = 0, sup64 = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      FieldParams prm;
      prm.seed = seed;
      prm.max_mode = 4;
      for (std::size_t N : {32, 64}) {
        const GridField f = make_field(FieldKind::band_limited_random, GridDomain{3, N, 0.5}, prm);
        const auto r = kms1_ratio(f, PartMap::build("sym", 3), curl(), 2.0);
        CHECK(std::isfinite(r.ratio));
        (N == 32 ? sup32 : sup64) = std::max(N == 32 ? sup32 : sup64, r.ratio);
      }
    }
    CHECK(std::fabs(sup64 - sup32) < 0.2 * sup32);
  }

  TEST_CASE("second-kind ratios") {
    GridDomain d{3, 32, 0.5};
    const PartMap sym = PartMap::build("sym", 3);
    const KernelBasis k = kernel_polynomials(sym, curl());
    FieldParams prm;
    prm.max_mode = 4;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      prm.seed = seed;
      const GridField du = make_field(FieldKind::random_gradient, d, prm);
      const auto n = kms2_ratio(du, sym, curl(), 2.0, 2.0, 0, k, true);
      CHECK(std::isfinite(n.ratio));
      CHECK(n.ratio > 0);
      const auto m = kms2_ratio(du, sym, curl(), 2.0, 2.0, 0, k, false);
      CHECK(std::isfinite(m.ratio));
      // normalization only subtracts a constant skew matrix, the minimum over K is never larger
      CHECK(m.lhs <= n.lhs * (1 + 1e-12));
    }
    // kernel elements themselves
    const GridField inside = sample(k.elements[1], d, "kernel element");
    const auto z = kms2_ratio(inside, sym, curl(), 2.0, 2.0, 0, k, false);
    CHECK(z.lhs < 1e-12);
    CHECK(z.ratio == 0.0);
    CHECK_THROWS_AS(kms2_ratio(inside, sym, curl(), 2.0, 7.0, 0, k, false), Error);
    CHECK_THROWS_AS(kms2_ratio(inside, sym, curl(), 3.0, 2.0, 0, k, false), Error);
    // second order, j = 1, with a quadratic kernel
    const PartMap dev = PartMap::build("dev", 3);
    const HomOperator b = assembled_operator("devsym", "inc", 3);
    const KernelBasis k8 = kernel_polynomials(dev, b);
    prm.seed = 5;
    const GridField f = make_field(FieldKind::band_limited_random, d, prm);
    const auto r = kms2_ratio(f, dev, b, 1.2, 2.0, 1, k8, false);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0);
  }

  TEST_CASE("scaling probe recovers the Sobolev exponent") {
    const auto r = scaling_probe(2, 1.5, {1.0, 0.5, 0.25}, {2.0, 6.0, 10.0}, 256, 0.95 * pi);
    CHECK(r.expected_q == doctest::Approx(6.0));
    CHECK(r.exponent_error < 0.01);
    CHECK(r.recovered_q == doctest::Approx(6.0).epsilon(0.01));
    for (const auto& row : r.rows) CHECK(row.exponent_field == doctest::Approx(2.0 / row.q).epsilon(1e-3));
    CHECK(r.rows[1].mismatch < r.rows[0].mismatch);
    CHECK(r.rows[1].mismatch < r.rows[2].mismatch);
  }
}
