#include <doctest.h>

#include "kmslab/ellipticity.hpp"
#include "reference_witnesses.hpp"
#include "test_support.hpp"

using namespace kmslab;
using kmslab::testing::gi;

namespace {

PolyMatrix scalar_symbol(std::size_t n, int order, std::vector<std::pair<Exponent, long>> terms) {
  PolyMatrix m;
  m.n = n;
  m.order = order;
  m.rows = 1;
  m.cols = 1;
  for (auto& [alpha, c] : terms) {
    QMatrix q(1, 1);
    q(0, 0) = c;
    m.coeffs.emplace(alpha, q);
  }
  return m;
}

void check_table_invariants(const ClassificationTable& t) {
  const std::size_t n = t.n;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      const auto& v = t.cells[r][c];
      CAPTURE(t.rows[r]);
      CAPTURE(t.cols[c]);
      const PolyMatrix m = restricted_symbol(domain_part(t.rows[r], v.base, n), assembled_operator(t.cols[c], v.base, n));
      switch (v.status) {
        case Status::non_elliptic:
          REQUIRE(v.witness);
          CHECK(v.witness->is_real());
          CHECK(verify_witness(m, v.witness->xi, v.witness->v));
          break;
        case Status::R_elliptic_only:
          REQUIRE(v.witness);
          REQUIRE(v.certificate);
          CHECK_FALSE(v.witness->is_real());
          CHECK(verify_witness(m, v.witness->xi, v.witness->v));
          CHECK(v.certificate->method == "certified_grid");
          REQUIRE(v.certificate->margin);
          CHECK(sgn(*v.certificate->margin) > 0);
          break;
        case Status::C_elliptic:
          REQUIRE(v.certificate);
          CHECK(v.certificate->method == "elimination");
          CHECK_FALSE(v.witness);
          break;
        case Status::undecided:
          FAIL("undecided cell");
      }
    }
}

}  // namespace

TEST_SUITE("ellipticity") {
  TEST_CASE("known witness pairs verify exactly") {
    for (const auto& w : kmslab::testing::reference_witnesses()) {
      CAPTURE(w.label);
      const auto p = kmslab::testing::prepare(w);
      CHECK(verify_witness(p.symbol, p.xi, p.coords));
      GVector bumped = p.xi;
      bumped[0] += GaussianRational(1);
      CHECK_FALSE(verify_witness(p.symbol, bumped, p.coords));
      CHECK_THROWS_AS(verify_witness(p.symbol, p.xi, GVector(p.coords.size(), GaussianRational(0))), Error);
      CHECK_THROWS_AS(verify_witness(p.symbol, GVector(3, GaussianRational(0)), p.coords), Error);
    }
  }

  TEST_CASE("skew fields under Curl: symbol is <xi,a> 1 - xi (x) a") {
    const PolyMatrix m = restricted_symbol(PartMap::build(PartKind::sym, 3), base_operator("curl", 3));
    REQUIRE(m.cols == 3);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const QVector xi = kmslab::testing::random_vector(rng, 3), a = kmslab::testing::random_vector(rng, 3);
      const QVector got = m.at(xi).apply(a);
      const Rational dot = xi[0] * a[0] + xi[1] * a[1] + xi[2] * a[2];
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(got[i * 3 + j] == (i == j ? dot : Rational(0)) - xi[i] * a[j]);
    }
  }

  TEST_CASE("curl table matches golden cells") {
    const auto t = classification_table("curl", 3);
    CHECK(t.golden_cells() == 49);
    CHECK(t.mismatches() == 0);
    check_table_invariants(t);
    // single cells quoted as examples
    CHECK(classify("dev", "skew", "curl", 3).status == Status::C_elliptic);
    CHECK(classify("devsym", "sym", "curl", 3).status == Status::non_elliptic);
  }

  TEST_CASE("inc table matches golden cells") {
    const auto t = classification_table("inc", 3);
    CHECK(t.golden_cells() == 49);
    CHECK(t.mismatches() == 0);
    check_table_invariants(t);
    CHECK(classify("dev", "tr", "inc", 3).status == Status::R_elliptic_only);
  }

  TEST_CASE("row-wise divergence rows") {
    for (std::size_t n = 2; n <= 5; ++n) {
      CAPTURE(n);
      const auto t = classification_table("div", n);
      CHECK(t.mismatches() == 0);
      CHECK(t.cells[1][0].status == Status::C_elliptic);
      CHECK(t.cells[2][0].status == (n == 2 ? Status::C_elliptic : Status::non_elliptic));
      check_table_invariants(t);
    }
  }

  TEST_CASE("vacuous and zero part maps") {
    for (const char* b : {"Id", "dev", "sym", "skew", "tr"}) {
      const auto v = classify("Id", b, "curl", 3);
      CHECK(v.status == Status::C_elliptic);
      CHECK(v.certificate->slice_degree == 0);
    }
    // with A = 0 the verdict is the ellipticity of B itself
    CHECK(classify("zero", "Id", "grad", 3).status == Status::C_elliptic);
    CHECK(classify("zero", "Id", "grad", 2).status == Status::C_elliptic);
    CHECK(classify("zero", "Id", "curl", 3).status == Status::non_elliptic);
    CHECK(classify("zero", "Id", "div", 3).status == Status::non_elliptic);
    CHECK_THROWS_AS(classify("sym", "Id", "grad", 3), Error);
    CHECK_THROWS_AS(classify("dev", "sym", "div", 3), Error);
  }

  TEST_CASE("witness search beyond the enumeration box") {
    // 5 xi1 - 7 xi2 vanishes only on a line with large integer direction
    const PolyMatrix m = scalar_symbol(2, 1, {{{1, 0}, 5}, {{0, 1}, -7}});
    CHECK_FALSE(enumerate_real_witness(m));
    ClassifyOptions opt;
    const auto w = numeric_witness_search(m, false, opt);
    REQUIRE(w);
    CHECK(verify_witness(m, w->xi, w->v));
    const auto v = classify_symbol(m, opt);
    CHECK(v.status == Status::non_elliptic);
    REQUIRE(v.witness);
    CHECK(verify_witness(m, v.witness->xi, v.witness->v));
  }

  TEST_CASE("irrational zero set stays undecided") {
    // xi1^2 - 2 xi2^2 vanishes only on irrational lines
    const PolyMatrix m = scalar_symbol(2, 2, {{{2, 0}, 1}, {{0, 2}, -2}});
    ClassifyOptions opt;
    opt.numeric_restarts = 4;
    const auto v = classify_symbol(m, opt);
    CHECK(v.status == Status::undecided);
    CHECK_FALSE(v.witness);
  }

  TEST_CASE("complex-only zero set") {
    // xi1^2 + xi2^2: real elliptic, complex witness (1, i)
    const PolyMatrix m = scalar_symbol(2, 2, {{{2, 0}, 1}, {{0, 2}, 1}});
    const auto v = classify_symbol(m);
    CHECK(v.status == Status::R_elliptic_only);
    REQUIRE(v.witness);
    CHECK(verify_witness(m, v.witness->xi, v.witness->v));
    REQUIRE(v.certificate);
    REQUIRE(v.certificate->margin);
    // min of xi1^2 + xi2^2 on the unit circle is 1
    CHECK(v.certificate->margin->get_d() <= 1.0);
    CHECK(v.certificate->margin->get_d() > 0.1);
  }

  TEST_CASE("grid margin is a true lower bound") {
    const PolyMatrix m = restricted_symbol(PartMap::build(PartKind::sym, 3), assembled_operator("skewtr", "curl", 3));
    const auto r = certify_real_grid(m, {});
    REQUIRE(r.elliptic == Decision::yes);
    const double margin = r.certificate->margin->get_d();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> xi{g(rng), g(rng), g(rng)};
      const double s = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
      for (auto& x : xi) x /= s;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.at(xi));
      CHECK(svd.singularValues().minCoeff() >= margin);
    }
  }

  TEST_CASE("empty slice degree is monotone") {
    for (const char* a : {"dev", "sym", "devsym"}) {
      const PolyMatrix m = restricted_symbol(PartMap::build(a, 3), base_operator("curl", 3));
      const int d = first_empty_kernel_slice(m, 6);
      if (d < 0) continue;
      for (int e = d; e <= 6; ++e) CHECK(homogeneous_kernel_slice(m, e).empty());
    }
  }

  TEST_CASE("verdict json is stable and round-trips witnesses") {
    const auto a = classify("sym", "skewtr", "curl", 3).to_json();
    const auto b = classify("sym", "skewtr", "curl", 3).to_json();
    CHECK(a.dump() == b.dump());
    CHECK(a.at("status") == "R_only");
    const GVector xi = gvector_from_json(a.at("witness").at("xi"));
    const GVector v = gvector_from_json(a.at("witness").at("v"));
    const PolyMatrix m = restricted_symbol(PartMap::build("sym", 3), assembled_operator("skewtr", "curl", 3));
    CHECK(verify_witness(m, xi, v));
    CHECK(parse_status_code(status_code(Status::R_elliptic_only)) == Status::R_elliptic_only);
    CHECK(gi(1, -2) == parse_gaussian(to_string(gi(1, -2))));
  }
}
