#pragma once

#include <string>
#include <vector>

#include "kmslab/ellipticity.hpp"

namespace kmslab::testing {

inline GaussianRational gi(long re, long im) { return {Rational(re), Rational(im)}; }

// Anti(a) over Q(i), row-major.
inline GVector complex_anti(const GVector& a) {
  const GaussianRational z(0);
  return {z, -a[2], a[1], a[2], z, -a[0], -a[1], a[0], z};
}

inline GVector complex_identity3(const GaussianRational& s) {
  const GaussianRational z(0);
  return {s, z, z, z, s, z, z, z, s};
}

struct ReferenceWitness {
  std::string label;
  std::string A;
  std::string B_part;
  std::string base;
  GVector element;  // element of ker(A), 3x3 row-major
  GVector xi;
};

// Hand-derived wave-cone pairs for n = 3.
inline std::vector<ReferenceWitness> reference_witnesses() {
  std::vector<ReferenceWitness> out;
  const GaussianRational o(0), one(1), m1(-1);
  out.push_back({"symmetric rank-one matrix against Curl", "skew", "Id", "curl",
                 {one, one, o, one, one, o, o, o, o}, {m1, m1, o}});
  out.push_back({"trace-free rank-one matrix against Curl", "tr", "Id", "curl",
                 {one, one, o, m1, m1, o, o, o, o}, {m1, m1, o}});
  out.push_back({"skew field against (skew+tr) Curl", "sym", "skewtr", "curl",
                 complex_anti({gi(1, 0), gi(0, 1), o}), {gi(0, -1), gi(1, 0), o}});
  {
    GVector e = complex_anti({gi(2, 2), o, o});
    const GVector id = complex_identity3(gi(-1, 1));
    for (std::size_t k = 0; k < 9; ++k) e[k] += id[k];
    out.push_back({"skew plus spherical against (skew+tr) Curl", "devsym", "skewtr", "curl", e, {o, gi(1, 0), gi(0, 1)}});
  }
  out.push_back({"symmetric trace-free against Curl", "skewtr", "Id", "curl",
                 {gi(0, -1), o, one, o, o, o, one, o, gi(0, 1)}, {one, o, gi(0, 1)}});
  out.push_back({"spherical field against tr inc", "dev", "tr", "inc", complex_identity3(one), {one, gi(0, 1), o}});
  return out;
}

struct PreparedWitness {
  PolyMatrix symbol;
  GVector xi;
  GVector coords;
};

inline PreparedWitness prepare(const ReferenceWitness& w) {
  const PartMap a = domain_part(w.A, w.base, 3);
  return {restricted_symbol(a, assembled_operator(w.B_part, w.base, 3)), w.xi, a.kernel_coordinates(w.element)};
}

}  // namespace kmslab::testing
