#pragma once

#include <random>

#include "kmslab/matrix_spaces.hpp"

namespace kmslab::testing {

inline Rational random_rational(std::mt19937_64& rng, long max_num = 9, long max_den = 7) {
  std::uniform_int_distribution<long> num(-max_num, max_num), den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline QVector random_vector(std::mt19937_64& rng, std::size_t d) {
  QVector v(d);
  for (auto& x : v) x = random_rational(rng);
  for (auto& x : v) x.canonicalize();
  return v;
}

inline Rational norm2(const QVector& v) { return frobenius_dot(v, v); }

}  // namespace kmslab::testing
