#include "kmslab/exact_matrix.hpp"

namespace kmslab {

namespace {

bool symmetric_elimination(QMatrix m, bool strict) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error("definiteness test needs a square matrix");
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    // Largest-index-free diagonal pivot with positive value.
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const int s = sgn(m(i, i));
      if (s < 0) return false;
      if (s > 0 && p == n) p = i;
    }
    if (p == n) {
      // All remaining diagonal entries vanish.
      if (strict) return false;
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!done[j] && sgn(m(i, j)) != 0) return false;
      }
      return true;
    }
    done[p] = true;
    const Rational inv = 1 / m(p, p);
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || sgn(m(i, p)) == 0) continue;
      const Rational f = m(i, p) * inv;
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j] && sgn(m(p, j)) != 0) m(i, j) -= f * m(p, j);
    }
  }
  return true;
}

}  // namespace

bool is_positive_semidefinite(QMatrix m) { return symmetric_elimination(std::move(m), false); }

bool is_positive_definite(QMatrix m) { return symmetric_elimination(std::move(m), true); }

Rational frobenius_dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw Error("Frobenius product of differently sized elements");
  Rational s = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (sgn(a[k]) != 0 && sgn(b[k]) != 0) s += a[k] * b[k];
  return s;
}

}  // namespace kmslab
