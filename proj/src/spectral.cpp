#include "kmslab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <complex>
#include <mutex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace kmslab {

using cplx = std::complex<double>;

std::string field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::bump_times_const: return "bump_times_const";
    case FieldKind::band_limited_random: return "band_limited_random";
    case FieldKind::spherical_bump: return "spherical_bump";
    case FieldKind::anti_gradient_bump: return "anti_gradient_bump";
    case FieldKind::rigid_motion_gradient: return "rigid_motion_gradient";
    case FieldKind::plane_wave: return "plane_wave";
    case FieldKind::random_gradient: return "random_gradient";
  }
  return "?";
}

FieldKind parse_field_kind(const std::string& s) {
  for (FieldKind k : {FieldKind::bump_times_const, FieldKind::band_limited_random, FieldKind::spherical_bump,
                      FieldKind::anti_gradient_bump, FieldKind::rigid_motion_gradient, FieldKind::plane_wave,
                      FieldKind::random_gradient})
    if (field_kind_name(k) == s) return k;
  if (s == "counterexample_ex11") return FieldKind::spherical_bump;
  if (s == "counterexample_ex12") return FieldKind::anti_gradient_bump;
  throw Error("unknown field kind: " + s);
}

namespace {

// The planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t spectral_size(const GridDomain& d) { return d.points() / d.N * (d.N / 2 + 1); }

std::vector<int> fft_dims(const GridDomain& d) { return std::vector<int>(d.n, static_cast<int>(d.N)); }

// Component-major half spectra.
std::vector<cplx> forward(const GridField& f) {
  const GridDomain& d = f.domain;
  const std::size_t ns = spectral_size(d), dim = f.dim();
  std::vector<cplx> out(dim * ns);
  if (dim == 0) return out;
  auto dims = fft_dims(d);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft_r2c(static_cast<int>(d.n), dims.data(), static_cast<int>(dim),
                                  const_cast<double*>(f.values.data()), nullptr, static_cast<int>(dim), 1,
                                  reinterpret_cast<fftw_complex*>(out.data()), nullptr, 1, static_cast<int>(ns),
                                  FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Raw inverse (no 1/N^n); destroys `spec`.
GridField inverse(std::vector<cplx>& spec, const GridDomain& d, Space space, const std::string& provenance) {
  GridField out(d, space, provenance);
  const std::size_t ns = spectral_size(d), dim = space.dim();
  if (dim == 0) return out;
  auto dims = fft_dims(d);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft_c2r(static_cast<int>(d.n), dims.data(), static_cast<int>(dim),
                                  reinterpret_cast<fftw_complex*>(spec.data()), nullptr, 1, static_cast<int>(ns),
                                  out.values.data(), nullptr, static_cast<int>(dim), 1, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Signed wave vector of a half-spectrum index; nyquist set when any axis sits at N/2.
void wave_vector(const GridDomain& d, std::size_t s, std::vector<long>& k, bool& nyquist) {
  const long N = static_cast<long>(d.N), half = N / 2 + 1;
  k.assign(d.n, 0);
  nyquist = false;
  k[d.n - 1] = static_cast<long>(s % static_cast<std::size_t>(half));
  s /= static_cast<std::size_t>(half);
  if (k[d.n - 1] == N / 2) nyquist = true;
  for (std::size_t j = d.n - 1; j-- > 0;) {
    const long i = static_cast<long>(s % d.N);
    s /= d.N;
    if (i == N / 2) nyquist = true;
    k[j] = i <= N / 2 ? i : i - N;
  }
}

std::size_t spectral_index(const GridDomain& d, const std::vector<long>& k) {
  const long N = static_cast<long>(d.N);
  std::size_t s = 0;
  for (std::size_t j = 0; j + 1 < d.n; ++j) s = s * d.N + static_cast<std::size_t>((k[j] % N + N) % N);
  return s * (d.N / 2 + 1) + static_cast<std::size_t>(k[d.n - 1]);
}

// Adds coef e^{ikx} + conj(coef) e^{-ikx} to component c.
void add_mode(std::vector<cplx>& spec, const GridDomain& d, std::size_t c, std::vector<long> k, cplx coef) {
  const std::size_t ns = spectral_size(d);
  for (long x : k)
    if (std::labs(x) >= static_cast<long>(d.N) / 2) throw Error("mode exceeds the grid resolution");
  std::vector<long> neg(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) neg[j] = -k[j];
  const long last = k.back();
  if (last > 0) {
    spec[c * ns + spectral_index(d, k)] += coef;
  } else if (last < 0) {
    spec[c * ns + spectral_index(d, neg)] += std::conj(coef);
  } else {
    spec[c * ns + spectral_index(d, k)] += coef;
    spec[c * ns + spectral_index(d, neg)] += std::conj(coef);
  }
}

struct Mode {
  std::vector<long> k;
  std::size_t comp;
  cplx coef;
};

// Deterministic in (seed, max_mode, dim); independent of the grid.
std::vector<Mode> random_modes(std::size_t n, std::size_t dim, int max_mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Mode> out;
  std::vector<long> k(n, -max_mode);
  while (true) {
    auto first = std::find_if(k.begin(), k.end(), [](long x) { return x != 0; });
    if (first != k.end() && *first > 0) {
      double k2 = 0;
      for (long x : k) k2 += static_cast<double>(x * x);
      const double amp = 1.0 / (1.0 + k2);
      for (std::size_t c = 0; c < dim; ++c) {
        const double re = normal(rng), im = normal(rng);
        out.push_back({k, c, amp * cplx(re, im)});
      }
    }
    std::size_t j = 0;
    while (j < n && k[j] == max_mode) k[j++] = -max_mode;
    if (j == n) break;
    ++k[j];
  }
  return out;
}

std::vector<double> box_center(const GridDomain& d) { return std::vector<double>(d.n, std::numbers::pi); }

void check_support(const GridDomain& d, const std::vector<double>& center, double radius) {
  const double lo = d.interior_lo(), hi = d.interior_hi(), slack = 1e-12;
  for (double c : center)
    if (c - radius < lo - slack || c + radius > hi + slack)
      throw Error("bump support exceeds the interior subcube");
}

GridField bump_field(const GridDomain& d, Space space,
                     const std::function<void(const std::vector<double>&, double*)>& fill) {
  GridField out(d, space);
  for (std::size_t p = 0; p < d.points(); ++p) fill(d.coordinates(p), out.at(p));
  return out;
}

}  // namespace

double bump_value(const std::vector<double>& x, const std::vector<double>& center, double radius, double width_ratio) {
  double r2 = 0;
  for (std::size_t j = 0; j < x.size(); ++j) r2 += (x[j] - center[j]) * (x[j] - center[j]);
  if (r2 >= radius * radius) return 0.0;
  const double s = radius * width_ratio;
  return std::exp(-r2 / (2 * s * s));
}

std::vector<double> bump_gradient(const std::vector<double>& x, const std::vector<double>& center, double radius,
                                  double width_ratio) {
  const double v = bump_value(x, center, radius, width_ratio), s = radius * width_ratio;
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = -(x[j] - center[j]) / (s * s) * v;
  return g;
}

GridField make_field(FieldKind kind, const GridDomain& d, const FieldParams& prm) {
  d.validate();
  const std::vector<double> center = prm.center.empty() ? box_center(d) : prm.center;
  if (center.size() != d.n) throw Error("bump centre has wrong dimension");
  GridField out;
  switch (kind) {
    case FieldKind::bump_times_const: {
      check_support(d, center, prm.radius);
      if (prm.value.size() != prm.space.dim()) throw Error("constant has wrong size");
      out = bump_field(d, prm.space, [&](const std::vector<double>& x, double* v) {
        const double phi = bump_value(x, center, prm.radius, prm.width_ratio);
        for (std::size_t c = 0; c < prm.value.size(); ++c) v[c] = phi * prm.value[c];
      });
      break;
    }
    case FieldKind::spherical_bump: {
      check_support(d, center, prm.radius);
      out = bump_field(d, {d.n, d.n}, [&](const std::vector<double>& x, double* v) {
        const double phi = bump_value(x, center, prm.radius, prm.width_ratio);
        for (std::size_t i = 0; i < d.n; ++i) v[i * d.n + i] = phi;
      });
      break;
    }
    case FieldKind::anti_gradient_bump: {
      if (d.n != 3) throw Error("Anti needs n = 3");
      check_support(d, center, prm.radius);
      // spectral gradient of the sampled bump, so Curl P is symmetric to roundoff
      const GridField psi = bump_field(d, {1, 1}, [&](const std::vector<double>& x, double* v) {
        v[0] = bump_value(x, center, prm.radius, prm.width_ratio);
      });
      const GridField g = gradient_stack(psi);
      out = GridField(d, {3, 3});
      for (std::size_t p = 0; p < d.points(); ++p) {
        const double* gr = g.at(p);
        double* v = out.at(p);
        v[1] = -gr[2];
        v[2] = gr[1];
        v[3] = gr[2];
        v[5] = -gr[0];
        v[6] = -gr[1];
        v[7] = gr[0];
      }
      break;
    }
    case FieldKind::rigid_motion_gradient: {
      if (d.n != 3) throw Error("rigid motions are set up for n = 3");
      std::vector<double> a = prm.value;
      if (a.empty()) {
        std::mt19937_64 rng(prm.seed);
        std::normal_distribution<double> normal;
        a = {normal(rng), normal(rng), normal(rng)};
      }
      if (a.size() != 3) throw Error("rigid motion needs an axial vector of length 3");
      out = GridField(d, {3, 3});
      const double m[9] = {0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0};
      for (std::size_t p = 0; p < d.points(); ++p) std::copy(m, m + 9, out.at(p));
      break;
    }
    case FieldKind::plane_wave: {
      if (prm.wave.size() != d.n) throw Error("plane wave needs an integer wave vector of length n");
      if (prm.value.size() != prm.space.dim()) throw Error("plane wave amplitude has wrong size");
      out = GridField(d, prm.space);
      for (std::size_t p = 0; p < d.points(); ++p) {
        const auto x = d.coordinates(p);
        double phase = 0;
        for (std::size_t j = 0; j < d.n; ++j) phase += prm.wave[j] * x[j];
        const double c = std::cos(phase);
        for (std::size_t k = 0; k < prm.value.size(); ++k) out.at(p)[k] = prm.value[k] * c;
      }
      break;
    }
    case FieldKind::band_limited_random: {
      if (8 * prm.max_mode > static_cast<int>(d.N)) throw Error("band limit must stay below N/8");
      std::vector<cplx> spec(prm.space.dim() * spectral_size(d));
      for (const auto& m : random_modes(d.n, prm.space.dim(), prm.max_mode, prm.seed)) add_mode(spec, d, m.comp, m.k, m.coef);
      out = inverse(spec, d, prm.space, "");
      break;
    }
    case FieldKind::random_gradient: {
      if (8 * prm.max_mode > static_cast<int>(d.N)) throw Error("band limit must stay below N/8");
      const std::size_t n = d.n;
      std::vector<cplx> spec(n * n * spectral_size(d));
      for (const auto& m : random_modes(n, n, prm.max_mode, prm.seed))
        for (std::size_t j = 0; j < n; ++j)
          if (m.k[j] != 0) add_mode(spec, d, m.comp * n + j, m.k, cplx(0, static_cast<double>(m.k[j])) * m.coef);
      out = inverse(spec, d, {n, n}, "");
      break;
    }
  }
  out.provenance = field_kind_name(kind);
  if (kind == FieldKind::band_limited_random || kind == FieldKind::random_gradient)
    out.provenance += ":seed=" + std::to_string(prm.seed);
  return out;
}

double high_frequency_fraction(const GridField& p) {
  const auto spec = forward(p);
  const GridDomain& d = p.domain;
  const std::size_t ns = spectral_size(d);
  const long cut = static_cast<long>(d.N) / 3;
  double total = 0, high = 0;
  std::vector<long> k;
  bool nyq = false;
  for (std::size_t s = 0; s < ns; ++s) {
    wave_vector(d, s, k, nyq);
    const double w = (k.back() == 0 || k.back() == static_cast<long>(d.N) / 2) ? 1.0 : 2.0;
    bool top = false;
    for (long x : k) top = top || std::labs(x) > cut;
    for (std::size_t c = 0; c < p.dim(); ++c) {
      const double e = w * std::norm(spec[c * ns + s]);
      total += e;
      if (top) high += e;
    }
  }
  return total > 0 ? high / total : 0.0;
}

GridField apply_operator_fft(const HomOperator& op, const GridField& p) {
  const GridDomain& d = p.domain;
  if (op.domain.dim() != p.dim()) throw Error("operator " + op.label + " does not act on this field");
  if (op.n != d.n) throw Error("operator dimension differs from the grid dimension");
  struct Term {
    std::size_t w, c;
    Exponent alpha;
    double coef;
  };
  std::vector<Term> terms;
  for (const auto& [alpha, m] : op.coeffs)
    for (std::size_t w = 0; w < m.rows(); ++w)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (sgn(m(w, c)) != 0) terms.push_back({w, c, alpha, m(w, c).get_d()});
  const std::size_t ns = spectral_size(d), wdim = op.codomain.dim();
  auto in = forward(p);
  // energy check on the input spectrum
  double total = 0, high = 0;
  const long cut = static_cast<long>(d.N) / 3;
  std::vector<cplx> out(wdim * ns);
  cplx unit(1, 0);
  for (int o = 0; o < op.order; ++o) unit *= cplx(0, 1);
  unit /= static_cast<double>(d.points());
  std::vector<long> k;
  std::vector<double> xi(d.n);
  bool nyq = false;
  for (std::size_t s = 0; s < ns; ++s) {
    wave_vector(d, s, k, nyq);
    const double wgt = (k.back() == 0 || k.back() == static_cast<long>(d.N) / 2) ? 1.0 : 2.0;
    bool top = false;
    for (long x : k) top = top || std::labs(x) > cut;
    for (std::size_t c = 0; c < p.dim(); ++c) {
      const double e = wgt * std::norm(in[c * ns + s]);
      total += e;
      if (top) high += e;
    }
    if (nyq) continue;
    for (std::size_t j = 0; j < d.n; ++j) xi[j] = static_cast<double>(k[j]);
    for (const auto& t : terms) {
      double mono = t.coef;
      for (std::size_t j = 0; j < d.n; ++j)
        for (int e = 0; e < t.alpha[j]; ++e) mono *= xi[j];
      if (mono != 0) out[t.w * ns + s] += mono * in[t.c * ns + s];
    }
  }
  for (auto& v : out) v *= unit;
  GridField result = inverse(out, d, op.codomain, op.label + "(" + p.provenance + ")");
  result.warnings = p.warnings;
  if (total > 0 && high / total > 1e-8) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "aliasing: top third of the spectrum holds %.3e of the energy at N=%zu", high / total,
                  d.N);
    result.warnings.emplace_back(buf);
  }
  return result;
}

GridField gradient_stack(const GridField& p) {
  const HomOperator g = build_operator(OperatorKind::grad, p.domain.n, p.dim());
  return apply_operator_fft(g, p);
}

double lebesgue_norm(const GridField& p, double q, Region region) {
  if (q < 1) throw Error("Lebesgue exponent must be >= 1");
  const std::size_t dim = p.dim();
  double acc = 0;
  const bool two = q == 2.0;
  for (std::size_t pt = 0; pt < p.points(); ++pt) {
    if (region == Region::interior && !p.domain.in_interior(pt)) continue;
    const double* v = p.at(pt);
    double s = 0;
    for (std::size_t c = 0; c < dim; ++c) s += v[c] * v[c];
    acc += two ? s : std::pow(s, q / 2);
  }
  return std::pow(acc * p.domain.cell_volume(), 1.0 / q);
}

double sobolev_seminorm(const GridField& p, int m, double q, Region region) {
  if (m < 0 || m > 2) throw Error("seminorm order must be 0, 1 or 2");
  if (m == 0) return lebesgue_norm(p, q, region);
  GridField g = gradient_stack(p);
  if (m == 2) g = gradient_stack(g);
  return lebesgue_norm(g, q, region);
}

double sobolev_exponent(std::size_t n, double p) {
  if (!(p > 1 && p < static_cast<double>(n))) throw Error("exponent p must lie in (1, n)");
  return static_cast<double>(n) * p / (static_cast<double>(n) - p);
}

void finish_ratio(InequalityReport& r, const Thresholds& t) {
  const double rhs = r.rhs();
  const bool rhs_zero = rhs < t.eps_zero * r.field_norm, lhs_pos = r.lhs > t.eps_pos * r.field_norm;
  r.infinite = rhs_zero && lhs_pos;
  r.degenerate = rhs_zero && !lhs_pos;
  r.ratio = r.infinite ? std::numeric_limits<double>::infinity() : (r.degenerate ? 0.0 : r.lhs / rhs);
}

InequalityReport kms1_from_parts(const GridField& p, const GridField& ap, const GridField& bp, int order,
                                 double exponent_p, const Thresholds& t) {
  const std::size_t n = p.domain.n;
  const double ps = sobolev_exponent(n, exponent_p);
  InequalityReport r;
  r.mode = "KMS1";
  r.field = p.provenance;
  r.p = exponent_p;
  r.q = ps;
  r.N = p.domain.N;
  r.field_norm = lebesgue_norm(p, ps);
  r.lhs = sobolev_seminorm(p, order - 1, ps);
  r.rhs_part = sobolev_seminorm(ap, order - 1, ps);
  r.rhs_operator = lebesgue_norm(bp, exponent_p);
  r.warnings = p.warnings;
  for (const auto& w : bp.warnings)
    if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
  finish_ratio(r, t);
  return r;
}

InequalityReport kms1_ratio(const GridField& p, const PartMap& a, const HomOperator& b, double exponent_p,
                            const Thresholds& t) {
  if (a.domain() != p.space && a.domain().dim() != p.dim()) throw Error("part map does not act on this field");
  const GridField ap = apply_pointwise(a.matrix(), p, a.codomain());
  const GridField bp = apply_operator_fft(b, p);
  InequalityReport r = kms1_from_parts(p, ap, bp, b.order, exponent_p, t);
  r.A = a.name();
  r.B = b.label;
  return r;
}

Projection project_onto_span(const std::vector<double>& target, const std::vector<std::vector<double>>& basis,
                             std::size_t dim, double cell_volume, double q) {
  if (q < 1) throw Error("projection exponent must be >= 1");
  const std::size_t m = basis.size(), pts = dim ? target.size() / dim : 0;
  Projection out;
  out.coefficients.assign(m, 0.0);
  auto residual_norms = [&](const Eigen::VectorXd& c) {
    std::vector<double> r(pts);
    for (std::size_t p = 0; p < pts; ++p) {
      double s = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        double v = target[p * dim + k];
        for (std::size_t i = 0; i < m; ++i) v -= c[static_cast<Eigen::Index>(i)] * basis[i][p * dim + k];
        s += v * v;
      }
      r[p] = std::sqrt(s);
    }
    return r;
  };
  auto lq = [&](const std::vector<double>& r) {
    double acc = 0;
    for (double x : r) acc += std::pow(x, q);
    return std::pow(acc * cell_volume, 1.0 / q);
  };
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  if (m == 0) {
    out.residual = lq(residual_norms(c));
    return out;
  }
  std::vector<double> weights(pts, 1.0);
  auto solve = [&]() {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t p = 0; p < pts; ++p)
      for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t idx = p * dim + k;
        for (std::size_t i = 0; i < m; ++i) {
          const double bi = weights[p] * basis[i][idx];
          if (bi == 0) continue;
          rhs[static_cast<Eigen::Index>(i)] += bi * target[idx];
          for (std::size_t j = 0; j < m; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += bi * basis[j][idx];
        }
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    lu.setThreshold(1e-13);
    if (lu.rank() < static_cast<Eigen::Index>(m)) throw Error("rank-deficient Gram matrix in kernel projection");
    return Eigen::VectorXd(lu.solve(rhs));
  };
  c = solve();
  out.iterations = 1;
  double target_max = 0;
  for (double x : target) target_max = std::max(target_max, std::fabs(x));
  if (q != 2.0) {
    for (int it = 0; it < 50; ++it) {
      const auto r = residual_norms(c);
      const double rmax = *std::max_element(r.begin(), r.end());
      if (rmax <= 1e-14 * target_max) break;  // exact fit
      const double floor = 1e-12 * rmax;
      double wmax = 0;
      for (std::size_t p = 0; p < pts; ++p) {
        weights[p] = std::pow(std::max(r[p], floor), q - 2);
        wmax = std::max(wmax, weights[p]);
      }
      for (auto& w : weights) w /= wmax;
      const Eigen::VectorXd next = solve();
      ++out.iterations;
      const double change = (next - c).norm(), scale = std::max(next.norm(), 1e-300);
      c = next;
      if (change <= 1e-9 * scale) break;
    }
  }
  for (std::size_t i = 0; i < m; ++i) out.coefficients[i] = c[static_cast<Eigen::Index>(i)];
  out.residual = lq(residual_norms(c));
  return out;
}

namespace {

// D^j of a polynomial field, components ordered (c, d1, ..., dj).
PolyField derivative_stack(const PolyField& f, int j) {
  PolyField cur = f;
  for (int o = 0; o < j; ++o) {
    PolyField next(cur.nvars, cur.dim(), cur.nvars);
    for (std::size_t c = 0; c < cur.dim(); ++c)
      for (std::size_t d = 0; d < cur.nvars; ++d) next.comps[c * cur.nvars + d] = cur.comps[c].derivative(d);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

Projection project_onto_kernel(const GridField& djp, const KernelBasis& k, int j, double q, Region region) {
  const GridDomain& d = djp.domain;
  std::vector<std::size_t> pts;
  if (region == Region::interior) pts = d.interior_points();
  else for (std::size_t p = 0; p < d.points(); ++p) pts.push_back(p);
  const std::size_t dim = djp.dim();
  std::vector<double> target(pts.size() * dim);
  for (std::size_t i = 0; i < pts.size(); ++i) std::copy(djp.at(pts[i]), djp.at(pts[i]) + dim, target.begin() + i * dim);
  std::vector<std::vector<double>> basis;
  for (const auto& e : k.elements) {
    const PolyField de = derivative_stack(e, j);
    if (de.dim() != dim) throw Error("kernel element does not match the derivative stack");
    std::vector<double> vals(pts.size() * dim);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto v = de.evaluate(d.coordinates(pts[i]));
      std::copy(v.begin(), v.end(), vals.begin() + i * dim);
    }
    // elements that vanish after differentiation carry no information
    if (std::any_of(vals.begin(), vals.end(), [](double x) { return x != 0; })) basis.push_back(std::move(vals));
  }
  // drop dependent columns (D^j can merge elements)
  std::vector<std::vector<double>> independent;
  for (auto& b : basis) {
    independent.push_back(b);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(independent.size()));
    for (std::size_t c = 0; c < independent.size(); ++c)
      for (std::size_t r = 0; r < b.size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = independent[c][r];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(independent.size())) independent.pop_back();
  }
  return project_onto_span(target, independent, dim, d.cell_volume(), q);
}

InequalityReport kms2_ratio(const GridField& p, const PartMap& a, const HomOperator& b, double exponent_p, double q,
                            int j, const KernelBasis& k, bool normalized, const Thresholds& t) {
  const std::size_t n = p.domain.n;
  const int order = b.order;
  if (j < 0 || j >= order) throw Error("derivative order j must satisfy 0 <= j < k");
  const double kp = (order - j) * exponent_p;
  if (!(exponent_p > 1) || !(kp < static_cast<double>(n))) throw Error("exponent window violated: need (k-j)p < n");
  const double qmax = static_cast<double>(n) * exponent_p / (static_cast<double>(n) - kp);
  if (!(q > 1 && q <= qmax * (1 + 1e-12))) throw Error("exponent window violated: need 1 < q <= np/(n-(k-j)p)");
  auto dj = [&](GridField f) {
    for (int o = 0; o < j; ++o) f = gradient_stack(f);
    return f;
  };
  InequalityReport r;
  r.A = a.name();
  r.B = b.label;
  r.mode = normalized ? "normalized" : "KMS2";
  r.field = p.provenance;
  r.p = exponent_p;
  r.q = q;
  r.j = j;
  r.N = p.domain.N;
  const GridField djp = dj(p);
  r.field_norm = lebesgue_norm(djp, q, Region::interior);
  const GridField bp = apply_operator_fft(b, p);
  r.rhs_operator = lebesgue_norm(bp, exponent_p, Region::interior);
  if (normalized) {
    const GridField kp_field = dj(apply_pointwise(a.projector_kernel(), p, p.space));
    const GridField perp = dj(apply_pointwise(a.projector_complement(), p, p.space));
    std::vector<double> mean(djp.dim(), 0.0);
    const auto pts = p.domain.interior_points();
    for (std::size_t pt : pts)
      for (std::size_t c = 0; c < djp.dim(); ++c) mean[c] += kp_field.at(pt)[c];
    for (auto& x : mean) x /= static_cast<double>(pts.size());
    GridField shifted = djp;
    for (std::size_t pt = 0; pt < shifted.points(); ++pt)
      for (std::size_t c = 0; c < shifted.dim(); ++c) shifted.at(pt)[c] -= mean[c];
    r.lhs = lebesgue_norm(shifted, q, Region::interior);
    r.rhs_part = lebesgue_norm(perp, q, Region::interior);
  } else {
    r.lhs = project_onto_kernel(djp, k, j, q, Region::interior).residual;
    r.rhs_part = lebesgue_norm(dj(apply_pointwise(a.matrix(), p, a.codomain())), q, Region::interior);
  }
  r.warnings = bp.warnings;
  finish_ratio(r, t);
  return r;
}

double fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("power fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScalingReport scaling_probe(std::size_t n, double p, const std::vector<double>& lambdas,
                            const std::vector<double>& q_list, std::size_t N, double radius) {
  ScalingReport rep;
  rep.n = n;
  rep.p = p;
  rep.order = 1;
  rep.N = N;
  rep.lambdas = lambdas;
  rep.expected_q = sobolev_exponent(n, p);
  // wide interior: the largest bump nearly fills the box
  GridDomain d{n, N, 0.999};
  d.validate();
  const HomOperator grad = build_operator(OperatorKind::grad, n, 1);
  std::vector<std::vector<double>> field_norms(q_list.size());
  std::vector<double> op_norms;
  for (double lam : lambdas) {
    FieldParams prm;
    prm.radius = radius * lam;
    prm.space = {1, 1};
    prm.value = {1.0};
    const GridField f = make_field(FieldKind::bump_times_const, d, prm);
    for (std::size_t i = 0; i < q_list.size(); ++i) field_norms[i].push_back(lebesgue_norm(f, q_list[i]));
    op_norms.push_back(lebesgue_norm(apply_operator_fft(grad, f), p));
  }
  const double eb = fit_power(lambdas, op_norms);
  const double analytic = static_cast<double>(n) / p - 1.0;
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    ScalingRow row;
    row.q = q_list[i];
    row.exponent_field = fit_power(lambdas, field_norms[i]);
    row.exponent_operator = eb;
    row.mismatch = std::fabs(row.exponent_field - eb);
    rep.rows.push_back(row);
  }
  rep.recovered_q = static_cast<double>(n) / eb;
  rep.exponent_error = std::fabs(eb - analytic) / analytic;
  return rep;
}

nlohmann::json InequalityReport::to_json() const {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf"); };
  return {{"A", A},
          {"B", B},
          {"mode", mode},
          {"field", field},
          {"p", p},
          {"q", q},
          {"j", j},
          {"N", N},
          {"field_norm", field_norm},
          {"lhs", lhs},
          {"rhs_part", rhs_part},
          {"rhs_operator", rhs_operator},
          {"ratio", num(ratio)},
          {"infinite", infinite},
          {"degenerate", degenerate},
          {"warnings", warnings}};
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"q", r.q},
                  {"exponent_field", r.exponent_field},
                  {"exponent_operator", r.exponent_operator},
                  {"mismatch", r.mismatch}});
  return {{"n", n},         {"p", p},
          {"order", order}, {"N", N},
          {"lambdas", lambdas}, {"rows", rs},
          {"recovered_q", recovered_q}, {"expected_q", expected_q},
          {"exponent_error", exponent_error}};
}

}  // namespace kmslab
