#include "kmslab/ellipticity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "kmslab/embedded_data.hpp"
#include "kmslab/parallel.hpp"

namespace kmslab {

std::string status_code(Status s) {
  switch (s) {
    case Status::C_elliptic: return "C";
    case Status::R_elliptic_only: return "R_only";
    case Status::non_elliptic: return "none";
    case Status::undecided: return "undecided";
  }
  return "undecided";
}

Status parse_status_code(const std::string& code) {
  if (code == "C") return Status::C_elliptic;
  if (code == "R_only") return Status::R_elliptic_only;
  if (code == "none") return Status::non_elliptic;
  if (code == "undecided") return Status::undecided;
  throw Error("unknown status code: " + code);
}

std::string status_name(Status s) {
  switch (s) {
    case Status::C_elliptic: return "C_elliptic";
    case Status::R_elliptic_only: return "R_elliptic_only";
    case Status::non_elliptic: return "non_elliptic";
    case Status::undecided: return "undecided";
  }
  return "undecided";
}

bool Witness::is_real() const {
  return std::all_of(xi.begin(), xi.end(), [](const auto& x) { return x.is_real(); }) &&
         std::all_of(v.begin(), v.end(), [](const auto& x) { return x.is_real(); });
}

std::size_t Witness::bit_size() const {
  std::size_t b = 0;
  for (const auto& x : xi) b += kmslab::bit_size(x);
  for (const auto& x : v) b += kmslab::bit_size(x);
  return b;
}

std::string to_string(const GVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + ")";
}

nlohmann::json gvector_to_json(const GVector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : v) j.push_back(to_string(x));
  return j;
}

GVector gvector_from_json(const nlohmann::json& j) {
  GVector v;
  for (const auto& x : j) v.push_back(parse_gaussian(x.is_string() ? x.get<std::string>() : x.dump()));
  return v;
}

bool verify_witness(const PolyMatrix& m, const GVector& xi, const GVector& v) {
  if (xi.size() != m.n) throw Error("witness frequency has wrong dimension");
  if (v.size() != m.cols) throw Error("witness vector has wrong dimension");
  if (std::all_of(xi.begin(), xi.end(), [](const auto& x) { return x.is_zero(); }))
    throw Error("witness frequency must be nonzero");
  if (std::all_of(v.begin(), v.end(), [](const auto& x) { return x.is_zero(); }))
    throw Error("witness vector must be nonzero");
  for (const auto& x : m.at(xi).apply(v))
    if (!x.is_zero()) return false;
  return true;
}

namespace {

// Clears denominators and common integer factors; first nonzero entry gets a positive leading part.
GVector make_primitive(GVector v) {
  mpz_class l = 1;
  for (const auto& x : v) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.re.get_den_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.im.get_den_mpz_t());
  }
  for (auto& x : v) x *= GaussianRational(Rational(l));
  mpz_class g = 0;
  for (const auto& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.re.get_num_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.im.get_num_mpz_t());
  }
  if (g != 0 && g != 1)
    for (auto& x : v) x /= GaussianRational(Rational(g));
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    const int s = sgn(x.re) != 0 ? sgn(x.re) : sgn(x.im);
    if (s < 0)
      for (auto& y : v) y = -y;
    break;
  }
  return v;
}

GVector to_gvector(const QVector& q) {
  GVector g;
  g.reserve(q.size());
  for (const auto& x : q) g.emplace_back(x);
  return g;
}

std::optional<GVector> smallest_null_vector(const std::vector<GVector>& basis) {
  std::optional<GVector> best;
  std::size_t best_bits = 0;
  for (const auto& b : basis) {
    GVector p = make_primitive(b);
    std::size_t bits = 0;
    for (const auto& x : p) bits += bit_size(x);
    if (!best || bits < best_bits) {
      best = std::move(p);
      best_bits = bits;
    }
  }
  return best;
}

std::optional<GVector> exact_null_vector(const PolyMatrix& m, const GVector& xi) {
  bool real = std::all_of(xi.begin(), xi.end(), [](const auto& x) { return x.is_real(); });
  std::vector<GVector> basis;
  if (real) {
    QVector q;
    for (const auto& x : xi) q.push_back(x.re);
    for (const auto& b : nullspace(m.at(q))) basis.push_back(to_gvector(b));
  } else {
    basis = nullspace(m.at(xi));
  }
  return smallest_null_vector(basis);
}

double sigma_min(const Eigen::MatrixXd& a, double* sigma_max = nullptr) {
  if (a.cols() > a.rows()) {
    if (sigma_max) *sigma_max = a.norm();
    return 0.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (sigma_max) *sigma_max = s.size() ? s(0) : 0.0;
  return s.size() ? s(s.size() - 1) : 0.0;
}

double sigma_min(const Eigen::MatrixXcd& a, double* sigma_max = nullptr) {
  if (a.cols() > a.rows()) {
    if (sigma_max) *sigma_max = a.norm();
    return 0.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  if (sigma_max) *sigma_max = s.size() ? s(0) : 0.0;
  return s.size() ? s(s.size() - 1) : 0.0;
}

bool nearly_singular(double smin, double smax) { return smin <= 1e-9 * std::max(1.0, smax); }

void consider(std::optional<Witness>& best, Witness cand) {
  if (!best || cand.bit_size() < best->bit_size()) best = std::move(cand);
}

std::vector<std::vector<long>> small_integer_frequencies(std::size_t n) {
  const long r = n <= 4 ? 2 : 1;
  std::vector<std::vector<long>> out;
  std::vector<long> cur(n, -r);
  while (true) {
    long g = 0;
    for (long x : cur) g = std::gcd(g, std::labs(x));
    auto first = std::find_if(cur.begin(), cur.end(), [](long x) { return x != 0; });
    if (g == 1 && first != cur.end() && *first > 0) out.push_back(cur);
    std::size_t k = 0;
    while (k < n && cur[k] == r) cur[k++] = -r;
    if (k == n) break;
    ++cur[k];
  }
  auto bits = [](const std::vector<long>& v) {
    std::size_t b = 0;
    for (long x : v) b += bit_size(Rational(x));
    return b;
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return bits(a) < bits(b); });
  return out;
}

}  // namespace

std::optional<Witness> enumerate_real_witness(const PolyMatrix& m) {
  if (m.cols == 0) return std::nullopt;
  std::optional<Witness> best;
  for (const auto& z : small_integer_frequencies(m.n)) {
    std::vector<double> xd(z.begin(), z.end());
    double smax = 0;
    const double smin = sigma_min(m.at(xd), &smax);
    if (!nearly_singular(smin, smax)) continue;
    GVector xi;
    for (long x : z) xi.emplace_back(Rational(x));
    if (auto v = exact_null_vector(m, xi)) consider(best, {xi, *v});
  }
  return best;
}

std::optional<Witness> enumerate_complex_witness(const PolyMatrix& m) {
  if (m.cols == 0) return std::nullopt;
  const std::vector<GaussianRational> units = {
      {0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  std::optional<Witness> best;
  const std::size_t n = m.n;
  for (std::size_t lead = 0; lead < n; ++lead) {
    // xi = (0, ..., 0, 1, *, ..., *)
    const std::size_t rest = n - lead - 1;
    std::size_t total = 1;
    for (std::size_t k = 0; k < rest; ++k) total *= units.size();
    for (std::size_t code = 0; code < total; ++code) {
      GVector xi(n, GaussianRational(0));
      xi[lead] = GaussianRational(1);
      std::size_t c = code;
      for (std::size_t k = 0; k < rest; ++k) {
        xi[lead + 1 + k] = units[c % units.size()];
        c /= units.size();
      }
      if (std::all_of(xi.begin(), xi.end(), [](const auto& x) { return x.is_real(); })) continue;
      std::vector<std::complex<double>> xd;
      for (const auto& x : xi) xd.push_back(to_complex(x));
      double smax = 0;
      const double smin = sigma_min(m.at(xd), &smax);
      if (!nearly_singular(smin, smax)) continue;
      if (auto v = exact_null_vector(m, xi)) consider(best, {xi, *v});
    }
  }
  return best;
}

namespace {

double objective(const PolyMatrix& m, const std::vector<double>& x, bool complex_freq) {
  double norm2 = 0;
  for (double v : x) norm2 += v * v;
  if (norm2 == 0) return 1e300;
  const double scale = std::pow(std::sqrt(norm2), m.order);
  if (complex_freq) {
    std::vector<std::complex<double>> xi(m.n);
    for (std::size_t j = 0; j < m.n; ++j) xi[j] = {x[j], x[m.n + j]};
    return sigma_min(m.at(xi)) / scale;
  }
  return sigma_min(m.at(x)) / scale;
}

}  // namespace

std::optional<Witness> numeric_witness_search(const PolyMatrix& m, bool complex_freq, const ClassifyOptions& opt) {
  if (m.cols == 0) return std::nullopt;
  std::mt19937_64 rng(opt.seed * 7919 + (complex_freq ? 1 : 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t dim = complex_freq ? 2 * m.n : m.n;
  std::optional<Witness> best;
  for (int restart = 0; restart < opt.numeric_restarts; ++restart) {
    std::vector<double> x(dim);
    for (auto& v : x) v = normal(rng);
    double f = objective(m, x, complex_freq);
    double step = 0.25;
    for (int it = 0; it < 20000 && step > 1e-13 && f > 1e-13; ++it) {
      bool improved = false;
      for (std::size_t j = 0; j < dim && !improved; ++j)
        for (double sgn_step : {step, -step}) {
          std::vector<double> y = x;
          y[j] += sgn_step;
          const double fy = objective(m, y, complex_freq);
          if (fy < f) {
            x = std::move(y);
            f = fy;
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
    if (f > 1e-8) continue;
    // Normalize by the entry of largest modulus, then snap.
    std::vector<std::complex<double>> xi(m.n);
    for (std::size_t j = 0; j < m.n; ++j) xi[j] = complex_freq ? std::complex<double>(x[j], x[m.n + j]) : x[j];
    std::size_t big = 0;
    for (std::size_t j = 1; j < m.n; ++j)
      if (std::abs(xi[j]) > std::abs(xi[big])) big = j;
    const std::complex<double> pivot = xi[big];
    for (auto& v : xi) v /= pivot;
    for (std::int64_t cap = 1; cap <= opt.max_denominator; cap *= 10) {
      GVector snapped;
      for (const auto& v : xi)
        snapped.emplace_back(approximate_rational(v.real(), cap),
                             complex_freq ? approximate_rational(v.imag(), cap) : Rational(0));
      if (auto v = exact_null_vector(m, snapped)) {
        consider(best, {snapped, *v});
        break;
      }
    }
  }
  return best;
}

namespace {

Rational rational_below(double x) {
  Rational r = approximate_rational(x, 1 << 16);
  while (r.get_d() > x) r *= Rational(65535, 65536);
  return r;
}

}  // namespace

CheckResult certify_real_grid(const PolyMatrix& m, const ClassifyOptions& opt) {
  CheckResult out;
  if (m.cols == 0) {
    out.elliptic = Decision::yes;
    out.certificate = Certificate{"certified_grid", std::nullopt, -1, 0};
    return out;
  }
  const std::size_t n = m.n;
  // Upper bounds of the Frobenius norms of the coefficient matrices.
  std::vector<std::pair<Exponent, Rational>> norms;
  std::vector<std::pair<Exponent, double>> norms_d;
  for (const auto& [alpha, c] : m.coeffs) {
    Rational s = 0;
    for (const auto& x : c.data()) s += x * x;
    const Rational up = sqrt_upper(s);
    norms.emplace_back(alpha, up);
    norms_d.emplace_back(alpha, up.get_d());
  }
  struct Cell {
    QVector center;  // full frequency, fixed coordinate = 1
    Rational w;
  };
  std::optional<Rational> min_bound;
  std::size_t processed = 0, accepted = 0;
  for (std::size_t face = 0; face < n; ++face) {
    std::vector<Cell> stack;
    QVector c0(n, 0);
    c0[face] = 1;
    stack.push_back({c0, 1});
    while (!stack.empty()) {
      Cell cell = std::move(stack.back());
      stack.pop_back();
      if (++processed > opt.max_grid_cells) return out;
      std::vector<double> xd;
      for (const auto& x : cell.center) xd.push_back(x.get_d());
      const double wd = cell.w.get_d();
      double smax = 0;
      const double smin = sigma_min(m.at(xd), &smax);
      if (nearly_singular(smin, smax)) {
        GVector xi = to_gvector(cell.center);
        if (auto v = exact_null_vector(m, xi)) {
          out.elliptic = Decision::no;
          out.witness = Witness{xi, *v};
          return out;
        }
      }
      double lip = 0;
      for (const auto& [alpha, nf] : norms_d) {
        double with = 1, without = 1;
        for (std::size_t j = 0; j < n; ++j) {
          const double a = std::fabs(xd[j]), w = j == face ? 0.0 : wd;
          with *= std::pow(a + w, alpha[j]);
          without *= std::pow(a, alpha[j]);
        }
        lip += nf * (with - without);
      }
      bool done = false;
      if (0.95 * smin - lip > 1e-3 * smin) {
        const Rational s = rational_below(0.97 * smin);
        const QMatrix mq = m.at(cell.center);
        QMatrix gram = mq.transpose() * mq;
        for (std::size_t k = 0; k < m.cols; ++k) gram(k, k) -= s * s;
        if (is_positive_definite(gram)) {
          Rational l = 0;
          for (const auto& [alpha, nf] : norms) {
            Rational with = 1, without = 1;
            for (std::size_t j = 0; j < n; ++j) {
              const Rational a = abs(cell.center[j]);
              const Rational aw = j == face ? a : Rational(a + cell.w);
              for (int p = 0; p < alpha[j]; ++p) {
                with *= aw;
                without *= a;
              }
            }
            l += nf * (with - without);
          }
          const Rational bound = s - l;
          if (sgn(bound) > 0) {
            if (!min_bound || bound < *min_bound) min_bound = bound;
            ++accepted;
            done = true;
          }
        }
      }
      if (done) continue;
      const Rational half = cell.w / 2;
      if (half.get_d() < std::ldexp(1.0, -24)) return out;
      std::vector<std::size_t> free;
      for (std::size_t j = 0; j < n; ++j)
        if (j != face) free.push_back(j);
      for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
        Cell child{cell.center, half};
        for (std::size_t b = 0; b < free.size(); ++b) {
          if (mask >> b & 1) child.center[free[b]] += half;
          else child.center[free[b]] -= half;
        }
        stack.push_back(std::move(child));
      }
    }
  }
  // On the face xi_i = 1 we have |xi| <= sqrt(n), so sigma_min(xi/|xi|) >= bound / n^{k/2}.
  mpz_class nk;
  mpz_ui_pow_ui(nk.get_mpz_t(), n, static_cast<unsigned long>(m.order));
  const Rational margin = *min_bound / sqrt_upper(Rational(nk));
  if (margin.get_d() < opt.min_margin) return out;
  out.elliptic = Decision::yes;
  out.certificate = Certificate{"certified_grid", margin, -1, accepted};
  return out;
}

int first_empty_kernel_slice(const PolyMatrix& m, int cap) {
  for (int d = 0; d <= cap; ++d)
    if (homogeneous_kernel_slice(m, d).empty()) return d;
  return -1;
}

namespace {

CheckResult complex_check(const PolyMatrix& m, const ClassifyOptions& opt, bool try_real) {
  CheckResult out;
  if (m.cols == 0) {
    out.elliptic = Decision::yes;
    out.certificate = Certificate{"elimination", std::nullopt, 0, 0};
    return out;
  }
  if (try_real) {
    if (auto w = enumerate_real_witness(m)) {
      out.elliptic = Decision::no;
      out.witness = std::move(w);
      return out;
    }
  }
  if (auto w = enumerate_complex_witness(m)) {
    out.elliptic = Decision::no;
    out.witness = std::move(w);
    return out;
  }
  const int d = first_empty_kernel_slice(m, opt.degree_cap);
  if (d >= 0) {
    out.elliptic = Decision::yes;
    out.certificate = Certificate{"elimination", std::nullopt, d, 0};
    return out;
  }
  if (auto w = numeric_witness_search(m, true, opt)) {
    out.elliptic = Decision::no;
    out.witness = std::move(w);
  }
  return out;
}

CheckResult real_check(const PolyMatrix& m, const ClassifyOptions& opt, bool try_enumeration) {
  CheckResult out;
  if (m.cols == 0) {
    out.elliptic = Decision::yes;
    out.certificate = Certificate{"elimination", std::nullopt, 0, 0};
    return out;
  }
  if (try_enumeration) {
    if (auto w = enumerate_real_witness(m)) {
      out.elliptic = Decision::no;
      out.witness = std::move(w);
      return out;
    }
  }
  out = certify_real_grid(m, opt);
  if (out.elliptic != Decision::unknown) return out;
  if (auto w = numeric_witness_search(m, false, opt)) {
    out.elliptic = Decision::no;
    out.witness = std::move(w);
  }
  return out;
}

}  // namespace

CheckResult check_R_ellipticity(const PolyMatrix& m, const ClassifyOptions& opt) { return real_check(m, opt, true); }

CheckResult check_C_ellipticity(const PolyMatrix& m, const ClassifyOptions& opt) { return complex_check(m, opt, true); }

EllipticityVerdict classify_symbol(const PolyMatrix& m, const ClassifyOptions& opt) {
  EllipticityVerdict v;
  if (m.cols == 0) {
    v.status = Status::C_elliptic;
    v.certificate = Certificate{"elimination", std::nullopt, 0, 0};
    return v;
  }
  if (auto w = enumerate_real_witness(m)) {
    v.status = Status::non_elliptic;
    v.witness = std::move(w);
    return v;
  }
  const CheckResult c = complex_check(m, opt, false);
  if (c.elliptic == Decision::yes) {
    v.status = Status::C_elliptic;
    v.certificate = c.certificate;
    if (opt.margin_for_c_cells) {
      const CheckResult r = certify_real_grid(m, opt);
      if (r.elliptic == Decision::no)
        throw Error("inconsistent certificates: complex elimination succeeded but a real witness exists");
      if (r.certificate) v.certificate->margin = r.certificate->margin;
    }
    return v;
  }
  const CheckResult r = real_check(m, opt, false);
  if (r.elliptic == Decision::no) {
    v.status = Status::non_elliptic;
    v.witness = r.witness;
    return v;
  }
  v.witness = c.witness;
  v.certificate = r.certificate;
  v.status = (r.elliptic == Decision::yes && c.elliptic == Decision::no) ? Status::R_elliptic_only : Status::undecided;
  return v;
}

HomOperator base_operator(const std::string& base, std::size_t n) {
  if (base == "curl") return build_operator(OperatorKind::curl_classical3, n);
  if (base == "curl_generalized") return build_operator(OperatorKind::curl_generalized, n);
  if (base == "inc") return build_operator(OperatorKind::inc3, n);
  if (base == "div") return build_operator(OperatorKind::div_rowwise, n);
  if (base == "grad") return build_operator(OperatorKind::grad, n, n);
  return build_operator(parse_operator_kind(base), n);
}

PartMap domain_part(const std::string& a, const std::string& base, std::size_t n) {
  if (base != "grad") return PartMap::build(a, n);
  const PartKind k = parse_part_kind(a);
  if (k == PartKind::Id) return PartMap::custom("Id", {n, 1}, {n, 1}, QMatrix::identity(n));
  if (k == PartKind::zero) return PartMap::custom("zero", {n, 1}, {n, 1}, QMatrix(n, n));
  throw Error("the gradient acts on vector fields; only Id and zero part maps apply");
}

HomOperator assembled_operator(const std::string& b_part, const std::string& base, std::size_t n) {
  HomOperator op = base_operator(base, n);
  const PartKind k = parse_part_kind(b_part);
  if (k == PartKind::Id) return op;
  if (!op.codomain.square()) throw Error("part map " + b_part + " needs a square-matrix codomain; use Id with " + base);
  return compose_part(PartMap::build(k, op.codomain.rows), op);
}

EllipticityVerdict classify(const PartMap& pa, const HomOperator& op, const std::string& b_part_label,
                            const std::string& base, const ClassifyOptions& opt) {
  EllipticityVerdict v = classify_symbol(restricted_symbol(pa, op), opt);
  v.A = pa.name();
  v.B_part = b_part_label;
  v.base = base;
  v.n = op.n;
  if (v.witness) {
    const QMatrix t = pa.parametrization();
    v.witness_element.assign(t.rows(), GaussianRational(0));
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t j = 0; j < t.cols(); ++j)
        if (sgn(t(i, j)) != 0) v.witness_element[i] += GaussianRational(t(i, j)) * v.witness->v[j];
  }
  return v;
}

EllipticityVerdict classify(const std::string& a, const std::string& b_part, const std::string& base, std::size_t n,
                            const ClassifyOptions& opt) {
  EllipticityVerdict v = classify(domain_part(a, base, n), assembled_operator(b_part, base, n),
                                  part_name(parse_part_kind(b_part)), base, opt);
  v.n = n;
  return v;
}

nlohmann::json EllipticityVerdict::to_json() const {
  nlohmann::json j;
  j["A"] = A;
  j["B_part"] = B_part;
  j["base"] = base;
  j["n"] = n;
  j["status"] = status_code(status);
  j["verdict"] = status_name(status);
  if (witness) {
    nlohmann::json w;
    w["xi"] = gvector_to_json(witness->xi);
    w["v"] = gvector_to_json(witness->v);
    w["element"] = gvector_to_json(witness_element);
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  if (certificate) {
    nlohmann::json c;
    c["method"] = certificate->method;
    if (certificate->margin) {
      c["margin"] = to_string(*certificate->margin);
      c["margin_approx"] = certificate->margin->get_d();
    } else {
      c["margin"] = nullptr;
    }
    if (certificate->slice_degree >= 0) c["empty_slice_degree"] = certificate->slice_degree;
    if (certificate->cells > 0) c["cells"] = certificate->cells;
    j["certificate"] = c;
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

std::size_t ClassificationTable::mismatches() const {
  std::size_t bad = 0;
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (std::size_t c = 0; c < cells[r].size(); ++c)
      if (!golden[r][c].empty() && golden[r][c] != status_code(cells[r][c].status)) ++bad;
  return bad;
}

std::size_t ClassificationTable::golden_cells() const {
  std::size_t k = 0;
  for (const auto& row : golden)
    for (const auto& g : row) k += g.empty() ? 0 : 1;
  return k;
}

nlohmann::json ClassificationTable::to_json() const {
  nlohmann::json j;
  j["schema"] = "kmslab.table/1";
  j["family"] = family;
  j["n"] = n;
  j["rows"] = rows;
  j["cols"] = cols;
  nlohmann::json cs = nlohmann::json::array();
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      nlohmann::json v = cells[r][c].to_json();
      v["golden"] = golden[r][c].empty() ? nlohmann::json(nullptr) : nlohmann::json(golden[r][c]);
      cs.push_back(v);
    }
  j["cells"] = cs;
  j["golden_cells"] = golden_cells();
  j["mismatches"] = mismatches();
  return j;
}

namespace {

std::string pretty(Status s) {
  switch (s) {
    case Status::C_elliptic: return "✓";
    case Status::R_elliptic_only: return "ℝ-✓ / ℂ-↯";
    case Status::non_elliptic: return "↯";
    case Status::undecided: return "?";
  }
  return "?";
}

}  // namespace

std::string ClassificationTable::to_markdown() const {
  std::ostringstream os;
  os << "| A \\ B |";
  for (const auto& c : cols) os << ' ' << c << " |";
  os << "\n|---|";
  for (std::size_t c = 0; c < cols.size(); ++c) os << "---|";
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << "| " << rows[r] << " |";
    for (std::size_t c = 0; c < cols.size(); ++c) {
      os << ' ' << pretty(cells[r][c].status);
      if (!golden[r][c].empty() && golden[r][c] != status_code(cells[r][c].status)) os << " (expected " << golden[r][c] << ")";
      os << " |";
    }
    os << '\n';
  }
  return os.str();
}

std::string ClassificationTable::to_csv() const {
  std::ostringstream os;
  os << "family,n,A,B_part,status,golden,xi,v\n";
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& v = cells[r][c];
      os << family << ',' << n << ',' << rows[r] << ',' << cols[c] << ',' << status_code(v.status) << ','
         << golden[r][c] << ',';
      if (v.witness) os << '"' << to_string(v.witness->xi) << "\",\"" << to_string(v.witness->v) << '"';
      else os << ',';
      os << '\n';
    }
  return os.str();
}

ClassificationTable classification_table(const std::string& family, std::size_t n, const ClassifyOptions& opt) {
  ClassificationTable t;
  t.family = family;
  t.n = n;
  for (PartKind k : catalog_parts()) t.rows.push_back(part_name(k));
  std::string base;
  nlohmann::json golden;
  if (family == "curl" || family == "inc") {
    if (n != 3) throw Error("the " + family + " table exists only for n = 3");
    base = family;
    t.cols = t.rows;
    golden = nlohmann::json::parse(family == "curl" ? embedded::table_curl_n3 : embedded::table_inc_n3);
  } else if (family == "div") {
    if (n < 2) throw Error("the div table needs n >= 2");
    base = "div";
    t.cols = {"Id"};
    golden = nlohmann::json::parse(embedded::table_div);
  } else {
    throw Error("unknown table family: " + family);
  }
  t.golden.assign(t.rows.size(), std::vector<std::string>(t.cols.size()));
  if (family == "div") {
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      for (const auto& e : golden.at("known")) {
        const bool above = n >= e.at("n_min").get<std::size_t>();
        const bool below = e.at("n_max").is_null() || n <= e.at("n_max").get<std::size_t>();
        if (e.at("A").get<std::string>() == t.rows[r] && above && below) t.golden[r][0] = e.at("status");
      }
  } else {
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      for (std::size_t c = 0; c < t.cols.size(); ++c) t.golden[r][c] = golden.at("cells")[r][c].get<std::string>();
  }
  t.cells.assign(t.rows.size(), std::vector<EllipticityVerdict>(t.cols.size()));
  const std::size_t total = t.rows.size() * t.cols.size();
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t r = idx / t.cols.size(), c = idx % t.cols.size();
    ClassifyOptions cell_opt = opt;
    cell_opt.seed = opt.seed * 1000003ULL + idx;
    t.cells[r][c] = classify(t.rows[r], t.cols[c], base, n, cell_opt);
  });
  return t;
}

}  // namespace kmslab
