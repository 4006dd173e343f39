#include "kmslab/campaign.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "kmslab/parallel.hpp"

namespace kmslab {

namespace {

using json = nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json("inf"); }

// s^(q/2) with cheap paths for the exponents that actually occur
double power_half(double s, double q) {
  if (q == 2.0) return s;
  if (q == 4.0) return s * s;
  if (q == 6.0) return s * s * s;
  return std::pow(s, q / 2);
}

// || map P ||_{L^q} over the box without materializing map P
double mapped_norm(const QMatrix& map, const GridField& f, double q) {
  const std::size_t rows = map.rows(), dim = f.dim();
  std::vector<double> m(rows * dim);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < dim; ++c) m[r * dim + c] = map(r, c).get_d();
  double acc = 0;
  std::vector<double> y(rows);
  for (std::size_t p = 0; p < f.points(); ++p) {
    const double* v = f.at(p);
    double s = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      double t = 0;
      for (std::size_t c = 0; c < dim; ++c) t += m[r * dim + c] * v[c];
      s += t * t;
    }
    acc += power_half(s, q);
  }
  return std::pow(acc * f.domain.cell_volume(), 1.0 / q);
}

double plain_norm(const GridField& f, double q) {
  double acc = 0;
  for (std::size_t p = 0; p < f.points(); ++p) {
    const double* v = f.at(p);
    double s = 0;
    for (std::size_t c = 0; c < f.dim(); ++c) s += v[c] * v[c];
    acc += power_half(s, q);
  }
  return std::pow(acc * f.domain.cell_volume(), 1.0 / q);
}

// a few grids at once hold several 100 MB each
std::size_t campaign_workers(std::size_t N, std::size_t n) {
  const std::size_t w = worker_count();
  return (n >= 3 && N >= 128) ? std::min<std::size_t>(w, 4) : w;
}

template <class F>
void capped_parallel_for(std::size_t count, std::size_t workers, F&& body) {
  // chunks of `workers` indices keep peak memory bounded
  for (std::size_t start = 0; start < count; start += workers) {
    const std::size_t len = std::min(workers, count - start);
    parallel_for(len, [&](std::size_t i) { body(start + i); });
  }
}

std::vector<std::size_t> grids_or(const CampaignOptions& opt, std::vector<std::size_t> fallback) {
  auto g = opt.grids.value_or(std::move(fallback));
  if (g.empty()) throw Error("at least one grid size is required");
  for (std::size_t N : g) GridDomain{3, N, 0.5}.validate();
  return g;
}

std::string grid_key(std::size_t N) { return std::to_string(N); }

void dump_field(const CampaignOptions& opt, const std::string& stem, const GridField& f) {
  if (opt.dump_dir.empty()) return;
  std::filesystem::create_directories(opt.dump_dir);
  write_field_binary((std::filesystem::path(opt.dump_dir) / (stem + "_N" + grid_key(f.domain.N) + ".bin")).string(), f);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double sup_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s = std::max(s, x);
  return s;
}

json ratio_list(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

// ---- counterexample presets -------------------------------------------------

CampaignResult counterexample(const std::string& name, FieldKind kind, const std::string& a, const std::string& b_part,
                              const CampaignOptions& opt) {
  const double p = opt.p.value_or(2.0);
  const auto grids = grids_or(opt, {64});
  const PartMap A = PartMap::build(a, 3);
  const HomOperator B = assembled_operator(b_part, "curl", 3);
  CampaignResult res;
  res.preset = name;
  res.expectation = "infinite";
  res.pass = true;
  json runs = json::array();
  for (std::size_t N : grids) {
    const GridDomain d{3, N, 0.5};
    const GridField P = make_field(kind, d, FieldParams{});
    dump_field(opt, name, P);
    const InequalityReport r = kms1_ratio(P, A, B, p, opt.thresholds);
    json j = r.to_json();
    j["rhs_over_norm"] = r.rhs() / r.field_norm;
    j["lhs_over_norm"] = r.lhs / r.field_norm;
    runs.push_back(j);
    res.pass = res.pass && r.infinite;
  }
  res.report = {{"A", a},
                {"B", b_part + "∘Curl"},
                {"field", field_kind_name(kind)},
                {"p", p},
                {"thresholds", {{"eps_zero", opt.thresholds.eps_zero}, {"eps_pos", opt.thresholds.eps_pos}}},
                {"runs", runs}};
  res.summary = res.pass ? "ratio is infinite at every grid, as expected" : "expected an infinite ratio";
  return res;
}

// ---- scaling presets --------------------------------------------------------

CampaignResult scaling(const std::string& name, std::size_t n, double p, const CampaignOptions& opt) {
  const std::size_t N = opt.grids && !opt.grids->empty() ? opt.grids->front() : (n == 2 ? 256 : 128);
  const double expected = sobolev_exponent(n, p);
  std::vector<double> qs{2.0, expected, 2 * expected};
  if (opt.q) qs.push_back(*opt.q);
  const ScalingReport rep = scaling_probe(n, p, {1.0, 0.5, 0.25}, qs, N, 0.95 * std::numbers::pi);
  CampaignResult res;
  res.preset = name;
  res.expectation = "recovered q within 1% of np/(n-p)";
  res.pass = rep.exponent_error < 0.01;
  res.report = rep.to_json();
  res.summary = "recovered q = " + std::to_string(rep.recovered_q) + ", expected " + std::to_string(expected);
  return res;
}

// ---- second kind ------------------------------------------------------------

CampaignResult second_kind(const std::string& name, const std::string& a, const std::string& b_part,
                           const std::string& base, FieldKind kind, bool normalized, int j_default,
                           const CampaignOptions& opt) {
  const std::size_t n = 3;
  const double p = opt.p.value_or(2.0), q = opt.q.value_or(2.0);
  const int j = opt.j.value_or(j_default);
  const auto grids = grids_or(opt, {32, 64});
  const PartMap A = domain_part(a, base, n);
  const HomOperator B = assembled_operator(b_part, base, n);
  const KernelBasis K = kernel_polynomials(A, B);
  const int count = std::max(1, opt.random_fields / 2);
  CampaignResult res;
  res.preset = name;
  res.expectation = "finite";
  res.pass = true;
  json study = json::array();
  std::vector<double> sups;
  for (std::size_t N : grids) {
    const GridDomain d{n, N, 0.5};
    std::vector<InequalityReport> reps(static_cast<std::size_t>(count));
    capped_parallel_for(reps.size(), campaign_workers(N, n), [&](std::size_t i) {
      FieldParams prm;
      prm.seed = opt.seed * 1000 + i;
      prm.max_mode = std::min<int>(8, static_cast<int>(*std::min_element(grids.begin(), grids.end()) / 8));
      prm.space = A.domain();
      const GridField P = make_field(kind, d, prm);
      if (i == 0) dump_field(opt, name, P);
      reps[i] = kms2_ratio(P, A, B, p, q, j, K, normalized, opt.thresholds);
    });
    std::vector<double> ratios;
    json fields = json::array();
    for (const auto& r : reps) {
      ratios.push_back(r.ratio);
      fields.push_back(r.to_json());
    }
    res.pass = res.pass && all_finite(ratios);
    sups.push_back(sup_of(ratios));
    study.push_back({{"N", N}, {"sup", num(sups.back())}, {"fields", fields}});
  }
  res.report = {{"A", a},
                {"B", B.label},
                {"mode", normalized ? "normalized" : "KMS2"},
                {"p", p},
                {"q", q},
                {"j", j},
                {"kernel_dim", K.dim()},
                {"resolution_study", study}};
  res.summary = res.pass ? "all ratios finite, sup " + std::to_string(sups.back()) : "an infinite ratio appeared";
  return res;
}

// ---- default corpus -----------------------------------------------------------

std::size_t corpus_size(const CampaignOptions& opt) {
  if (opt.random_fields < 0 || opt.bump_fields < 0) throw Error("corpus sizes must be nonnegative");
  return static_cast<std::size_t>(opt.random_fields + opt.bump_fields);
}

// Field i of the corpus; identical fields at every resolution.
GridField corpus_field(const GridDomain& d, Space space, std::size_t min_grid, const CampaignOptions& opt,
                       std::size_t i) {
  FieldParams prm;
  prm.space = space;
  const std::size_t randoms = static_cast<std::size_t>(opt.random_fields);
  if (i < randoms) {
    prm.seed = opt.seed * 1000 + i;
    prm.max_mode = std::min<int>(8, static_cast<int>(min_grid / 8));
    return make_field(FieldKind::band_limited_random, d, prm);
  }
  const std::size_t b = i - randoms;
  const bool square3 = d.n == 3 && space == Space{3, 3};
  if (b == 0 && space == Space{d.n, d.n}) return make_field(FieldKind::spherical_bump, d, prm);
  if (b == 1 && square3) return make_field(FieldKind::anti_gradient_bump, d, prm);
  std::mt19937_64 rng(opt.seed * 7777 + b);
  std::normal_distribution<double> normal;
  for (std::size_t c = 0; c < space.dim(); ++c) prm.value.push_back(normal(rng));
  GridField f = make_field(FieldKind::bump_times_const, d, prm);
  f.provenance += ":seed=" + std::to_string(opt.seed * 7777 + b);
  return f;
}

// ---- first kind over a corpus ------------------------------------------------

// Plane wave T v cos(xi . x) along a real witness; none if xi is too large for the grid.
std::optional<InequalityReport> witness_wave(const EllipticityVerdict& v, const GridDomain& d, const PartMap& a,
                                             const HomOperator& b, double p, const Thresholds& t) {
  if (!v.witness || !v.witness->is_real()) return std::nullopt;
  Rational scale(1);
  for (const auto& x : v.witness->xi) scale *= Rational(x.re.get_den());
  std::vector<int> wave;
  for (const auto& x : v.witness->xi) {
    const Rational k = x.re * scale;
    if (abs(k) > Rational(static_cast<long>(d.N / 8))) return std::nullopt;
    wave.push_back(static_cast<int>(k.get_num().get_si()));
  }
  FieldParams prm;
  prm.space = a.domain();
  prm.wave = wave;
  for (const auto& e : v.witness_element) prm.value.push_back(e.re.get_d());
  InequalityReport r = kms1_ratio(make_field(FieldKind::plane_wave, d, prm), a, b, p, t);
  r.field = "plane_wave:witness";
  return r;
}

// Generic first-kind campaign for one pair.
CampaignResult first_kind(const CampaignOptions& opt) {
  const double p = opt.p.value_or(2.0);
  const auto grids = grids_or(opt, {32, 64});
  const PartMap A = domain_part(opt.A, opt.base, opt.n);
  const HomOperator B = assembled_operator(opt.B_part, opt.base, opt.n);
  ClassifyOptions copt;
  copt.seed = opt.seed;
  const EllipticityVerdict v = classify(opt.A, opt.B_part, opt.base, opt.n, copt);
  const bool expect_finite = v.status == Status::C_elliptic || v.status == Status::R_elliptic_only;
  CampaignResult res;
  res.preset = "kms1";
  res.expectation = expect_finite ? "finite" : "infinite";
  json study = json::array();
  bool any_infinite = false;
  double blow = 0;
  std::size_t min_grid = *std::min_element(grids.begin(), grids.end());
  for (std::size_t N : grids) {
    const GridDomain d{opt.n, N, 0.5};
    std::vector<InequalityReport> reps(corpus_size(opt));
    capped_parallel_for(reps.size(), campaign_workers(N, opt.n), [&](std::size_t i) {
      reps[i] = kms1_ratio(corpus_field(d, A.domain(), min_grid, opt, i), A, B, p, opt.thresholds);
    });
    std::vector<double> ratios;
    json fields = json::array();
    for (const auto& r : reps) {
      ratios.push_back(r.ratio);
      fields.push_back(r.to_json());
      any_infinite = any_infinite || r.infinite;
    }
    json entry = {{"N", N}, {"sup", num(sup_of(ratios))}, {"fields", fields}};
    if (auto r = witness_wave(v, d, A, B, p, opt.thresholds)) {
      entry["witness_wave"] = r->to_json();
      blow = std::max(blow, r->ratio);
      any_infinite = any_infinite || r->infinite;
    }
    study.push_back(entry);
  }
  res.pass = expect_finite ? !any_infinite : (any_infinite || blow > 1e3);
  res.report = {{"A", opt.A},        {"B", B.label},          {"n", opt.n},
                {"p", p},            {"status", status_code(v.status)}, {"resolution_study", study}};
  res.summary = expect_finite ? (res.pass ? "all ratios finite" : "an infinite ratio appeared")
                              : (res.pass ? "blow-up detected" : "no blow-up found");
  return res;
}


// Every (A, B_part) pair over Curl in n = 3. Norms of all parts are taken once per field.
CampaignResult curl_table(const CampaignOptions& opt) {
  const std::size_t n = 3;
  const double p = opt.p.value_or(2.0), ps = sobolev_exponent(n, p);
  const auto grids = grids_or(opt, {64, 128});
  const std::size_t min_grid = *std::min_element(grids.begin(), grids.end());
  ClassifyOptions copt;
  copt.seed = opt.seed;
  const ClassificationTable table = classification_table("curl", n, copt);
  const HomOperator curl = base_operator("curl", n);
  std::vector<QMatrix> a_maps, b_maps;
  for (const auto& r : table.rows) a_maps.push_back(PartMap::build(r, n).matrix());
  for (const auto& c : table.cols) b_maps.push_back(PartMap::build(c, n).matrix());

  struct FieldNorms {
    std::string provenance;
    double lhs = 0;
    std::vector<double> a, b;
    std::vector<std::string> warnings;
  };
  std::vector<std::vector<FieldNorms>> norms;
  for (std::size_t N : grids) {
    const GridDomain d{n, N, 0.5};
    std::vector<FieldNorms> per(corpus_size(opt));
    capped_parallel_for(per.size(), campaign_workers(N, n), [&](std::size_t i) {
      const GridField P = corpus_field(d, {3, 3}, min_grid, opt, i);
      const GridField cp = apply_operator_fft(curl, P);
      FieldNorms& f = per[i];
      f.provenance = P.provenance;
      f.warnings = cp.warnings;
      f.lhs = plain_norm(P, ps);
      for (const auto& m : a_maps) f.a.push_back(mapped_norm(m, P, ps));
      for (const auto& m : b_maps) f.b.push_back(mapped_norm(m, cp, p));
    });
    norms.push_back(std::move(per));
  }

  json warnings = json::array();
  for (std::size_t g = 0; g < grids.size(); ++g)
    for (const auto& f : norms[g])
      for (const auto& w : f.warnings) {
        const std::string tagged = "N=" + grid_key(grids[g]) + " " + f.provenance + ": " + w;
        warnings.push_back(tagged);
      }

  CampaignResult res;
  res.preset = "kms1-curl-table";
  res.expectation = "C cells finite and stable within 20%; non-elliptic cells blow up";
  res.pass = true;
  std::size_t gated = 0, failed = 0;
  json cells = json::array();
  const GridDomain coarse{n, min_grid, 0.5};
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      const EllipticityVerdict& v = table.cells[r][c];
      json cell = {{"A", table.rows[r]},
                   {"B_part", table.cols[c]},
                   {"status", status_code(v.status)},
                   {"golden", table.golden[r][c]}};
      json sup = json::object(), ratios = json::object();
      std::vector<double> sups;
      bool finite = true;
      for (std::size_t g = 0; g < grids.size(); ++g) {
        std::vector<double> rs;
        for (const auto& f : norms[g]) {
          InequalityReport rep;
          rep.field_norm = f.lhs;
          rep.lhs = f.lhs;
          rep.rhs_part = f.a[r];
          rep.rhs_operator = f.b[c];
          finish_ratio(rep, opt.thresholds);
          rs.push_back(rep.ratio);
        }
        finite = finite && all_finite(rs);
        sups.push_back(sup_of(rs));
        sup[grid_key(grids[g])] = num(sups.back());
        ratios[grid_key(grids[g])] = ratio_list(rs);
      }
      const double change =
          finite && sups.front() > 0 ? std::fabs(sups.back() - sups.front()) / sups.front() : std::numeric_limits<double>::infinity();
      cell["sup"] = sup;
      cell["relative_change"] = num(change);
      cell["ratios"] = ratios;
      bool pass = true, gating = false;
      switch (v.status) {
        case Status::C_elliptic:
          cell["expectation"] = "finite_stable";
          gating = true;
          pass = finite && change < 0.2;
          break;
        case Status::non_elliptic: {
          cell["expectation"] = "blowup";
          gating = true;
          const auto w = witness_wave(v, coarse, PartMap::build(table.rows[r], n),
                                      assembled_operator(table.cols[c], "curl", n), p, opt.thresholds);
          if (w) cell["blowup"] = w->to_json();
          pass = w && (w->infinite || w->ratio > 1e3);
          break;
        }
        case Status::R_elliptic_only:
          cell["expectation"] = "finite";
          pass = finite;
          break;
        case Status::undecided:
          cell["expectation"] = "unknown";
          break;
      }
      cell["gating"] = gating;
      cell["pass"] = pass;
      if (gating) {
        ++gated;
        if (!pass) ++failed;
      }
      res.pass = res.pass && (!gating || pass);
      cells.push_back(cell);
    }
  json provenance = json::array();
  for (const auto& f : norms.front()) provenance.push_back(f.provenance);
  res.report = {{"family", "curl"},
                {"n", n},
                {"p", p},
                {"q", ps},
                {"grids", grids},
                {"corpus", {{"random", opt.random_fields}, {"bumps", opt.bump_fields}, {"fields", provenance}}},
                {"thresholds", {{"eps_zero", opt.thresholds.eps_zero}, {"eps_pos", opt.thresholds.eps_pos}}},
                {"cells", cells},
                {"warnings", warnings}};
  res.summary = std::to_string(gated - failed) + "/" + std::to_string(gated) + " gating cells pass";
  return res;
}

}  // namespace

std::vector<GridField> default_corpus(const GridDomain& d, Space space, std::size_t min_grid,
                                      const CampaignOptions& opt) {
  std::vector<GridField> out;
  for (std::size_t i = 0; i < corpus_size(opt); ++i) out.push_back(corpus_field(d, space, min_grid, opt, i));
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"example-1.1",      "example-1.2",   "korn-normalized",
                                              "scaling-p2-n3",    "scaling-p1.5-n3", "scaling-p1.5-n2",
                                              "kms2-dev-devsym-inc", "kms1-curl-table", "kms1"};
  return names;
}

CampaignResult run_preset(const std::string& name, const CampaignOptions& opt) {
  if (name == "example-1.1") return counterexample(name, FieldKind::spherical_bump, "dev", "sym", opt);
  if (name == "example-1.2") return counterexample(name, FieldKind::anti_gradient_bump, "sym", "skew", opt);
  if (name == "korn-normalized")
    return second_kind(name, "sym", "Id", "curl", FieldKind::random_gradient, true, 0, opt);
  if (name == "kms2-dev-devsym-inc")
    return second_kind(name, "dev", "devsym", "inc", FieldKind::band_limited_random, false, 1, opt);
  if (name == "scaling-p2-n3") return scaling(name, 3, 2.0, opt);
  if (name == "scaling-p1.5-n3") return scaling(name, 3, 1.5, opt);
  if (name == "scaling-p1.5-n2") return scaling(name, 2, 1.5, opt);
  if (name == "kms1-curl-table") return curl_table(opt);
  if (name == "kms1") return first_kind(opt);
  throw Error("unknown preset: " + name);
}

nlohmann::json CampaignResult::to_json() const {
  return {{"schema", "kmslab.campaign/1"},
          {"preset", preset},
          {"pass", pass},
          {"expectation", expectation},
          {"summary", summary},
          {"report", report}};
}

namespace {

template <class T>
T to_little(T x) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &x, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&x, b, sizeof(T));
  }
  return x;
}

}  // namespace

void write_field_binary(const std::string& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  for (std::uint64_t h : {std::uint64_t(f.domain.n), std::uint64_t(f.domain.N), std::uint64_t(f.dim())}) {
    h = to_little(h);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
  }
  for (double v : f.values) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  if (!out) throw Error("write failed: " + path);
}

GridField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::uint64_t h[3];
  for (auto& x : h) {
    in.read(reinterpret_cast<char*>(&x), sizeof x);
    x = to_little(x);
  }
  if (!in) throw Error("truncated header: " + path);
  GridDomain d{static_cast<std::size_t>(h[0]), static_cast<std::size_t>(h[1]), 0.5};
  d.validate();
  // the header only knows dim V; store it as a column
  GridField f(d, {static_cast<std::size_t>(h[2]), 1}, "binary:" + path);
  for (double& v : f.values) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    v = to_little(v);
  }
  if (!in) throw Error("truncated values: " + path);
  return f;
}

}  // namespace kmslab
