#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmslab/polymatrix.hpp"

namespace kmslab {

enum class Status { C_elliptic, R_elliptic_only, non_elliptic, undecided };

/// "C", "R_only", "none", "undecided".
std::string status_code(Status s);
Status parse_status_code(const std::string& code);
/// C_elliptic, R_elliptic_only, ...
std::string status_name(Status s);

/// xi != 0 and v != 0 with M(xi) v = 0; v holds kernel-basis coordinates.
struct Witness {
  GVector xi;
  GVector v;
  bool is_real() const;
  std::size_t bit_size() const;
};

struct Certificate {
  /// "elimination" (empty homogeneous kernel slice) or "certified_grid".
  std::string method;
  /// Rational lower bound for min over the unit sphere of sigma_min(M(xi)).
  std::optional<Rational> margin;
  /// First degree with an empty kernel slice (elimination only).
  int slice_degree = -1;
  /// Number of accepted cells (grid only).
  std::size_t cells = 0;
};

enum class Decision { yes, no, unknown };

struct CheckResult {
  Decision elliptic = Decision::unknown;
  std::optional<Witness> witness;
  std::optional<Certificate> certificate;
};

struct ClassifyOptions {
  int degree_cap = 8;
  std::size_t max_grid_cells = 400000;
  /// Certified margins below this count as failures.
  double min_margin = 1e-6;
  int numeric_restarts = 24;
  std::int64_t max_denominator = 1000000;
  std::uint64_t seed = 1;
  /// Also run the real grid for C-elliptic cells to report a margin.
  bool margin_for_c_cells = true;
};

/// True iff M(xi) v = 0 exactly. Throws on xi = 0 or v = 0.
bool verify_witness(const PolyMatrix& m, const GVector& xi, const GVector& v);

/// Exhaustive search over small primitive integer frequencies.
std::optional<Witness> enumerate_real_witness(const PolyMatrix& m);
/// Exhaustive search over small Gaussian-integer frequencies (non-real ones only).
std::optional<Witness> enumerate_complex_witness(const PolyMatrix& m);
/// Random-restart minimization of sigma_min on the sphere, snapped and verified exactly.
std::optional<Witness> numeric_witness_search(const PolyMatrix& m, bool complex_frequencies,
                                              const ClassifyOptions& opt);
/// Subdivision of the cube faces xi_i = 1 with exact lower bounds for sigma_min.
CheckResult certify_real_grid(const PolyMatrix& m, const ClassifyOptions& opt);
/// First d <= cap with an empty slice, or -1.
int first_empty_kernel_slice(const PolyMatrix& m, int cap);

CheckResult check_R_ellipticity(const PolyMatrix& m, const ClassifyOptions& opt = {});
CheckResult check_C_ellipticity(const PolyMatrix& m, const ClassifyOptions& opt = {});

struct EllipticityVerdict {
  std::string A;
  std::string B_part;
  std::string base;
  std::size_t n = 0;
  Status status = Status::undecided;
  std::optional<Witness> witness;
  /// T v, the witness as an element of ker(A) (complex matrix, row-major).
  GVector witness_element;
  std::optional<Certificate> certificate;
  nlohmann::json to_json() const;
};

/// Combines the checks on a restricted symbol.
EllipticityVerdict classify_symbol(const PolyMatrix& m, const ClassifyOptions& opt = {});

/// Bases: "curl" (classical, n = 3), "inc" (n = 3), "div" (row-wise, n >= 2),
/// "curl_generalized", and "grad" (acting on R^n-valued fields).
HomOperator base_operator(const std::string& base, std::size_t n);
/// Part map on the domain of the base operator.
PartMap domain_part(const std::string& a, const std::string& base, std::size_t n);
HomOperator assembled_operator(const std::string& b_part, const std::string& base, std::size_t n);

EllipticityVerdict classify(const std::string& a, const std::string& b_part, const std::string& base, std::size_t n,
                            const ClassifyOptions& opt = {});
/// Same for prebuilt (possibly custom) maps; op is the full operator B_part o base.
EllipticityVerdict classify(const PartMap& a, const HomOperator& op, const std::string& b_part_label,
                            const std::string& base, const ClassifyOptions& opt = {});

struct ClassificationTable {
  std::string family;
  std::size_t n = 0;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<EllipticityVerdict>> cells;
  /// Golden status codes; empty string where no golden value exists.
  std::vector<std::vector<std::string>> golden;
  std::size_t mismatches() const;
  std::size_t golden_cells() const;
  nlohmann::json to_json() const;
  std::string to_markdown() const;
  std::string to_csv() const;
};

/// family in {curl, inc, div}.
ClassificationTable classification_table(const std::string& family, std::size_t n, const ClassifyOptions& opt = {});

std::string to_string(const GVector& v);
nlohmann::json gvector_to_json(const GVector& v);
GVector gvector_from_json(const nlohmann::json& j);

}  // namespace kmslab
