#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmslab/diffops.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/poly_kernel.hpp"

namespace kmslab {

enum class FieldKind {
  bump_times_const,
  band_limited_random,
  spherical_bump,       // phi * 1, annihilated by dev and by sym Curl
  anti_gradient_bump,   // Anti(grad psi), annihilated by sym and by skew Curl
  rigid_motion_gradient,
  plane_wave,
  random_gradient,      // D u for a band-limited u
};

std::string field_kind_name(FieldKind k);
/// Also accepts counterexample_ex11 / counterexample_ex12.
FieldKind parse_field_kind(const std::string& s);

struct FieldParams {
  std::uint64_t seed = 1;
  /// Support radius of bumps; the profile is a Gaussian with deviation radius * width_ratio, cut at the radius.
  double radius = 1.5707963267948966;
  double width_ratio = 1.0 / 7.0;
  /// Empty means box centre.
  std::vector<double> center;
  /// Constant value (bump_times_const, rigid_motion_gradient, plane_wave amplitude), row-major in `space`.
  std::vector<double> value;
  Space space{3, 3};
  /// Largest |k_j| of band-limited fields.
  int max_mode = 8;
  /// Integer wave vector of plane waves.
  std::vector<int> wave;
};

GridField make_field(FieldKind kind, const GridDomain& d, const FieldParams& params);

/// Exact scalar bump profile and its gradient (for oracles).
double bump_value(const std::vector<double>& x, const std::vector<double>& center, double radius, double width_ratio);
std::vector<double> bump_gradient(const std::vector<double>& x, const std::vector<double>& center, double radius,
                                  double width_ratio);

/// Spectral application of a homogeneous operator; symbol B[i xi], Nyquist modes dropped.
/// Adds an aliasing warning when the top third of the spectrum of P holds more than 1e-8 of its energy.
GridField apply_operator_fft(const HomOperator& op, const GridField& p);
double high_frequency_fraction(const GridField& p);

/// Stack of first derivatives, component index c * n + j.
GridField gradient_stack(const GridField& p);

/// Midpoint rule, pointwise Frobenius norm.
double lebesgue_norm(const GridField& p, double q, Region region = Region::box);
/// L^q norm of the m-th gradient stack, m in {0, 1, 2}.
double sobolev_seminorm(const GridField& p, int m, double q, Region region = Region::box);

struct Thresholds {
  double eps_zero = 1e-10;
  double eps_pos = 1e-2;
};

struct InequalityReport {
  std::string A;
  std::string B;
  std::string mode;  // KMS1, KMS2, normalized
  std::string field;
  double p = 0;
  double q = 0;
  int j = 0;
  std::size_t N = 0;
  double field_norm = 0;
  double lhs = 0;
  double rhs_part = 0;
  double rhs_operator = 0;
  double ratio = 0;
  bool infinite = false;
  /// rhs and lhs both below their thresholds.
  bool degenerate = false;
  std::vector<std::string> warnings;

  double rhs() const { return rhs_part + rhs_operator; }
  nlohmann::json to_json() const;
};

/// Applies the thresholds: infinite iff rhs < eps_zero * norm and lhs > eps_pos * norm.
void finish_ratio(InequalityReport& r, const Thresholds& t);

double sobolev_exponent(std::size_t n, double p);

/// First kind: ||P||_{W^{k-1,p*}} vs ||A[P]||_{W^{k-1,p*}} + ||B P||_{L^p}, p* = np/(n-p).
InequalityReport kms1_ratio(const GridField& p, const PartMap& a, const HomOperator& b, double exponent_p,
                            const Thresholds& t = {});
/// Same, with A[P] and B P precomputed.
InequalityReport kms1_from_parts(const GridField& p, const GridField& ap, const GridField& bp, int order,
                                 double exponent_p, const Thresholds& t = {});

struct Projection {
  std::vector<double> coefficients;
  double residual = 0;
  int iterations = 0;
};

/// Minimizes || target - sum c_i basis_i ||_{L^q} over the given points; basis/target point-major with `dim` values.
Projection project_onto_span(const std::vector<double>& target, const std::vector<std::vector<double>>& basis,
                             std::size_t dim, double cell_volume, double q);
/// D^j P given as a field (the j-th gradient stack); basis derivatives are exact.
Projection project_onto_kernel(const GridField& djp, const KernelBasis& k, int j, double q,
                               Region region = Region::interior);

/// Second kind on the interior subcube.
InequalityReport kms2_ratio(const GridField& p, const PartMap& a, const HomOperator& b, double exponent_p, double q,
                            int j, const KernelBasis& k, bool normalized, const Thresholds& t = {});

struct ScalingRow {
  double q = 0;
  double exponent_field = 0;     // fitted exponent of ||P_lambda||_{L^q}
  double exponent_operator = 0;  // fitted exponent of ||B P_lambda||_{L^p}
  double mismatch = 0;
};

struct ScalingReport {
  std::size_t n = 0;
  double p = 0;
  int order = 0;
  std::size_t N = 0;
  std::vector<double> lambdas;
  std::vector<ScalingRow> rows;
  double recovered_q = 0;
  double expected_q = 0;
  /// |fitted - analytic| / analytic for the operator exponent.
  double exponent_error = 0;
  nlohmann::json to_json() const;
};

/// P_lambda(x) = P(x / lambda) for a bump P, B = grad on scalars.
ScalingReport scaling_probe(std::size_t n, double p, const std::vector<double>& lambdas,
                            const std::vector<double>& q_list, std::size_t N, double radius);

/// Least-squares slope of log y against log x.
double fit_power(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kmslab
