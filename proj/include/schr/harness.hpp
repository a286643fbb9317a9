#pragma once

#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "schr/lift.hpp"
#include "schr/oracle.hpp"
#include "schr/profiles.hpp"
#include "schr/system.hpp"
#include "schr/warp.hpp"

namespace schr {

// ---------------------------------------------------------------------------
// Full solve: homogenize, split, size the domain, evolve, recover.
// ---------------------------------------------------------------------------

struct PipelineOptions {
  double epsilon = 1e-6;
  std::optional<double> L;
  std::optional<double> R;
  std::optional<std::size_t> n_p;
  bool force_lift = false;
  std::optional<LiftConfig> lift;  // default: make_lift_config(T)
  bool average = false;
  std::optional<double> p_ub;
  unsigned threads = 1;
  std::size_t time_samples = 65;
};

struct PipelineResult {
  std::string profile_id;
  WarpedDomain domain;
  SpectralBounds bounds;
  HermitianSplit split;
  HomogenizedSystem homogenized;
  RecoveryWindow window;
  Recovery recovery;
  SuccessProbability probability;
  std::vector<double> psi_samples;
  WarpedState fourier_T;
  WarpedState physical_T;
  bool lifted = false;
  double fourier_norm_drift = 0.0;
  double max_unitarity_defect = 0.0;
  std::optional<LiftDiagnostics> lift;
};

PipelineResult run_pipeline(const DynamicalSystem& sys, const ProfileSpec& spec, const PipelineOptions& opts);

double relative_error(const CVector& approx, const CVector& exact);

// Least-squares slope of y against x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Convergence in n_p.
// ---------------------------------------------------------------------------

struct ConvergenceReport {
  std::string profile_id;
  std::string profile_spec;
  double epsilon = 0.0;
  double L = 0.0;
  double R = 0.0;
  double oracle_tol = 0.0;
  std::string oracle_method;
  std::vector<std::size_t> n_p;
  std::vector<double> mu_max;
  std::vector<double> errors;
  std::vector<bool> in_fit;          // false for points at the error floor
  std::vector<double> pairwise_orders;  // between consecutive n_p
  double ls_order = 0.0;
  double ls_order_drop_first = 0.0;  // refit without the coarsest point
  std::vector<double> runtime_s;
};

ConvergenceReport convergence_study(const DynamicalSystem& sys, const ProfileSpec& spec,
                                    const std::vector<std::size_t>& n_p_list, PipelineOptions opts = {},
                                    double oracle_tol = 1e-10);

// ---------------------------------------------------------------------------
// Minimal resolution against eps.
// ---------------------------------------------------------------------------

struct MuScalingRow {
  double epsilon = 0.0;
  bool reached = false;
  std::size_t n_p = 0;
  double mu_max = 0.0;
  double error = 0.0;
  std::string profile_id;
};

struct MuScalingReport {
  std::string family;
  std::size_t n_p_min = 16;
  std::size_t n_p_cap = 0;
  double oracle_tol = 0.0;
  std::vector<MuScalingRow> rows;
  // log(mu_max) against log(1/eps), reached rows only
  LinearFit loglog;
  // mu_max against log(1/eps), reached rows only
  LinearFit semilog;
  double max_ratio_mu_over_log = 0.0;
  std::vector<double> runtime_s;
};

using ProfileFamily = std::function<ProfileSpec(double epsilon)>;

// For each eps, the smallest power-of-two n_p (scanning upward from n_p_min)
// whose recovered u has relative oracle error <= eps.
MuScalingReport mu_scaling_study(const DynamicalSystem& sys, const std::string& family_name,
                                 const ProfileFamily& family, const std::vector<double>& eps_list,
                                 std::size_t n_p_cap = std::size_t{1} << 20, PipelineOptions opts = {},
                                 double oracle_tol = 1e-12);

// ---------------------------------------------------------------------------
// Derivative growth ||psi^(r)||^{1/r}.
// ---------------------------------------------------------------------------

struct GrowthReport {
  std::string family;
  std::vector<int> r;
  std::vector<double> parameter;   // a (Erf, Quartic) or d (Cutoff) used at each r
  std::vector<double> log_norm;    // log ||psi^(r)||
  std::vector<double> value;       // ||psi^(r)||^{1/r}
  double slope = 0.0;              // d log(value) / d log(r)
  double beta_estimate = 0.0;      // 1 / slope
  double slope_drop_first = 0.0;
  double robustness = 0.0;         // |slope_drop_first - slope| / |slope|
};

// Erf: a = 2 sqrt(r); Cutoff: d = r (right end cutoff_R); Quartic: a = 2 r^{1/4}.
GrowthReport growth_study(ProfileKind family, const std::vector<int>& r_list, double cutoff_R = 16.0);

// ---------------------------------------------------------------------------
// Domain truncation.
// ---------------------------------------------------------------------------

struct TruncationRow {
  double half_width = 0.0;
  std::size_t n_p = 0;
  double error = 0.0;  // relative to the extra-wide reference
};

struct TruncationReport {
  std::string profile_id;
  double epsilon = 0.0;
  double criterion_half_width = 0.0;
  double reference_half_width = 0.0;
  double dp_target = 0.0;
  double p_eval = 0.0;
  std::vector<TruncationRow> rows;
  double widening_change = 0.0;   // |u(L_c + 2) - u(L_c)| / |u(L_c)|
  double decay_rate = 0.0;        // -d log(error)/dL over rows at or below the criterion
  double boundary_trace = 0.0;    // max_t ||w(t, -L)|| / ||u_I|| at the criterion domain
};

// Symmetric domains of half-width L_c + offset for each offset; errors at a fixed
// physical recovery point via the continuous reconstruction.
TruncationReport truncation_check(const DynamicalSystem& sys, const ProfileSpec& spec, double epsilon,
                                  const std::vector<double>& offsets, double dp_target = 1.0 / 64.0,
                                  unsigned threads = 1);

// ---------------------------------------------------------------------------
// Query-complexity formulas (constants set to 1).
// ---------------------------------------------------------------------------

struct ComplexityInputs {
  double alpha_h = 1.0;
  double T = 1.0;
  double epsilon = 1e-6;
  double norm_ratio = 1.0;  // ||u_I|| / ||u(T)||
  double beta = 1.0;
  double kappa_v = 1.0;     // condition number of the eigenbasis, spectral-method row only
};

struct ComplexityRow {
  std::string method;
  bool this_work = false;
  double queries = 0.0;
  double state_preparations = 0.0;
  std::string formula;
};

struct ComplexityEstimate {
  ComplexityInputs inputs;
  std::vector<ComplexityRow> rows;
  const ComplexityRow& row(const std::string& method) const;
};

ComplexityEstimate query_estimate(const ComplexityInputs& in);

// ---------------------------------------------------------------------------
// Output.
// ---------------------------------------------------------------------------

// CSV files are deterministic: runtimes are reported only in the JSON summaries.
void write_csv(std::ostream& os, const ConvergenceReport& r);
void write_csv(std::ostream& os, const MuScalingReport& r);
void write_csv(std::ostream& os, const GrowthReport& r);
void write_csv(std::ostream& os, const TruncationReport& r);
void write_csv(std::ostream& os, const ComplexityEstimate& r);

nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const MuScalingReport& r);
nlohmann::json to_json(const GrowthReport& r);
nlohmann::json to_json(const TruncationReport& r);
nlohmann::json to_json(const ComplexityEstimate& r);
nlohmann::json to_json(const PipelineResult& r);

}  // namespace schr
