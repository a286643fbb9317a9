#pragma once

#include <optional>
#include <vector>

#include "schr/system.hpp"
#include "schr/warp.hpp"

namespace schr {

// RaisedCosine: (1/(2w))(1 + cos(pi x / w)) on |x| <= w.
// AsPrinted:    (1/w)(1 - |1 + cos(pi x / w)|/2) on |x| <= w, which vanishes at
//               x = 0 and peaks at |x| = w. Kept for comparison only.
enum class DeltaShape { RaisedCosine, AsPrinted };

struct LiftConfig {
  double S = 1.0;
  std::size_t n_s = 256;
  int m = 4;
  DeltaShape shape = DeltaShape::RaisedCosine;
  // Overrides the default step count ceil(T / (ds/2)).
  std::optional<std::size_t> n_steps;

  double ds() const;
  double omega() const { return m * ds(); }
  double s(std::size_t j) const;
  std::vector<double> s_grid() const;
};

// S is the smallest value (rounded up to 1/64) with pi S >= 4 omega + T + 1,
// where omega = m * 2 pi S / n_s.
LiftConfig make_lift_config(double T, std::size_t n_s = 256, int m = 4, std::optional<double> S = std::nullopt);

// Throws ConfigError unless pi S > 4 omega + T, m >= 2 and n_s is a power of two.
void validate_lift_config(const LiftConfig& cfg, double T);

struct DeltaKernel {
  std::vector<double> samples;  // normalized: sum_j samples[j] * ds = 1
  double ds = 0.0;
  double raw_sum = 0.0;         // sum_j delta(s_j) ds before normalization
};

double delta_value(DeltaShape shape, double omega, double x);
DeltaKernel delta_kernel(const LiftConfig& cfg);

struct LiftDiagnostics {
  std::size_t n_steps = 0;
  double dt = 0.0;
  double max_norm_drift = 0.0;  // relative change of the s-extended norm, worst mode
};

// Evolves each Fourier mode through the lifted transport equation
// v_t = -v_s - i(mu_k H1(s) - H2(s)) v with v(0, s) = delta(s) c_k and
// returns sum_j v(T, s_j) ds per mode.
WarpedState lift_and_evolve(const HermitianSplit& split, const WarpedState& fourier0, const WarpedDomain& domain,
                            const LiftConfig& cfg, double T, unsigned threads = 1,
                            LiftDiagnostics* diagnostics = nullptr);

}  // namespace schr
