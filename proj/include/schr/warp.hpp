#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "schr/profiles.hpp"
#include "schr/system.hpp"
#include "schr/types.hpp"

namespace schr {

// Grid cell that L and R are rounded up to, so p = 0 is a node for every n_p >= 16.
constexpr double kDomainCell = 1.0 / 16.0;

struct DomainExtent {
  double L = 0.0;
  double R = 0.0;
};

// Truncated p-domain [-L, R) with n_p nodes and centred Fourier modes.
class WarpedDomain {
 public:
  WarpedDomain() : WarpedDomain(1.0, 1.0, 16) {}
  WarpedDomain(double L, double R, std::size_t n_p);

  double L() const { return L_; }
  double R() const { return R_; }
  std::size_t n_p() const { return n_p_; }
  double dp() const { return (L_ + R_) / static_cast<double>(n_p_); }
  double p(std::size_t k) const { return -L_ + static_cast<double>(k) * dp(); }
  double mu(std::size_t k) const;
  double mu_max() const;
  std::vector<double> grid() const;
  std::vector<double> modes() const;

 private:
  double L_, R_;
  std::size_t n_p_;
};

// L = R = lambda_abs T + ln(1/eps), widened on the left to cover a profile
// support of `left_support` plus the leftward transport lambda_minus T, then
// rounded so that p = 0 is a grid node.
DomainExtent choose_domain(const SpectralBounds& bounds, double T, double epsilon, double left_support = 0.0);

// Rounds user-supplied (L, R) up so p = 0 stays on the grid for n_p >= 16.
DomainExtent snap_domain(double L, double R);

// Smallest power of two n_p >= 16 with mu_max >= mu_target (see source for the rule).
std::size_t choose_resolution(const InitProfile& profile, const DomainExtent& extent, double epsilon);

enum class Representation { Physical, Fourier };

struct WarpedState {
  CMatrix values;  // row k: w_h(t, p_k) or its k-th Fourier coefficient
  Representation representation = Representation::Physical;
  double time = 0.0;
};

WarpedState initialize(const InitProfile& profile, const WarpedDomain& domain, const CVector& u_i);
// Samples psi at the grid nodes.
std::vector<double> sample_profile(const InitProfile& profile, const WarpedDomain& domain, unsigned threads = 1);
WarpedState initialize(std::span<const double> psi_samples, const CVector& u_i);

// c_l = (1/n) sum_k W_k e^{-i mu_l (p_k + L)} and its inverse.
WarpedState to_fourier(const WarpedState& state);
WarpedState from_fourier(const WarpedState& state);

struct EvolveDiagnostics {
  double max_unitarity_defect = 0.0;
};

// Defect above which a per-mode propagator is reported as a numerical failure.
constexpr double kUnitarityFailure = 1e-8;

// Row k <- exp(-i (mu_k H1 - H2) T) row k.
WarpedState evolve_time_independent(const WarpedState& state, const WarpedDomain& domain, const HermitianSplit& split,
                                    double T, unsigned threads = 1, EvolveDiagnostics* diagnostics = nullptr);

struct RecoveryWindow {
  double p_diamond = 0.0;  // lambda_plus T
  double p_star = 0.0;
  double p_ub = 1.0;
  std::vector<std::size_t> k_set;
  std::size_t k_star = 0;
};

// k_set = {k : p_star + p_diamond < p_k < R - lambda_minus T, p_k <= p_ub}.
// k_star is the first node at or beyond p_star + p_diamond + 2 dp.
RecoveryWindow make_recovery_window(const WarpedDomain& domain, const SpectralBounds& bounds, double T, double p_star,
                                    std::optional<double> p_ub = std::nullopt);

struct Recovery {
  CVector u_f;
  CVector u;
};

Recovery recover(const WarpedState& physical, const WarpedDomain& domain, const RecoveryWindow& window,
                 Eigen::Index original_dim, bool average = false);

struct SuccessProbability {
  double pr_w = 0.0;
  double pr_u = 0.0;
  double g = 0.0;
  double ce0_sq_over_ce_sq = 0.0;
};

SuccessProbability success_probability(const WarpedState& physical, const RecoveryWindow& window,
                                       std::span<const double> psi_samples, const CVector& u_i,
                                       const Recovery& recovery);

// Continuous trigonometric reconstruction sum_l c_l e^{i mu_l (p + L)}.
CVector evaluate_at(const WarpedState& fourier, const WarpedDomain& domain, double p);

// CSV: k, p_k, row_norm, then re/im of e^{p_k} row_k for the first `original_dim` components.
void write_recovery_csv(std::ostream& os, const WarpedState& physical, const WarpedDomain& domain,
                        Eigen::Index original_dim);

}  // namespace schr
