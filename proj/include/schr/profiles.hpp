#pragma once

#include <memory>
#include <optional>
#include <string>

#include "schr/special.hpp"
#include "schr/types.hpp"

namespace schr {

enum class ProfileKind { ExpAbs, Cutoff, Hermite, Erf, Quartic };

std::string to_string(ProfileKind kind);

// Parsed profile selection. `value` holds d (Cutoff), r (Hermite) or eps
// (Erf, Quartic); ExpAbs ignores it.
struct ProfileSpec {
  ProfileKind kind = ProfileKind::Erf;
  double value = 1e-6;

  std::string to_string() const;
  // Distance below p = 0 over which psi is not yet e^{p}-small; only the
  // cutoff family (support down to -1-2d) reports a non-zero extent.
  double left_support() const;
};

// "exp_abs" | "cutoff:d=<v>" | "hermite:r=<v>" | "erf:eps=<v>" | "quartic:eps=<v>"
ProfileSpec parse_profile_spec(const std::string& text);

namespace detail {
class ProfileImpl {
 public:
  virtual ~ProfileImpl() = default;
  virtual double eval(double p) const = 0;
  virtual SignedLog derivative_log(int r, double p) const = 0;
  virtual int deriv_order_max() const = 0;
  // Panel width for composite quadrature of psi^(r).
  virtual double resolution(int r) const = 0;
  virtual Interval natural_support(int r) const = 0;
};
}  // namespace detail

// Initialization profile psi(p). Immutable; copies share the implementation.
class InitProfile {
 public:
  InitProfile(ProfileKind kind, double parameter, std::shared_ptr<const detail::ProfileImpl> impl);

  ProfileKind kind() const { return kind_; }
  // a (Erf, Quartic), d (Cutoff), r (Hermite), 0 (ExpAbs)
  double parameter() const { return parameter_; }
  double operator()(double p) const { return impl_->eval(p); }
  double eval(double p) const { return impl_->eval(p); }
  SignedLog derivative_log(int r, double p) const;
  double derivative(int r, double p) const { return derivative_log(r, p).value(); }
  int deriv_order_max() const { return impl_->deriv_order_max(); }
  // Claimed Gevrey exponent: Cutoff 1/2, Erf 1, Quartic 1, none otherwise.
  std::optional<double> beta_claim() const;
  // Start of the region where psi = e^{-p} up to the target accuracy.
  double p_star() const;
  Interval natural_support(int r) const { return impl_->natural_support(r); }
  double resolution(int r) const { return impl_->resolution(r); }
  std::string id() const;

 private:
  ProfileKind kind_;
  double parameter_;
  std::shared_ptr<const detail::ProfileImpl> impl_;
};

InitProfile make_exp_abs();
InitProfile make_cutoff(double R, double d);
InitProfile make_hermite(int r);
InitProfile make_erf(double epsilon);
InitProfile make_erf_scaled(double a);
InitProfile make_quartic(double epsilon);
InitProfile make_quartic_scaled(double a);
// Builds the profile for a domain whose right end is R (used by Cutoff).
InitProfile build_profile(const ProfileSpec& spec, double R);

// a such that |chi(a p) + 1/2 - 1| <= eps for p >= 1/2.
double quartic_scale_for(double epsilon);
// int_R e^{-t^4} dt
double quartic_mass();

struct LogMagnitude {
  double log_value = -std::numeric_limits<double>::infinity();
  double value() const { return std::exp(log_value); }
  // value^(1/r)
  double root(int r) const { return std::exp(log_value / r); }
};

// ||psi^(r)||_{L2(domain)} by composite Gauss-Legendre quadrature of the
// analytic derivative, accumulated in log-magnitude form. Defaults to the
// profile's natural support (all of R up to negligible tails).
LogMagnitude deriv_l2_norm(const InitProfile& profile, int r, std::optional<Interval> domain = std::nullopt);

}  // namespace schr
