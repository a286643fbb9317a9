#include "schr/lift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "schr/expm.hpp"
#include "schr/parallel.hpp"

namespace schr {

namespace {

using SmallMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, 16>;

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

struct Schedule {
  std::size_t n_steps;
  double dt;
};

Schedule make_schedule(const LiftConfig& cfg, double T) {
  const std::size_t n = cfg.n_steps.value_or(static_cast<std::size_t>(std::ceil(T / (0.5 * cfg.ds()) - 1e-12)));
  if (n == 0) throw ConfigError("lift: step count must be positive");
  return {n, T / static_cast<double>(n)};
}

// One lifted mode. Returns the relative norm drift of the s-extended state.
template <typename Mat>
double evolve_mode(const std::vector<CMatrix>& h1s, const std::vector<CMatrix>& h2s, double mu, const LiftConfig& cfg,
                   const DeltaKernel& kernel, const Schedule& sched, const std::vector<double>& s_modes,
                   Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> coeff) {
  const std::size_t ns = cfg.n_s;
  const Eigen::Index width = coeff.size();
  CMatrix v(static_cast<Eigen::Index>(ns), width);
  for (std::size_t j = 0; j < ns; ++j) v.row(static_cast<Eigen::Index>(j)) = kernel.samples[j] * coeff;
  const double norm0 = v.norm();

  std::vector<Mat> rot(ns);
  const cplx minus_i_dt(0.0, -sched.dt);
  for (std::size_t j = 0; j < ns; ++j) {
    const Mat gen = minus_i_dt * (mu * Mat(h1s[j]) - Mat(h2s[j]));
    rot[j] = expm(gen);
  }
  std::vector<cplx> half(ns), full(ns);
  for (std::size_t l = 0; l < ns; ++l) {
    half[l] = std::polar(1.0, -s_modes[l] * 0.5 * sched.dt);
    full[l] = half[l] * half[l];
  }
  auto transport = [&](const std::vector<cplx>& phase) {
    detail::centred_dft_columns(v, false);
    for (std::size_t l = 0; l < ns; ++l) v.row(static_cast<Eigen::Index>(l)) *= phase[l];
    detail::centred_dft_columns(v, true);
  };

  transport(half);
  for (std::size_t n = 0; n < sched.n_steps; ++n) {
    for (std::size_t j = 0; j < ns; ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      v.row(row) = (rot[j] * v.row(row).transpose()).transpose();
    }
    transport(n + 1 < sched.n_steps ? full : half);
  }
  const double drift = norm0 > 0.0 ? std::abs(v.norm() - norm0) / norm0 : 0.0;
  coeff = v.colwise().sum() * cfg.ds();
  return drift;
}

}  // namespace

double LiftConfig::ds() const { return 2.0 * std::numbers::pi * S / static_cast<double>(n_s); }

double LiftConfig::s(std::size_t j) const { return -std::numbers::pi * S + static_cast<double>(j) * ds(); }

std::vector<double> LiftConfig::s_grid() const {
  std::vector<double> g(n_s);
  for (std::size_t j = 0; j < n_s; ++j) g[j] = s(j);
  return g;
}

LiftConfig make_lift_config(double T, std::size_t n_s, int m, std::optional<double> S) {
  LiftConfig cfg;
  cfg.n_s = n_s;
  cfg.m = m;
  if (S) {
    cfg.S = *S;
  } else {
    const double shrink = 1.0 - 8.0 * m / static_cast<double>(n_s);
    if (!(shrink > 0.0)) throw ConfigError("lift: n_s must exceed 8 m for the default S");
    cfg.S = std::ceil((T + 1.0) / (std::numbers::pi * shrink) * 64.0) / 64.0;
  }
  validate_lift_config(cfg, T);
  return cfg;
}

void validate_lift_config(const LiftConfig& cfg, double T) {
  if (!is_power_of_two(cfg.n_s) || cfg.n_s < 8) throw ConfigError("lift: n_s must be a power of two >= 8");
  if (cfg.m < 2) throw ConfigError("lift: m must be >= 2");
  if (!(cfg.S > 0.0)) throw ConfigError("lift: S must be positive");
  if (!(std::numbers::pi * cfg.S > 4.0 * cfg.omega() + T))
    throw ConfigError("lift: kernel support leaves the s-domain before T (need pi S > 4 omega + T)");
}

double delta_value(DeltaShape shape, double omega, double x) {
  if (std::abs(x) > omega) return 0.0;
  const double c = std::cos(std::numbers::pi * x / omega);
  if (shape == DeltaShape::RaisedCosine) return (1.0 + c) / (2.0 * omega);
  return (1.0 - 0.5 * std::abs(1.0 + c)) / omega;
}

DeltaKernel delta_kernel(const LiftConfig& cfg) {
  if (cfg.m < 2) throw ConfigError("lift: m must be >= 2");
  DeltaKernel k;
  k.ds = cfg.ds();
  k.samples.resize(cfg.n_s);
  const double omega = cfg.omega();
  double sum = 0.0;
  for (std::size_t j = 0; j < cfg.n_s; ++j) {
    // s_j relative to the centre node n_s/2, computed from the index to keep the support exact
    const double x = (static_cast<double>(j) - static_cast<double>(cfg.n_s / 2)) * k.ds;
    k.samples[j] = delta_value(cfg.shape, omega, x);
    sum += k.samples[j];
  }
  k.raw_sum = sum * k.ds;
  if (!(k.raw_sum > 0.0)) throw NumericalError("lift: kernel has zero mass");
  for (double& v : k.samples) v /= k.raw_sum;
  return k;
}

WarpedState lift_and_evolve(const HermitianSplit& split, const WarpedState& fourier0, const WarpedDomain& domain,
                            const LiftConfig& cfg, double T, unsigned threads, LiftDiagnostics* diagnostics) {
  if (fourier0.representation != Representation::Fourier) throw ConfigError("lift: state must be in Fourier form");
  if (static_cast<std::size_t>(fourier0.values.rows()) != domain.n_p()) throw ConfigError("lift: state/domain mismatch");
  validate_lift_config(cfg, T);
  const DeltaKernel kernel = delta_kernel(cfg);
  const Schedule sched = make_schedule(cfg, T);

  std::vector<CMatrix> h1s(cfg.n_s), h2s(cfg.n_s);
  for (std::size_t j = 0; j < cfg.n_s; ++j) {
    h1s[j] = split.h1(cfg.s(j));
    h2s[j] = split.h2(cfg.s(j));
  }
  if (h1s[0].rows() != fourier0.values.cols()) throw ConfigError("lift: state width does not match the system");
  std::vector<double> s_modes(cfg.n_s);
  for (std::size_t l = 0; l < cfg.n_s; ++l)
    s_modes[l] = (static_cast<double>(l) - static_cast<double>(cfg.n_s / 2)) / cfg.S;

  WarpedState out = fourier0;
  std::vector<double> drift(domain.n_p(), 0.0);
  const bool small = fourier0.values.cols() <= 16;
  parallel_for(domain.n_p(), threads, [&](std::size_t k) {
    auto row = out.values.row(static_cast<Eigen::Index>(k));
    drift[k] = small ? evolve_mode<SmallMatrix>(h1s, h2s, domain.mu(k), cfg, kernel, sched, s_modes, row)
                     : evolve_mode<CMatrix>(h1s, h2s, domain.mu(k), cfg, kernel, sched, s_modes, row);
  });
  out.time = fourier0.time + T;
  if (diagnostics) {
    diagnostics->n_steps = sched.n_steps;
    diagnostics->dt = sched.dt;
    diagnostics->max_norm_drift = *std::max_element(drift.begin(), drift.end());
  }
  return out;
}

}  // namespace schr
