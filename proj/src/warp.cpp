#include "schr/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "fft.hpp"
#include "schr/expm.hpp"
#include "schr/parallel.hpp"

namespace schr {

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(double target, std::size_t floor_value) {
  std::size_t n = floor_value;
  while (static_cast<double>(n) < target) {
    if (n > (std::size_t{1} << 40)) throw ConfigError("resolution rule exceeds supported grid sizes");
    n *= 2;
  }
  return n;
}

double round_up_to_cell(double x) { return std::ceil(x / kDomainCell - 1e-9) * kDomainCell; }

// Small generators use fixed-capacity storage so the per-mode exponentials avoid the heap.
using SmallMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, 16>;

template <typename Mat>
double evolve_rows(CMatrix& values, const WarpedDomain& domain, const CMatrix& h1, const CMatrix& h2, double T,
                   unsigned threads) {
  const std::size_t n = domain.n_p();
  std::vector<double> defects(n, 0.0);
  const Mat h1m = h1;
  const Mat h2m = h2;
  const cplx minus_i_t(0.0, -T);
  parallel_for(n, threads, [&](std::size_t k) {
    const Mat gen = minus_i_t * (domain.mu(k) * h1m - h2m);
    const Mat v = expm(gen);
    defects[k] = unitarity_defect(v);
    const auto row = static_cast<Eigen::Index>(k);
    values.row(row) = (v * values.row(row).transpose()).transpose();
  });
  return *std::max_element(defects.begin(), defects.end());
}

}  // namespace

WarpedDomain::WarpedDomain(double L, double R, std::size_t n_p) : L_(L), R_(R), n_p_(n_p) {
  if (!(L > 0.0) || !(R > 0.0) || !std::isfinite(L) || !std::isfinite(R))
    throw ConfigError("domain: L and R must be positive");
  if (!is_power_of_two(n_p) || n_p < 2) throw ConfigError("domain: n_p must be a power of two >= 2");
}

double WarpedDomain::mu(std::size_t k) const {
  return 2.0 * std::numbers::pi / (L_ + R_) * (static_cast<double>(k) - static_cast<double>(n_p_ / 2));
}

double WarpedDomain::mu_max() const { return static_cast<double>(n_p_) * std::numbers::pi / (L_ + R_); }

std::vector<double> WarpedDomain::grid() const {
  std::vector<double> g(n_p_);
  for (std::size_t k = 0; k < n_p_; ++k) g[k] = p(k);
  return g;
}

std::vector<double> WarpedDomain::modes() const {
  std::vector<double> m(n_p_);
  for (std::size_t k = 0; k < n_p_; ++k) m[k] = mu(k);
  return m;
}

DomainExtent snap_domain(double L, double R) {
  if (!(L > 0.0) || !(R > 0.0)) throw ConfigError("domain: L and R must be positive");
  double lr = round_up_to_cell(L);
  double rr = round_up_to_cell(R);
  if (lr == rr) return {lr, rr};
  // Make 16 L / (L + R) an integer so that L is a whole number of cells for every n_p >= 16.
  const double total = lr + rr;
  const double j = std::floor(16.0 * lr / total);
  if (j < 1.0) {
    // L below one sixteenth of the width: widen L until it is exactly one sixteenth
    lr = std::max(lr, rr / 15.0);
    return {lr, 15.0 * lr};
  }
  const double width = 16.0 * lr / j;
  return {lr, width - lr};
}

DomainExtent choose_domain(const SpectralBounds& bounds, double T, double epsilon, double left_support) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("choose_domain: eps must lie in (0, 1)");
  if (!(T > 0.0)) throw ConfigError("choose_domain: T must be positive");
  const double base = bounds.lambda_abs() * T + std::log(1.0 / epsilon);
  const double left = std::max(base, left_support + bounds.lambda_minus * T);
  return snap_domain(left, base);
}

// Smooth profiles: r = ceil(ln(1/eps)) and mu_target = pi (1/eps)^{1/r} ||psi^(r)||^{1/r};
// ExpAbs: first-order rule dp <= eps.
std::size_t choose_resolution(const InitProfile& profile, const DomainExtent& extent, double epsilon) {
  constexpr std::size_t floor_np = 16;
  if (!(epsilon > 0.0)) throw ConfigError("choose_resolution: eps must be positive");
  const double width = extent.L + extent.R;
  if (epsilon >= 1.0) return floor_np;
  if (profile.kind() == ProfileKind::ExpAbs) return next_power_of_two(width / epsilon, floor_np);
  const int r = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / epsilon))));
  if (r > profile.deriv_order_max())
    throw ConfigError("choose_resolution: required order " + std::to_string(r) + " exceeds " + profile.id() +
                      " derivative limit " + std::to_string(profile.deriv_order_max()));
  const LogMagnitude norm = deriv_l2_norm(profile, r, Interval{-extent.L, extent.R});
  const double mu_target = std::numbers::pi * std::exp((std::log(1.0 / epsilon) + norm.log_value) / r);
  return next_power_of_two(mu_target * width / std::numbers::pi, floor_np);
}

std::vector<double> sample_profile(const InitProfile& profile, const WarpedDomain& domain, unsigned threads) {
  std::vector<double> s(domain.n_p());
  parallel_for(domain.n_p(), threads, [&](std::size_t k) { s[k] = profile(domain.p(k)); });
  return s;
}

WarpedState initialize(std::span<const double> psi_samples, const CVector& u_i) {
  WarpedState st;
  st.values.resize(static_cast<Eigen::Index>(psi_samples.size()), u_i.size());
  for (std::size_t k = 0; k < psi_samples.size(); ++k)
    st.values.row(static_cast<Eigen::Index>(k)) = psi_samples[k] * u_i.transpose();
  st.representation = Representation::Physical;
  st.time = 0.0;
  return st;
}

WarpedState initialize(const InitProfile& profile, const WarpedDomain& domain, const CVector& u_i) {
  const std::vector<double> s = sample_profile(profile, domain);
  return initialize(s, u_i);
}

WarpedState to_fourier(const WarpedState& state) {
  if (state.representation != Representation::Physical) throw ConfigError("to_fourier: state is not physical");
  if (!is_power_of_two(static_cast<std::size_t>(state.values.rows())))
    throw ConfigError("to_fourier: row count must be a power of two");
  WarpedState out = state;
  detail::centred_dft_columns(out.values, false);
  out.representation = Representation::Fourier;
  return out;
}

WarpedState from_fourier(const WarpedState& state) {
  if (state.representation != Representation::Fourier) throw ConfigError("from_fourier: state is not in Fourier form");
  WarpedState out = state;
  detail::centred_dft_columns(out.values, true);
  out.representation = Representation::Physical;
  return out;
}

WarpedState evolve_time_independent(const WarpedState& state, const WarpedDomain& domain, const HermitianSplit& split,
                                    double T, unsigned threads, EvolveDiagnostics* diagnostics) {
  if (state.representation != Representation::Fourier) throw ConfigError("evolve: state must be in Fourier form");
  if (split.time_dependent) throw ConfigError("evolve: split is time dependent; use the lifted evolution");
  if (static_cast<std::size_t>(state.values.rows()) != domain.n_p()) throw ConfigError("evolve: state/domain mismatch");
  const CMatrix h1 = split.h1(0.0);
  const CMatrix h2 = split.h2(0.0);
  if (h1.rows() != state.values.cols()) throw ConfigError("evolve: state width does not match the system");
  WarpedState out = state;
  const double defect = h1.rows() <= 16 ? evolve_rows<SmallMatrix>(out.values, domain, h1, h2, T, threads)
                                        : evolve_rows<CMatrix>(out.values, domain, h1, h2, T, threads);
  if (defect > kUnitarityFailure)
    throw NumericalError("evolve: per-mode propagator lost unitarity (defect " + std::to_string(defect) + ")");
  if (diagnostics) diagnostics->max_unitarity_defect = defect;
  out.time = state.time + T;
  return out;
}

RecoveryWindow make_recovery_window(const WarpedDomain& domain, const SpectralBounds& bounds, double T, double p_star,
                                    std::optional<double> p_ub) {
  RecoveryWindow w;
  w.p_diamond = bounds.lambda_plus * T;
  w.p_star = p_star;
  const double dp = domain.dp();
  const double lower = p_star + w.p_diamond;
  const double upper = domain.R() - bounds.lambda_minus * T;
  const double threshold = lower + 2.0 * dp;
  w.p_ub = p_ub.value_or(std::max({1.0, w.p_diamond + 1.0, threshold + 1.000001 * dp}));
  const double slack = 1e-9 * dp;
  bool have_star = false;
  for (std::size_t k = 0; k < domain.n_p(); ++k) {
    const double p = domain.p(k);
    if (p > lower + slack && p < upper - slack && p <= w.p_ub + slack) {
      w.k_set.push_back(k);
      if (!have_star && p >= threshold - slack) {
        w.k_star = k;
        have_star = true;
      }
    }
  }
  if (w.k_set.empty() || !have_star)
    throw ConfigError("recovery window is empty: no grid node in (" + std::to_string(threshold) + ", " +
                      std::to_string(std::min(upper, w.p_ub)) + "); refine the grid or widen R");
  return w;
}

Recovery recover(const WarpedState& physical, const WarpedDomain& domain, const RecoveryWindow& window,
                 Eigen::Index original_dim, bool average) {
  if (physical.representation != Representation::Physical) throw ConfigError("recover: state must be physical");
  if (window.k_set.empty()) throw ConfigError("recover: empty recovery window");
  if (original_dim > physical.values.cols()) throw ConfigError("recover: original dimension too large");
  Recovery r;
  if (!average) {
    const auto k = static_cast<Eigen::Index>(window.k_star);
    r.u_f = std::exp(domain.p(window.k_star)) * physical.values.row(k).transpose();
  } else {
    r.u_f = CVector::Zero(physical.values.cols());
    for (std::size_t k : window.k_set)
      r.u_f += std::exp(domain.p(k)) * physical.values.row(static_cast<Eigen::Index>(k)).transpose();
    r.u_f /= static_cast<double>(window.k_set.size());
  }
  r.u = r.u_f.head(original_dim);
  return r;
}

SuccessProbability success_probability(const WarpedState& physical, const RecoveryWindow& window,
                                       std::span<const double> psi_samples, const CVector& u_i,
                                       const Recovery& recovery) {
  if (physical.representation != Representation::Physical)
    throw ConfigError("success_probability: state must be physical");
  double ce_sq = 0.0;
  for (double s : psi_samples) ce_sq += s * s;
  const double w0_sq = ce_sq * u_i.squaredNorm();
  if (!(w0_sq > 0.0)) throw ConfigError("success_probability: initial state has zero norm");
  double window_sq = 0.0;
  double ce0_sq = 0.0;
  for (std::size_t k : window.k_set) {
    window_sq += physical.values.row(static_cast<Eigen::Index>(k)).squaredNorm();
    ce0_sq += psi_samples[k] * psi_samples[k];
  }
  SuccessProbability sp;
  sp.pr_w = window_sq / w0_sq;
  const double uf_sq = recovery.u_f.squaredNorm();
  sp.pr_u = uf_sq > 0.0 ? sp.pr_w * recovery.u.squaredNorm() / uf_sq : 0.0;
  sp.g = sp.pr_u > 0.0 ? std::ceil(1.0 / std::sqrt(sp.pr_u)) : std::numeric_limits<double>::infinity();
  sp.ce0_sq_over_ce_sq = ce0_sq / ce_sq;
  return sp;
}

CVector evaluate_at(const WarpedState& fourier, const WarpedDomain& domain, double p) {
  if (fourier.representation != Representation::Fourier) throw ConfigError("evaluate_at: state must be in Fourier form");
  CVector out = CVector::Zero(fourier.values.cols());
  for (std::size_t l = 0; l < domain.n_p(); ++l) {
    const double phase = domain.mu(l) * (p + domain.L());
    out += std::polar(1.0, phase) * fourier.values.row(static_cast<Eigen::Index>(l)).transpose();
  }
  return out;
}

void write_recovery_csv(std::ostream& os, const WarpedState& physical, const WarpedDomain& domain,
                        Eigen::Index original_dim) {
  if (physical.representation != Representation::Physical) throw ConfigError("recovery dump: state must be physical");
  os << "k,p_k,row_norm";
  for (Eigen::Index i = 0; i < original_dim; ++i) os << ",u" << i << "_re,u" << i << "_im";
  os << '\n';
  os.precision(17);
  for (std::size_t k = 0; k < domain.n_p(); ++k) {
    const auto row = physical.values.row(static_cast<Eigen::Index>(k));
    const double scale = std::exp(domain.p(k));
    os << k << ',' << domain.p(k) << ',' << row.norm();
    for (Eigen::Index i = 0; i < original_dim; ++i) {
      const cplx v = scale * row(i);
      os << ',' << v.real() << ',' << v.imag();
    }
    os << '\n';
  }
}

}  // namespace schr
