#include <cmath>

#include "schr/harness.hpp"

namespace schr {

double relative_error(const CVector& approx, const CVector& exact) {
  if (approx.size() != exact.size()) throw ConfigError("relative_error: size mismatch");
  const double scale = exact.norm();
  const double diff = (approx - exact).norm();
  return scale > 0.0 ? diff / scale : diff;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need at least two aligned points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

PipelineResult run_pipeline(const DynamicalSystem& sys, const ProfileSpec& spec, const PipelineOptions& opts) {
  const double T = sys.horizon();
  PipelineResult res;
  res.homogenized = homogenize(sys);
  res.split = hermitian_split(res.homogenized, opts.time_samples);
  const std::vector<double> t_grid = uniform_time_grid(T, opts.time_samples);
  res.bounds = spectral_bounds(res.split, t_grid);

  DomainExtent extent = choose_domain(res.bounds, T, opts.epsilon, spec.left_support());
  if (opts.L || opts.R) extent = snap_domain(opts.L.value_or(extent.L), opts.R.value_or(extent.R));

  const InitProfile profile = build_profile(spec, extent.R);
  res.profile_id = profile.id();
  const std::size_t n_p = opts.n_p.value_or(0) > 0 ? *opts.n_p : choose_resolution(profile, extent, opts.epsilon);
  res.domain = WarpedDomain(extent.L, extent.R, n_p);

  res.psi_samples = sample_profile(profile, res.domain, opts.threads);
  const WarpedState fourier0 = to_fourier(initialize(res.psi_samples, res.homogenized.u_i));
  res.lifted = sys.time_dependent() || opts.force_lift;
  if (res.lifted) {
    const LiftConfig cfg = opts.lift.value_or(make_lift_config(T));
    LiftDiagnostics diag;
    res.fourier_T = lift_and_evolve(res.split, fourier0, res.domain, cfg, T, opts.threads, &diag);
    res.lift = diag;
  } else {
    EvolveDiagnostics diag;
    res.fourier_T = evolve_time_independent(fourier0, res.domain, res.split, T, opts.threads, &diag);
    res.max_unitarity_defect = diag.max_unitarity_defect;
  }
  const double n0 = fourier0.values.norm();
  res.fourier_norm_drift = n0 > 0.0 ? std::abs(res.fourier_T.values.norm() - n0) / n0 : 0.0;

  res.physical_T = from_fourier(res.fourier_T);
  res.window = make_recovery_window(res.domain, res.bounds, T, profile.p_star(), opts.p_ub);
  res.recovery = recover(res.physical_T, res.domain, res.window, sys.dim(), opts.average);
  res.probability =
      success_probability(res.physical_T, res.window, res.psi_samples, res.homogenized.u_i, res.recovery);
  return res;
}

namespace {

nlohmann::json complex_vector_json(const CVector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

}  // namespace

nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::json j;
  j["profile"] = r.profile_id;
  j["domain"] = {{"L", r.domain.L()}, {"R", r.domain.R()}, {"n_p", r.domain.n_p()}, {"dp", r.domain.dp()},
                 {"mu_max", r.domain.mu_max()}};
  j["spectral_bounds"] = {{"lambda_plus", r.bounds.lambda_plus},
                          {"lambda_minus", r.bounds.lambda_minus},
                          {"lambda_abs", r.bounds.lambda_abs()}};
  j["alpha"] = {{"alpha1", r.split.alpha1}, {"alpha2", r.split.alpha2}};
  j["window"] = {{"p_diamond", r.window.p_diamond},
                 {"p_star", r.window.p_star},
                 {"p_ub", r.window.p_ub},
                 {"k_star", r.window.k_star},
                 {"p_k_star", r.domain.p(r.window.k_star)},
                 {"size", r.window.k_set.size()}};
  j["u_recovered"] = complex_vector_json(r.recovery.u);
  j["u_f_recovered"] = complex_vector_json(r.recovery.u_f);
  j["probability"] = {{"pr_w", r.probability.pr_w},
                      {"pr_u", r.probability.pr_u},
                      {"g", r.probability.g},
                      {"ce0_sq_over_ce_sq", r.probability.ce0_sq_over_ce_sq}};
  j["lifted"] = r.lifted;
  j["fourier_norm_drift"] = r.fourier_norm_drift;
  j["max_unitarity_defect"] = r.max_unitarity_defect;
  if (r.lift) j["lift"] = {{"n_steps", r.lift->n_steps}, {"dt", r.lift->dt}, {"norm_drift", r.lift->max_norm_drift}};
  return j;
}

}  // namespace schr
