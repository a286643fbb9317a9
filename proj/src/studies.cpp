#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>

#include "schr/harness.hpp"
#include "schr/parallel.hpp"

namespace schr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t pow2_at_least(double x, std::size_t floor_np) {
  std::size_t n = floor_np;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

// u(T) read off at a fixed p from the continuous reconstruction.
CVector recovered_at(const PipelineResult& r, double p, Eigen::Index dim) {
  return std::exp(p) * evaluate_at(r.fourier_T, r.domain, p).head(dim);
}

void csv_header(std::ostream& os) { os << std::setprecision(17); }

}  // namespace

// ---------------------------------------------------------------------------

ConvergenceReport convergence_study(const DynamicalSystem& sys, const ProfileSpec& spec,
                                    const std::vector<std::size_t>& n_p_list, PipelineOptions opts,
                                    double oracle_tol) {
  if (n_p_list.size() < 2) throw ConfigError("convergence study: need at least two resolutions");
  for (std::size_t i = 1; i < n_p_list.size(); ++i)
    if (n_p_list[i] <= n_p_list[i - 1]) throw ConfigError("convergence study: n_p list must increase");

  const ReferenceSolution ref = solve_reference(sys, oracle_tol);
  ConvergenceReport rep;
  rep.profile_spec = spec.to_string();
  rep.epsilon = opts.epsilon;
  rep.oracle_tol = oracle_tol;
  rep.oracle_method = to_string(ref.method);
  rep.n_p = n_p_list;
  const std::size_t n = n_p_list.size();
  rep.mu_max.assign(n, 0.0);
  rep.errors.assign(n, 0.0);
  rep.runtime_s.assign(n, 0.0);
  std::vector<std::string> ids(n);
  std::vector<double> ls(n), rs(n);

  // Outer parallelism over resolutions; each run is single-threaded.
  const unsigned outer = resolve_threads(opts.threads);
  PipelineOptions inner = opts;
  if (outer > 1) inner.threads = 1;
  parallel_for(n, outer, [&](std::size_t i) {
    PipelineOptions o = inner;
    o.n_p = n_p_list[i];
    const auto start = Clock::now();
    const PipelineResult r = run_pipeline(sys, spec, o);
    rep.runtime_s[i] = seconds_since(start);
    rep.errors[i] = relative_error(r.recovery.u, ref.u_T);
    rep.mu_max[i] = r.domain.mu_max();
    ids[i] = r.profile_id;
    ls[i] = r.domain.L();
    rs[i] = r.domain.R();
  });
  rep.profile_id = ids.front();
  rep.L = ls.front();
  rep.R = rs.front();

  const double floor_level = 10.0 * oracle_tol;
  std::vector<double> x, y;
  rep.in_fit.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    rep.in_fit[i] = rep.errors[i] >= floor_level;
    if (rep.in_fit[i]) {
      x.push_back(std::log(static_cast<double>(n_p_list[i])));
      y.push_back(std::log(rep.errors[i]));
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double num = std::log(rep.errors[i] / rep.errors[i + 1]);
    const double den = std::log(static_cast<double>(n_p_list[i + 1]) / static_cast<double>(n_p_list[i]));
    rep.pairwise_orders.push_back(num / den);
  }
  rep.ls_order = x.size() >= 2 ? -fit_line(x, y).slope : std::nan("");
  if (x.size() >= 3) {
    rep.ls_order_drop_first =
        -fit_line(std::vector<double>(x.begin() + 1, x.end()), std::vector<double>(y.begin() + 1, y.end())).slope;
  } else {
    rep.ls_order_drop_first = std::nan("");
  }
  return rep;
}

// ---------------------------------------------------------------------------

MuScalingReport mu_scaling_study(const DynamicalSystem& sys, const std::string& family_name,
                                 const ProfileFamily& family, const std::vector<double>& eps_list,
                                 std::size_t n_p_cap, PipelineOptions opts, double oracle_tol) {
  if (eps_list.empty()) throw ConfigError("mu-scaling study: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) throw ConfigError("mu-scaling study: eps must lie in (0, 1)");
    if (i > 0 && eps_list[i] >= eps_list[i - 1]) throw ConfigError("mu-scaling study: eps list must decrease");
  }
  const ReferenceSolution ref = solve_reference(sys, oracle_tol);
  MuScalingReport rep;
  rep.family = family_name;
  rep.n_p_cap = n_p_cap;
  rep.oracle_tol = oracle_tol;

  // The first passage for eps_i is at least that for eps_{i-1}, so each scan resumes there.
  std::size_t start_np = rep.n_p_min;
  for (double eps : eps_list) {
    const auto start = Clock::now();
    MuScalingRow row;
    row.epsilon = eps;
    const ProfileSpec spec = family(eps);
    PipelineOptions o = opts;
    o.epsilon = eps;
    for (std::size_t n_p = start_np; n_p <= n_p_cap; n_p <<= 1) {
      o.n_p = n_p;
      try {
        const PipelineResult r = run_pipeline(sys, spec, o);
        row.profile_id = r.profile_id;
        row.n_p = n_p;
        row.mu_max = r.domain.mu_max();
        row.error = relative_error(r.recovery.u, ref.u_T);
        if (row.error <= eps) {
          row.reached = true;
          start_np = n_p;
          break;
        }
      } catch (const ConfigError&) {
        // grid too coarse for a non-empty recovery window
      }
    }
    rep.rows.push_back(row);
    rep.runtime_s.push_back(seconds_since(start));
    if (!row.reached) start_np = n_p_cap << 1;
  }

  std::vector<double> lx, ly, sy;
  for (const auto& row : rep.rows) {
    if (!row.reached) continue;
    const double l = std::log(1.0 / row.epsilon);
    lx.push_back(l);
    ly.push_back(std::log(row.mu_max));
    sy.push_back(row.mu_max);
    rep.max_ratio_mu_over_log = std::max(rep.max_ratio_mu_over_log, row.mu_max / l);
  }
  if (lx.size() >= 2) {
    rep.loglog = fit_line(lx, ly);
    rep.semilog = fit_line(lx, sy);
  }
  return rep;
}

// ---------------------------------------------------------------------------

GrowthReport growth_study(ProfileKind family, const std::vector<int>& r_list, double cutoff_R) {
  if (r_list.size() < 2) throw ConfigError("growth study: need at least two orders");
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    if (r_list[i] < 1) throw ConfigError("growth study: orders must be positive");
    if (i > 0 && r_list[i] <= r_list[i - 1]) throw ConfigError("growth study: orders must increase");
  }
  GrowthReport rep;
  rep.family = to_string(family);
  rep.r = r_list;
  for (int r : r_list) {
    std::optional<InitProfile> profile;
    double parameter = 0.0;
    switch (family) {
      case ProfileKind::Erf:
        parameter = 2.0 * std::sqrt(static_cast<double>(r));
        profile = make_erf_scaled(parameter);
        break;
      case ProfileKind::Cutoff:
        parameter = r;
        profile = make_cutoff(cutoff_R, parameter);
        break;
      case ProfileKind::Quartic:
        parameter = 2.0 * std::pow(static_cast<double>(r), 0.25);
        profile = make_quartic_scaled(parameter);
        break;
      default:
        throw ConfigError("growth study: family must be erf, cutoff or quartic");
    }
    if (r > profile->deriv_order_max())
      throw ConfigError("growth study: order " + std::to_string(r) + " exceeds the " + rep.family + " limit " +
                        std::to_string(profile->deriv_order_max()));
    const LogMagnitude norm = deriv_l2_norm(*profile, r);
    rep.parameter.push_back(parameter);
    rep.log_norm.push_back(norm.log_value);
    rep.value.push_back(norm.root(r));
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    x.push_back(std::log(static_cast<double>(r_list[i])));
    y.push_back(rep.log_norm[i] / r_list[i]);
  }
  rep.slope = fit_line(x, y).slope;
  rep.beta_estimate = 1.0 / rep.slope;
  if (x.size() >= 3) {
    rep.slope_drop_first =
        fit_line(std::vector<double>(x.begin() + 1, x.end()), std::vector<double>(y.begin() + 1, y.end())).slope;
    rep.robustness = std::abs(rep.slope_drop_first - rep.slope) / std::abs(rep.slope);
  } else {
    rep.slope_drop_first = rep.slope;
  }
  return rep;
}

// ---------------------------------------------------------------------------

TruncationReport truncation_check(const DynamicalSystem& sys, const ProfileSpec& spec, double epsilon,
                                  const std::vector<double>& offsets, double dp_target, unsigned threads) {
  if (!(dp_target > 0.0)) throw ConfigError("truncation check: dp target must be positive");
  std::set<double> all(offsets.begin(), offsets.end());
  all.insert(0.0);
  all.insert(2.0);
  const double ref_offset = *all.rbegin() + 8.0;

  PipelineOptions base;
  base.epsilon = epsilon;
  base.threads = threads;
  const HermitianSplit split = hermitian_split(homogenize(sys), base.time_samples);
  const std::vector<double> t_grid = uniform_time_grid(sys.horizon(), base.time_samples);
  const DomainExtent crit = choose_domain(spectral_bounds(split, t_grid), sys.horizon(), epsilon, spec.left_support());
  const double Lc = crit.L;
  const double Rc = crit.R;

  auto run_at = [&](double offset) {
    PipelineOptions o = base;
    const DomainExtent ext = snap_domain(Lc + offset, Rc + offset);
    if (!(ext.L > 0.0 && ext.R > 0.0)) throw ConfigError("truncation check: offset empties the domain");
    o.L = ext.L;
    o.R = ext.R;
    o.n_p = pow2_at_least((ext.L + ext.R) / dp_target, 16);
    return run_pipeline(sys, spec, o);
  };

  TruncationReport rep;
  rep.epsilon = epsilon;
  rep.dp_target = dp_target;
  rep.criterion_half_width = Rc;
  rep.reference_half_width = Rc + ref_offset;

  const PipelineResult criterion = run_at(0.0);
  rep.profile_id = criterion.profile_id;
  rep.p_eval = criterion.domain.p(criterion.window.k_star);
  const Eigen::Index dim = sys.dim();
  const CVector u_ref = recovered_at(run_at(ref_offset), rep.p_eval, dim);
  const double scale = std::max(u_ref.norm(), std::numeric_limits<double>::min());

  CVector u_c, u_wide;
  for (double offset : all) {
    const PipelineResult r = offset == 0.0 ? criterion : run_at(offset);
    const CVector u = recovered_at(r, rep.p_eval, dim);
    if (offset == 0.0) u_c = u;
    if (offset == 2.0) u_wide = u;
    rep.rows.push_back({Rc + offset, r.domain.n_p(), (u - u_ref).norm() / scale});
  }
  rep.widening_change = (u_wide - u_c).norm() / std::max(u_c.norm(), std::numeric_limits<double>::min());

  std::vector<double> x, y;
  for (const auto& row : rep.rows) {
    if (row.half_width <= Rc && row.error > 0.0) {
      x.push_back(row.half_width);
      y.push_back(std::log(row.error));
    }
  }
  rep.decay_rate = x.size() >= 2 ? -fit_line(x, y).slope : std::nan("");

  // max_t ||w(t, -L)|| on the criterion domain
  const WarpedDomain& dom = criterion.domain;
  const WarpedState f0 = to_fourier(initialize(criterion.psi_samples, criterion.homogenized.u_i));
  const double T = sys.horizon();
  double trace = from_fourier(f0).values.row(0).norm();
  constexpr int kTraceSamples = 16;
  for (int j = 1; j <= kTraceSamples; ++j) {
    const double t = T * j / kTraceSamples;
    WarpedState ft;
    if (criterion.lifted) {
      ft = lift_and_evolve(criterion.split, f0, dom, make_lift_config(T), t, threads);
    } else {
      ft = evolve_time_independent(f0, dom, criterion.split, t, threads);
    }
    trace = std::max(trace, from_fourier(ft).values.row(0).norm());
  }
  rep.boundary_trace = trace / criterion.homogenized.u_i.norm();
  return rep;
}

// ---------------------------------------------------------------------------

const ComplexityRow& ComplexityEstimate::row(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return r;
  throw ConfigError("complexity: unknown method " + method);
}

ComplexityEstimate query_estimate(const ComplexityInputs& in) {
  if (!(in.beta > 0.0 && in.beta <= 1.0)) throw ConfigError("complexity: beta must lie in (0, 1]");
  if (!(in.epsilon > 0.0 && in.epsilon < 1.0)) throw ConfigError("complexity: eps must lie in (0, 1)");
  if (!(in.alpha_h > 0.0) || !(in.T > 0.0) || !(in.norm_ratio > 0.0) || !(in.kappa_v > 0.0))
    throw ConfigError("complexity: alpha_H, T, norm ratio and kappa_V must be positive");
  if (!(in.norm_ratio / in.epsilon > 1.0)) throw ConfigError("complexity: norm ratio / eps must exceed 1");

  const double ur = in.norm_ratio;
  const double at = in.alpha_h * in.T;
  const double own_log = std::log(ur / in.epsilon);
  const double lg = std::log(1.0 / in.epsilon);
  const double inv_beta = 1.0 / in.beta;

  ComplexityEstimate est;
  est.inputs = in;
  est.rows = {
      {"this-work-time-independent", true, ur * at * std::pow(own_log, inv_beta), ur,
       "u_r alpha_H T log(u_r/eps)^(1/beta)"},
      {"this-work-time-dependent", true, ur * at * std::pow(own_log, 1.0 + inv_beta), ur,
       "u_r alpha_H T log(u_r/eps)^(1+1/beta)"},
      {"lchs-improved-time-dependent", false, ur * at * std::pow(lg, 1.0 + inv_beta), ur,
       "u_r alpha_A T log(1/eps)^(1+1/beta)"},
      {"lchs-improved-time-independent", false, ur * at * std::pow(lg, inv_beta), ur,
       "u_r alpha_A T log(1/eps)^(1/beta)"},
      {"lchs-optimal-time-independent", false, ur * at * lg, ur, "u_r alpha_A T log(1/eps)"},
      {"truncated-dyson", false, ur * at * lg * lg, ur * at * lg, "u_r alpha_A T log(1/eps)^2"},
      {"time-marching", false, ur * at * at * lg, ur, "u_r alpha_A^2 T^2 log(1/eps)"},
      {"spectral", false, ur * in.kappa_v * at * lg, ur * in.kappa_v * at * lg,
       "u_r kappa_V alpha_A T log(1/eps) (poly(log) taken as first power)"},
  };
  return est;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& os, const ConvergenceReport& r) {
  csv_header(os);
  os << "# study=converge profile=" << r.profile_id << " spec=" << r.profile_spec << " eps=" << r.epsilon
     << " L=" << r.L << " R=" << r.R << " oracle=" << r.oracle_method << " oracle_tol=" << r.oracle_tol << '\n';
  os << "# ls_order=" << r.ls_order << " ls_order_drop_first=" << r.ls_order_drop_first << '\n';
  os << "n_p,mu_max,error,in_fit,pairwise_order\n";
  for (std::size_t i = 0; i < r.n_p.size(); ++i) {
    os << r.n_p[i] << ',' << r.mu_max[i] << ',' << r.errors[i] << ',' << (r.in_fit[i] ? 1 : 0) << ',';
    if (i > 0) os << r.pairwise_orders[i - 1];
    os << '\n';
  }
}

void write_csv(std::ostream& os, const MuScalingReport& r) {
  csv_header(os);
  os << "# study=mu-scaling family=" << r.family << " n_p_min=" << r.n_p_min << " n_p_cap=" << r.n_p_cap
     << " oracle_tol=" << r.oracle_tol << '\n';
  os << "# loglog_slope=" << r.loglog.slope << " semilog_slope=" << r.semilog.slope
     << " semilog_r2=" << r.semilog.r_squared << " max_mu_over_log=" << r.max_ratio_mu_over_log << '\n';
  os << "epsilon,log_inv_eps,reached,n_p,mu_max,error,profile\n";
  for (const auto& row : r.rows) {
    os << row.epsilon << ',' << std::log(1.0 / row.epsilon) << ',' << (row.reached ? 1 : 0) << ',' << row.n_p
       << ',' << row.mu_max << ',' << row.error << ',' << row.profile_id << '\n';
  }
}

void write_csv(std::ostream& os, const GrowthReport& r) {
  csv_header(os);
  os << "# study=growth family=" << r.family << " slope=" << r.slope << " beta_estimate=" << r.beta_estimate
     << " slope_drop_first=" << r.slope_drop_first << " robustness=" << r.robustness << '\n';
  os << "r,parameter,log_norm,value\n";
  for (std::size_t i = 0; i < r.r.size(); ++i)
    os << r.r[i] << ',' << r.parameter[i] << ',' << r.log_norm[i] << ',' << r.value[i] << '\n';
}

void write_csv(std::ostream& os, const TruncationReport& r) {
  csv_header(os);
  os << "# study=truncation profile=" << r.profile_id << " eps=" << r.epsilon
     << " criterion_half_width=" << r.criterion_half_width << " reference_half_width=" << r.reference_half_width
     << " dp_target=" << r.dp_target << " p_eval=" << r.p_eval << '\n';
  os << "# widening_change=" << r.widening_change << " decay_rate=" << r.decay_rate
     << " boundary_trace=" << r.boundary_trace << '\n';
  os << "half_width,n_p,error\n";
  for (const auto& row : r.rows) os << row.half_width << ',' << row.n_p << ',' << row.error << '\n';
}

void write_csv(std::ostream& os, const ComplexityEstimate& r) {
  csv_header(os);
  os << "# study=complexity alpha_H=" << r.inputs.alpha_h << " T=" << r.inputs.T << " eps=" << r.inputs.epsilon
     << " norm_ratio=" << r.inputs.norm_ratio << " beta=" << r.inputs.beta << " kappa_V=" << r.inputs.kappa_v
     << '\n';
  os << "# constants set to 1; foreign rows are reference formulas only (order of magnitude)\n";
  os << "method,this_work,queries,state_preparations,formula\n";
  for (const auto& row : r.rows)
    os << row.method << ',' << (row.this_work ? 1 : 0) << ',' << row.queries << ',' << row.state_preparations
       << ",\"" << row.formula << "\"\n";
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["study"] = "converge";
  j["profile"] = r.profile_id;
  j["profile_spec"] = r.profile_spec;
  j["epsilon"] = r.epsilon;
  j["L"] = r.L;
  j["R"] = r.R;
  j["oracle"] = {{"method", r.oracle_method}, {"tol", r.oracle_tol}};
  j["n_p"] = r.n_p;
  j["mu_max"] = r.mu_max;
  j["errors"] = r.errors;
  j["in_fit"] = r.in_fit;
  j["pairwise_orders"] = r.pairwise_orders;
  j["ls_order"] = r.ls_order;
  j["ls_order_drop_first"] = r.ls_order_drop_first;
  j["runtime_s"] = r.runtime_s;
  return j;
}

nlohmann::json to_json(const MuScalingReport& r) {
  nlohmann::json j;
  j["study"] = "mu-scaling";
  j["family"] = r.family;
  j["n_p_min"] = r.n_p_min;
  j["n_p_cap"] = r.n_p_cap;
  j["oracle_tol"] = r.oracle_tol;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"epsilon", row.epsilon},
                    {"reached", row.reached},
                    {"n_p", row.n_p},
                    {"mu_max", row.mu_max},
                    {"error", row.error},
                    {"profile", row.profile_id}});
  j["rows"] = rows;
  j["loglog"] = {{"slope", r.loglog.slope}, {"intercept", r.loglog.intercept}, {"r_squared", r.loglog.r_squared}};
  j["semilog"] = {
      {"slope", r.semilog.slope}, {"intercept", r.semilog.intercept}, {"r_squared", r.semilog.r_squared}};
  j["max_ratio_mu_over_log"] = r.max_ratio_mu_over_log;
  j["runtime_s"] = r.runtime_s;
  return j;
}

nlohmann::json to_json(const GrowthReport& r) {
  return {{"study", "growth"},
          {"family", r.family},
          {"r", r.r},
          {"parameter", r.parameter},
          {"log_norm", r.log_norm},
          {"value", r.value},
          {"slope", r.slope},
          {"beta_estimate", r.beta_estimate},
          {"slope_drop_first", r.slope_drop_first},
          {"robustness", r.robustness}};
}

nlohmann::json to_json(const TruncationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back({{"half_width", row.half_width}, {"n_p", row.n_p}, {"error", row.error}});
  return {{"study", "truncation"},
          {"profile", r.profile_id},
          {"epsilon", r.epsilon},
          {"criterion_half_width", r.criterion_half_width},
          {"reference_half_width", r.reference_half_width},
          {"dp_target", r.dp_target},
          {"p_eval", r.p_eval},
          {"rows", rows},
          {"widening_change", r.widening_change},
          {"decay_rate", r.decay_rate},
          {"boundary_trace", r.boundary_trace}};
}

nlohmann::json to_json(const ComplexityEstimate& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"method", row.method},
                    {"this_work", row.this_work},
                    {"queries", row.queries},
                    {"state_preparations", row.state_preparations},
                    {"formula", row.formula},
                    {"note", row.this_work ? "constants set to 1" : "reference formula only"}});
  return {{"study", "complexity"},
          {"inputs",
           {{"alpha_H", r.inputs.alpha_h},
            {"T", r.inputs.T},
            {"epsilon", r.inputs.epsilon},
            {"norm_ratio", r.inputs.norm_ratio},
            {"beta", r.inputs.beta},
            {"kappa_V", r.inputs.kappa_v}}},
          {"rows", rows}};
}

}  // namespace schr
