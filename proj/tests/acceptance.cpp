// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "schr/harness.hpp"

using namespace schr;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DynamicalSystem std2_homogeneous() { return builtin_system("std2-homogeneous"); }

// Runtime limits are reported but only enforced where the criterion states one.
Outcome c1_oracle_equivalence() {
  const auto t0 = Clock::now();
  const DynamicalSystem sys = builtin_system("std2");
  PipelineOptions o;
  o.epsilon = 1e-6;
  o.n_p = 512;
  const PipelineResult r = run_pipeline(sys, parse_profile_spec("erf:eps=1e-6"), o);
  const double err = relative_error(r.recovery.u, solve_reference(sys).u_T);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {err <= 1e-5 && secs <= 5.0, fmt("relative error %.3g (<= 1e-5), %.2f s (<= 5 s)", err, secs)};
}

Outcome c2_first_order() {
  const auto t0 = Clock::now();
  PipelineOptions o;
  o.epsilon = 1e-6;
  const ConvergenceReport rep =
      convergence_study(std2_homogeneous(), parse_profile_spec("exp_abs"), {64, 128, 256, 512, 1024}, o);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = rep.ls_order >= 0.7 && rep.ls_order <= 1.3 && secs <= 30.0;
  return {ok, fmt("fitted order %.3f (in [0.7, 1.3]), %.2f s (<= 30 s)", rep.ls_order, secs)};
}

Outcome c3_spectral_law() {
  PipelineOptions o;
  o.epsilon = 1e-6;
  const ConvergenceReport rep =
      convergence_study(std2_homogeneous(), parse_profile_spec("erf:eps=1e-6"), {128, 256, 512}, o, 1e-12);
  const double err512 = rep.errors[2];
  const double order = rep.pairwise_orders[0];
  return {err512 <= 1e-8 && order >= 4.0,
          fmt("error at n_p=512 %.3g (<= 1e-8), order 128->256 %.3f (>= 4)", err512, order)};
}

Outcome c4_mu_scaling() {
  const auto t0 = Clock::now();
  const DynamicalSystem sys = builtin_system("std2");
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  const MuScalingReport a = mu_scaling_study(
      sys, "exp_abs", [](double) { return ProfileSpec{ProfileKind::ExpAbs, 0.0}; }, eps, std::size_t{1} << 22);
  const MuScalingReport b =
      mu_scaling_study(sys, "erf", [](double e) { return ProfileSpec{ProfileKind::Erf, e}; }, eps);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  std::size_t reached_a = 0, reached_b = 0;
  std::string unreached;
  for (const auto& row : a.rows) {
    if (row.reached)
      ++reached_a;
    else
      unreached += fmt(" %.0e", row.epsilon);
  }
  for (const auto& row : b.rows) reached_b += row.reached ? 1 : 0;
  const bool ok_a = reached_a >= 3 && a.loglog.slope >= 0.8 && a.loglog.slope <= 1.2;
  const bool ok_b = reached_b == b.rows.size() && b.semilog.r_squared >= 0.9 && b.max_ratio_mu_over_log <= 10.0;
  std::string detail = fmt("(a) exp_abs slope %.3f over %zu reached eps (in [0.8, 1.2])", a.loglog.slope, reached_a);
  if (!unreached.empty()) detail += "; not reached within n_p <= 2^22:" + unreached;
  detail += fmt("; (b) erf R^2 %.3f (>= 0.9), max mu/log %.3f (<= 10); %.1f s (<= 300 s)", b.semilog.r_squared,
                b.max_ratio_mu_over_log, secs);
  return {ok_a && ok_b && secs <= 300.0, detail};
}

Outcome c5_growth() {
  const auto t0 = Clock::now();
  const GrowthReport erf = growth_study(ProfileKind::Erf, {5, 10, 15, 20, 25, 30, 35, 40});
  const GrowthReport cut = growth_study(ProfileKind::Cutoff, {5, 10, 15, 20});
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = erf.slope <= 1.2 && cut.slope <= 2.3 && erf.robustness < 0.1 && cut.robustness < 0.1 &&
                  secs <= 120.0;
  return {ok, fmt("erf slope %.3f (<= 1.2, robustness %.3f), cutoff slope %.3f (<= 2.3, robustness %.3f), "
                  "%.1f s (<= 120 s)",
                  erf.slope, erf.robustness, cut.slope, cut.robustness, secs)};
}

Outcome c6_conditions() {
  const SpectralBounds sb =
      spectral_bounds(hermitian_split(homogenize(builtin_system("std2"))), uniform_time_grid(1.0, 65));
  bool ok = true;
  std::string detail;
  for (double eps : {1e-3, 1e-6}) {
    const InitProfile psi = make_erf(eps);
    const DomainExtent ext = choose_domain(sb, 1.0, eps);
    double h2 = 0.0, h1 = 0.0;
    for (double p = 0.5; p <= ext.R; p += 1e-4) h2 = std::max(h2, std::abs(psi(p) - std::exp(-p)));
    for (double p = -ext.L; p <= -ext.L + sb.lambda_minus; p += 1e-4) h1 = std::max(h1, psi(p));
    for (double p = ext.R - sb.lambda_plus; p <= ext.R; p += 1e-4) h1 = std::max(h1, psi(p));
    ok = ok && h2 <= eps && h1 <= 2.0 * eps;
    detail += fmt("%seps %.0e: (H2) %.3g, (H1) %.3g", detail.empty() ? "" : "; ", eps, h2, h1);
  }
  return {ok, detail};
}

Outcome c7_unitarity() {
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(1, 4);
  double worst_drift = 0.0, worst_defect = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    const CMatrix herm = (a + a.adjoint()) / 2.0;
    const double top = Eigen::SelfAdjointEigenSolver<CMatrix>(herm).eigenvalues().maxCoeff();
    a -= std::max(top, 0.0) * CMatrix::Identity(n, n);
    CVector b(n), u0(n);
    for (int i = 0; i < n; ++i) {
      b(i) = cplx(g(rng), g(rng));
      u0(i) = cplx(g(rng), g(rng));
    }
    PipelineOptions o;
    o.epsilon = 1e-6;
    o.n_p = 128;
    const PipelineResult r = run_pipeline(DynamicalSystem(a, b, u0, 1.0), parse_profile_spec("erf:eps=1e-6"), o);
    worst_drift = std::max(worst_drift, r.fourier_norm_drift);
    worst_defect = std::max(worst_defect, r.max_unitarity_defect);
  }
  return {worst_drift <= 1e-12 && worst_defect <= 1e-12,
          fmt("100 systems: max norm drift %.3g, max V_k defect %.3g (<= 1e-12)", worst_drift, worst_defect)};
}

Outcome c8_probability() {
  PipelineOptions o;
  o.epsilon = 1e-4;
  o.n_p = std::size_t{1} << 16;
  const PipelineResult r = run_pipeline(builtin_system("std2"), parse_profile_spec("exp_abs"), o);
  const double ratio = r.probability.ce0_sq_over_ce_sq;
  const bool ok = r.window.p_diamond <= 0.5 && ratio >= 0.18;
  return {ok, fmt("p_diamond %.4f (<= 1/2), Ce0^2/Ce^2 %.4f (>= 0.18)", r.window.p_diamond, ratio)};
}

// max over the window of |e^{p_k} row_k - u_f(k*)| / |u_f(k*)|
double window_spread(const PipelineResult& r) {
  const CVector at_star = r.recovery.u_f;
  double spread = 0.0;
  for (std::size_t k : r.window.k_set) {
    const CVector v = std::exp(r.domain.p(k)) * r.physical_T.values.row(static_cast<Eigen::Index>(k)).transpose();
    spread = std::max(spread, (v - at_star).norm() / at_star.norm());
  }
  return spread;
}

Outcome c9_recovery() {
  const DynamicalSystem uni = builtin_system("unitary2");
  PipelineOptions o;
  o.epsilon = 1e-6;
  o.n_p = 256;
  const PipelineResult ru = run_pipeline(uni, parse_profile_spec("exp_abs"), o);
  const double err_h1 = relative_error(ru.recovery.u, solve_reference(uni).u_T);

  // window factorization: spread across the window against the spectral error at k*
  const DynamicalSystem sys = builtin_system("std2");
  bool ok = err_h1 <= 1e-12;
  std::string detail = fmt("H1=0 error %.3g (<= 1e-12)", err_h1);
  for (const char* spec : {"cutoff:d=2", "hermite:r=4"}) {
    PipelineOptions q;
    q.epsilon = 1e-8;
    q.n_p = 1024;
    const PipelineResult r = run_pipeline(sys, parse_profile_spec(spec), q);
    q.n_p = 4096;
    const PipelineResult fine = run_pipeline(sys, parse_profile_spec(spec), q);
    const double spectral = relative_error(r.recovery.u_f, fine.recovery.u_f);
    const double spread = window_spread(r);
    ok = ok && spread <= 5.0 * std::max(spectral, 1e-13);
    detail += fmt("; %s spread %.3g vs spectral error %.3g (ratio <= 5)", spec, spread, spectral);
  }
  return {ok, detail};
}

Outcome c10_lifting() {
  const DynamicalSystem sys = builtin_system("std2");
  const ProfileSpec spec = parse_profile_spec("erf:eps=1e-6");
  PipelineOptions direct;
  direct.epsilon = 1e-6;
  direct.n_p = 512;
  PipelineOptions lifted = direct;
  lifted.force_lift = true;
  lifted.lift = make_lift_config(1.0, 256);
  const double cross = relative_error(run_pipeline(sys, spec, lifted).recovery.u,
                                      run_pipeline(sys, spec, direct).recovery.u);

  // step-halving on the time-dependent scalar system against a fine-step lifted reference
  const DynamicalSystem td = builtin_system("scalar-td");
  const HomogenizedSystem hs = homogenize(td);
  const HermitianSplit split = hermitian_split(hs);
  const WarpedDomain d(16.0, 16.0, 64);
  const WarpedState f0 = to_fourier(initialize(make_erf(1e-4), d, hs.u_i));
  auto run = [&](std::size_t steps) {
    LiftConfig cfg = make_lift_config(1.0, 256);
    cfg.n_steps = steps;
    return lift_and_evolve(split, f0, d, cfg, 1.0);
  };
  const WarpedState ref = run(2048);
  const double e1 = (run(32).values - ref.values).norm();
  const double e2 = (run(64).values - ref.values).norm();
  const double ratio = e1 / e2;

  PipelineOptions o;
  o.epsilon = 1e-6;
  o.n_p = 512;
  const PipelineResult r = run_pipeline(td, spec, o);
  const double exact = std::exp(-(1.0 + 0.5 * (1.0 - std::cos(1.0))));
  const double td_err = std::abs(r.recovery.u(0) - exact) / exact;
  const bool ok = cross <= 1e-3 && ratio >= 3.0 && ratio <= 5.0 && td_err <= 1e-3;
  return {ok, fmt("cross-check %.3g (<= 1e-3), step-halving ratio %.3f (~4), scalar A(t) error %.3g (<= 1e-3)", cross,
                  ratio, td_err)};
}

Outcome c11_hermite() {
  double worst = 0.0;
  for (int r = 1; r <= 8; ++r) {
    const HermiteInterpolant P = make_hermite_interpolant(r);
    for (int k = 0; k < r; ++k) {
      worst = std::max(worst, std::abs(P.eval(0.0, k) - (k % 2 == 0 ? 1.0 : -1.0)));
      worst = std::max(worst, std::abs(P.eval(-1.0, k) - std::exp(-1.0)));
    }
  }
  bool ok = worst <= 1e-9;
  std::string detail = fmt("endpoint residual %.3g (<= 1e-9)", worst);
  for (int r : {2, 4}) {
    PipelineOptions o;
    o.epsilon = 1e-8;
    // n_p = 64 and 128 are pre-asymptotic: their pairwise orders swing between 2 and 7
    const ConvergenceReport rep = convergence_study(builtin_system("std2"), parse_profile_spec("hermite:r=" +
                                                    std::to_string(r)), {256, 512, 1024, 2048, 4096}, o, 1e-12);
    const double order = rep.ls_order;
    ok = ok && std::abs(order - r) <= 0.5;
    detail += fmt("; r=%d order %.3f over n_p 256..4096 (within 0.5 of r)", r, order);
  }
  return {ok, detail};
}

Outcome c12_truncation() {
  const TruncationReport rep = truncation_check(builtin_system("std2"), parse_profile_spec("erf:eps=1e-6"), 1e-6,
                                                {-8, -7, -6, -5, -4, -3, -2, -1, 0, 2});
  const bool ok = rep.widening_change <= 1e-10 && rep.decay_rate >= 0.8;
  return {ok, fmt("widening change %.3g (<= 1e-10), decay rate %.3f (>= 0.8), boundary trace %.3g",
                  rep.widening_change, rep.decay_rate, rep.boundary_trace)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", c1_oracle_equivalence}, {"first-order law", c2_first_order},
      {"spectral law", c3_spectral_law},             {"mu_max scaling", c4_mu_scaling},
      {"Gevrey growth", c5_growth},                  {"conditions (H1)/(H2)", c6_conditions},
      {"unitarity", c7_unitarity},                   {"probability bound", c8_probability},
      {"recovery", c9_recovery},                     {"dimension lifting", c10_lifting},
      {"Hermite profile", c11_hermite},              {"truncation", c12_truncation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << out.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
