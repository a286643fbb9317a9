#include <doctest.h>

#include <cmath>
#include <numeric>

#include "schr/expm.hpp"
#include "schr/harness.hpp"
#include "schr/lift.hpp"
#include "schr/oracle.hpp"

using namespace schr;

TEST_CASE("delta kernel has unit mass and the configured support") {
  const LiftConfig cfg = make_lift_config(1.0);
  const DeltaKernel k = delta_kernel(cfg);
  const double mass = std::accumulate(k.samples.begin(), k.samples.end(), 0.0) * k.ds;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k.raw_sum == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t j = 0; j < cfg.n_s; ++j) {
    const double x = (static_cast<double>(j) - static_cast<double>(cfg.n_s / 2)) * cfg.ds();
    if (std::abs(x) >= cfg.omega()) CHECK(k.samples[j] == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK(delta_value(DeltaShape::RaisedCosine, 0.5, 0.0) == doctest::Approx(2.0));
  CHECK(delta_value(DeltaShape::AsPrinted, 0.5, 0.0) == 0.0);
}

TEST_CASE("lift configuration validation") {
  const LiftConfig cfg = make_lift_config(1.0);
  CHECK(std::numbers::pi * cfg.S > 4.0 * cfg.omega() + 1.0);
  CHECK(std::fmod(cfg.S * 64.0, 1.0) == 0.0);
  CHECK_THROWS_AS(make_lift_config(1.0, 100), ConfigError);
  CHECK_THROWS_AS(make_lift_config(1.0, 256, 1), ConfigError);
  CHECK_THROWS_AS(make_lift_config(1.0, 256, 4, 0.2), ConfigError);
  CHECK_THROWS_AS(make_lift_config(1.0, 16, 4), ConfigError);
  CHECK_NOTHROW(make_lift_config(3.0, 512, 4));
}

TEST_CASE("lifted evolution agrees with direct evolution for a constant generator") {
  const DynamicalSystem sys = builtin_system("std2");
  const ProfileSpec spec = parse_profile_spec("erf:eps=1e-6");
  PipelineOptions direct;
  direct.epsilon = 1e-6;
  direct.n_p = 512;
  PipelineOptions lifted = direct;
  lifted.force_lift = true;
  const PipelineResult a = run_pipeline(sys, spec, direct);
  const PipelineResult b = run_pipeline(sys, spec, lifted);
  CHECK(!a.lifted);
  CHECK(b.lifted);
  CHECK(relative_error(b.recovery.u, a.recovery.u) <= 1e-3);
  REQUIRE(b.lift.has_value());
  CHECK(b.lift->max_norm_drift < 1e-12);
}

TEST_CASE("scalar time-dependent system matches its closed form") {
  const DynamicalSystem sys = builtin_system("scalar-td");
  PipelineOptions opts;
  opts.epsilon = 1e-6;
  opts.n_p = 512;
  const PipelineResult r = run_pipeline(sys, parse_profile_spec("erf:eps=1e-6"), opts);
  CHECK(r.lifted);
  const double T = sys.horizon();
  const double exact = std::exp(-(T + 0.5 * (1.0 - std::cos(T))));
  CHECK(std::abs(r.recovery.u(0) - exact) / exact <= 1e-3);
}

TEST_CASE("halving the lifted time step reduces the splitting error fourfold") {
  const DynamicalSystem sys = builtin_system("scalar-td");
  const HomogenizedSystem hs = homogenize(sys);
  const HermitianSplit split = hermitian_split(hs);
  const WarpedDomain d(16.0, 16.0, 64);
  const WarpedState f0 = to_fourier(initialize(make_erf(1e-4), d, hs.u_i));
  auto run = [&](std::size_t steps) {
    LiftConfig cfg = make_lift_config(1.0, 128, 4);
    cfg.n_steps = steps;
    return lift_and_evolve(split, f0, d, cfg, 1.0);
  };
  const WarpedState ref = run(1024);
  std::vector<double> err;
  for (std::size_t steps : {16u, 32u, 64u}) err.push_back((run(steps).values - ref.values).norm());
  const double r1 = err[0] / err[1];
  const double r2 = err[1] / err[2];
  INFO("ratios " << r1 << ", " << r2);
  CHECK(r1 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("lifted evolution rejects bad inputs") {
  const HermitianSplit split = hermitian_split(homogenize(builtin_system("std2")));
  const WarpedDomain d(8.0, 8.0, 16);
  const WarpedState phys = initialize(make_exp_abs(), d, CVector::Ones(4));
  CHECK_THROWS_AS(lift_and_evolve(split, phys, d, make_lift_config(1.0), 1.0), ConfigError);
  LiftConfig bad = make_lift_config(1.0);
  bad.S = 0.3;
  CHECK_THROWS_AS(lift_and_evolve(split, to_fourier(phys), d, bad, 1.0), ConfigError);
}

TEST_CASE("mode-by-mode lifting equals the full tensor system") {
  // miniature: scalar time-dependent system (width 2 after homogenization), n_p = 8
  const DynamicalSystem sys = builtin_system("scalar-td");
  const HomogenizedSystem hs = homogenize(sys);
  const HermitianSplit split = hermitian_split(hs);
  const WarpedDomain d(4.0, 4.0, 8);
  const WarpedState f0 = to_fourier(initialize(make_erf(1e-2), d, hs.u_i));
  LiftConfig cfg = make_lift_config(1.0, 64, 4);
  cfg.n_steps = 2048;
  const WarpedState lifted = lift_and_evolve(split, f0, d, cfg, 1.0);

  // dense s-derivative from the trigonometric interpolant on the s grid
  const auto ns = static_cast<Eigen::Index>(cfg.n_s);
  const double ds = cfg.ds();
  CMatrix deriv = CMatrix::Zero(ns, ns);
  for (Eigen::Index l = 0; l < ns; ++l) {
    const double nu = (static_cast<double>(l) - static_cast<double>(ns / 2)) / cfg.S;
    for (Eigen::Index j = 0; j < ns; ++j)
      for (Eigen::Index k = 0; k < ns; ++k)
        deriv(k, j) += cplx(0.0, nu) * std::polar(1.0, nu * static_cast<double>(k - j) * ds) / static_cast<double>(ns);
  }
  const DeltaKernel kernel = delta_kernel(cfg);
  const Eigen::Index m = hs.u_i.size();
  for (std::size_t mode = 0; mode < d.n_p(); ++mode) {
    // full generator on (s, component): -d/ds - i(mu H1(s) - H2(s))
    CMatrix g = CMatrix::Zero(ns * m, ns * m);
    for (Eigen::Index j = 0; j < ns; ++j) {
      for (Eigen::Index k = 0; k < ns; ++k) g.block(k * m, j * m, m, m) -= deriv(k, j) * CMatrix::Identity(m, m);
      const double s = cfg.s(static_cast<std::size_t>(j));
      g.block(j * m, j * m, m, m) += cplx(0.0, -1.0) * (d.mu(mode) * split.h1(s) - split.h2(s));
    }
    CVector v0(ns * m);
    for (Eigen::Index j = 0; j < ns; ++j)
      v0.segment(j * m, m) = kernel.samples[static_cast<std::size_t>(j)] *
                             f0.values.row(static_cast<Eigen::Index>(mode)).transpose();
    const CVector v = expm(g) * v0;
    CVector integral = CVector::Zero(m);
    for (Eigen::Index j = 0; j < ns; ++j) integral += v.segment(j * m, m) * ds;
    const CVector got = lifted.values.row(static_cast<Eigen::Index>(mode)).transpose();
    INFO("mode " << mode);
    CHECK((got - integral).norm() <= 1e-6 * std::max(integral.norm(), 1e-300));
  }
}
