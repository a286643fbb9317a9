#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "schr/profiles.hpp"
#include "schr/system.hpp"
#include "schr/warp.hpp"

using namespace schr;
using boost::math::quadrature::gauss_kronrod;

namespace {

double fd_derivative(const InitProfile& psi, double p, double h = 1e-4) {
  // fourth-order central difference
  return (-psi(p + 2 * h) + 8 * psi(p + h) - 8 * psi(p - h) + psi(p - 2 * h)) / (12 * h);
}

// r-th derivatives of samples on a periodic grid by a naive DFT.
std::vector<std::vector<double>> spectral_derivatives(const std::vector<double>& f, double length, int r_max) {
  const std::size_t n = f.size();
  std::vector<std::complex<double>> c(n);
  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t j = 0; j < n; ++j) twiddle[j] = std::polar(1.0, -2.0 * std::numbers::pi * j / n);
  for (std::size_t l = 0; l < n; ++l) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += f[k] * twiddle[(l * k) % n];
    c[l] = acc / static_cast<double>(n);
  }
  std::vector<std::vector<double>> out(r_max + 1, std::vector<double>(n));
  for (int r = 0; r <= r_max; ++r) {
    std::vector<std::complex<double>> d(n);
    for (std::size_t l = 0; l < n; ++l) {
      const long freq = l < n / 2 ? static_cast<long>(l) : static_cast<long>(l) - static_cast<long>(n);
      const std::complex<double> ik(0.0, 2.0 * std::numbers::pi * freq / length);
      d[l] = (l == n / 2 && r % 2 == 1) ? 0.0 : c[l] * std::pow(ik, r);
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t l = 0; l < n; ++l) acc += d[l] * std::conj(twiddle[(l * k) % n]);
      out[r][k] = acc.real();
    }
  }
  return out;
}

}  // namespace

TEST_CASE("profile spec parsing") {
  CHECK(parse_profile_spec("exp_abs").kind == ProfileKind::ExpAbs);
  CHECK(parse_profile_spec("cutoff:d=3").value == 3.0);
  CHECK(parse_profile_spec("hermite:r=4").kind == ProfileKind::Hermite);
  CHECK(parse_profile_spec("erf:eps=1e-6").value == 1e-6);
  CHECK(parse_profile_spec("quartic:eps=0.001").kind == ProfileKind::Quartic);
  CHECK(parse_profile_spec("erf:eps=1e-06").to_string() == parse_profile_spec("erf:eps=1e-6").to_string());
  for (const char* bad : {"erf", "erf:eps=0.5", "erf:a=1", "hermite:r=0", "hermite:r=2.5", "hermite:r=17",
                          "cutoff:d=0.5", "exp_abs:x=1", "gauss:eps=1e-3", "erf:eps=1e-3x"})
    CHECK_THROWS_AS(parse_profile_spec(bad), ConfigError);
  CHECK(parse_profile_spec("cutoff:d=2").left_support() == 5.0);
  CHECK(parse_profile_spec("erf:eps=1e-3").left_support() == 0.0);
}

TEST_CASE("exp_abs profile") {
  const InitProfile psi = make_exp_abs();
  CHECK(psi(-2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(psi(0.0) == 1.0);
  CHECK(psi.deriv_order_max() == 0);
  CHECK_THROWS_AS(deriv_l2_norm(psi, 1), ConfigError);
  CHECK(!psi.beta_claim());
  CHECK(psi.p_star() == 0.0);
}

TEST_CASE("erf profile satisfies (H1) and (H2) at criterion-sized domains") {
  const DynamicalSystem sys = builtin_system("std2");
  const SpectralBounds sb = spectral_bounds(hermitian_split(homogenize(sys)), uniform_time_grid(1.0, 5));
  for (double eps : {1e-3, 1e-6}) {
    const InitProfile psi = make_erf(eps);
    const DomainExtent ext = choose_domain(sb, 1.0, eps);
    double h2 = 0.0;
    for (double p = 0.5; p <= ext.R; p += 1e-3) h2 = std::max(h2, std::abs(psi(p) - std::exp(-p)));
    CHECK(h2 <= eps);
    double h1 = 0.0;
    for (double p = -ext.L; p <= -ext.L + sb.lambda_minus; p += 1e-3) h1 = std::max(h1, psi(p));
    for (double p = ext.R - sb.lambda_plus; p <= ext.R; p += 1e-3) h1 = std::max(h1, psi(p));
    CHECK(h1 <= 2.0 * eps);
    CHECK(psi.beta_claim().value() == 1.0);
    CHECK(psi.p_star() == 0.5);
  }
}

TEST_CASE("erf derivatives agree with spectral differentiation") {
  const InitProfile psi = make_erf(1e-6);
  const std::size_t n = 2048;
  const double left = -20.0, length = 60.0;
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = psi(left + length * k / n);
  const auto spec = spectral_derivatives(f, length, 8);
  for (int r = 1; r <= 8; ++r) {
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(spec[r][k]));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; k += 3) {
      const double p = left + length * k / n;
      worst = std::max(worst, std::abs(psi.derivative(r, p) - spec[r][k]));
    }
    INFO("r = " << r << ", peak = " << peak);
    CHECK(worst <= 1e-6 * peak);
  }
}

TEST_CASE("erf L2 norms match direct quadrature") {
  const InitProfile psi = make_erf(1e-4);
  const double a = psi.parameter();
  auto sq = [&](double p) { return psi(p) * psi(p); };
  const double ref0 = std::sqrt(gauss_kronrod<double, 31>::integrate(sq, -20.0, 40.0, 25, 1e-14));
  CHECK(deriv_l2_norm(psi, 0).value() == doctest::Approx(ref0).epsilon(1e-10));
  // psi' = (phi' - phi) e^{-p} with phi' = a/sqrt(pi) e^{-a^2 p^2}
  auto d1 = [&](double p) {
    const double phi = 0.5 * (1.0 + std::erf(a * p));
    const double dphi = a / std::sqrt(std::numbers::pi) * std::exp(-a * a * p * p);
    const double v = (dphi - phi) * std::exp(-p);
    return v * v;
  };
  const double ref1 = std::sqrt(gauss_kronrod<double, 31>::integrate(d1, -20.0, 40.0, 25, 1e-14));
  CHECK(deriv_l2_norm(psi, 1).value() == doctest::Approx(ref1).epsilon(1e-10));
  CHECK(deriv_l2_norm(psi, 1).root(1) == doctest::Approx(ref1).epsilon(1e-10));
}

TEST_CASE("cutoff profile equals e^{-p} on [-1, R] and vanishes outside its support") {
  const double R = 12.0, d = 2.0;
  const InitProfile psi = make_cutoff(R, d);
  for (double p = -1.0; p <= R; p += 0.37) CHECK(psi(p) == doctest::Approx(std::exp(-p)).epsilon(1e-14));
  CHECK(psi(-1.0 - 2.0 * d - 1e-9) == 0.0);
  CHECK(psi(R + 2.0 * d + 1e-9) == 0.0);
  CHECK(psi(-3.0) > 0.0);
  CHECK(psi(-3.0) < std::exp(3.0));
  CHECK(psi.beta_claim().value() == 0.5);
  CHECK_THROWS_AS(make_cutoff(R, 0.5), ConfigError);
}

TEST_CASE("cutoff derivatives agree with finite differences") {
  const InitProfile psi = make_cutoff(10.0, 1.5);
  for (double p : {-3.7, -2.9, -1.8, -0.5, 11.2, 12.4})
    CHECK(std::abs(psi.derivative(1, p) - fd_derivative(psi, p)) <= 1e-7 * std::exp(-p));
  // second derivative through differences of the analytic first derivative
  for (double p : {-3.1, -2.2}) {
    const double h = 1e-5;
    const double ref = (psi.derivative(1, p + h) - psi.derivative(1, p - h)) / (2 * h);
    CHECK(std::abs(psi.derivative(2, p) - ref) <= 1e-6 * std::exp(-p));
  }
}

TEST_CASE("Hermite profile is C^{r-1} at the junctions") {
  for (int r : {1, 2, 4, 8}) {
    const InitProfile psi = make_hermite(r);
    CHECK(psi.deriv_order_max() == r - 1);
    // the junction nodes use the polynomial branch; compare with the exponential sides
    for (int k = 0; k < r; ++k) {
      CHECK(psi.derivative(k, 0.0) == doctest::Approx(psi.derivative(k, 1e-300)).epsilon(1e-9));
      CHECK(psi.derivative(k, -1.0) == doctest::Approx(psi.derivative(k, std::nextafter(-1.0, -2.0))).epsilon(1e-9));
    }
    CHECK(psi(3.0) == doctest::Approx(std::exp(-3.0)));
    CHECK(psi(-3.0) == doctest::Approx(std::exp(-3.0)));
  }
  CHECK_THROWS_AS(make_hermite(17), ConfigError);
  CHECK_THROWS_AS(make_hermite(2).derivative(2, 0.3), ConfigError);
}

TEST_CASE("quartic profile") {
  CHECK(quartic_mass() == doctest::Approx(2.0 * std::tgamma(1.25)).epsilon(1e-15));
  const double mass = gauss_kronrod<double, 31>::integrate([](double t) { return std::exp(-t * t * t * t); },
                                                            -8.0, 8.0, 20, 1e-15);
  CHECK(quartic_mass() == doctest::Approx(mass).epsilon(1e-13));
  for (double eps : {1e-3, 1e-6}) {
    const InitProfile psi = make_quartic(eps);
    const double a = quartic_scale_for(eps);
    CHECK(psi.parameter() == doctest::Approx(a));
    // the tail beyond p = 1/2 carries exactly eps of the mass
    const double tail = gauss_kronrod<double, 31>::integrate([](double t) { return std::exp(-t * t * t * t); },
                                                              a / 2.0, 8.0, 20, 1e-15);
    CHECK(tail / mass == doctest::Approx(eps).epsilon(1e-8));
    double h2 = 0.0;
    for (double p = 0.5; p <= 20.0; p += 1e-3) h2 = std::max(h2, std::abs(psi(p) - std::exp(-p)));
    CHECK(h2 <= eps * (1 + 1e-9));
    for (double p : {-0.4, -0.1, 0.05, 0.3, 0.9})
      CHECK(std::abs(psi.derivative(1, p) - fd_derivative(psi, p)) <= 1e-7 * std::exp(-p));
  }
}

TEST_CASE("high-order norms stay finite and grow") {
  const InitProfile psi = make_erf_scaled(2.0 * std::sqrt(60.0));
  const LogMagnitude n32 = deriv_l2_norm(psi, 32);
  const LogMagnitude n64 = deriv_l2_norm(psi, 64);
  CHECK(std::isfinite(n64.log_value));
  CHECK(n64.root(64) > n32.root(32));
}

TEST_CASE("build_profile dispatches on the spec") {
  CHECK(build_profile(parse_profile_spec("erf:eps=1e-4"), 10.0).kind() == ProfileKind::Erf);
  CHECK(build_profile(parse_profile_spec("cutoff:d=2"), 10.0).parameter() == 2.0);
  CHECK(build_profile(parse_profile_spec("hermite:r=3"), 10.0).deriv_order_max() == 2);
}

TEST_CASE("derivative growth bounds") {
  // Erf with a = 2 sqrt(r): ||psi^(r)||^{1/r} <= C r; Cutoff with d = r: <= C r^2
  double c_erf = 0.0, c_cut = 0.0;
  for (int r : {5, 10, 20, 40}) {
    const double v = deriv_l2_norm(make_erf_scaled(2.0 * std::sqrt(r)), r).root(r);
    c_erf = std::max(c_erf, v / r);
  }
  for (int r : {5, 10, 15, 20}) {
    const double v = deriv_l2_norm(make_cutoff(16.0, r), r).root(r);
    c_cut = std::max(c_cut, v / (r * r));
  }
  CHECK(c_erf <= 2.0);
  CHECK(c_cut <= 2.0);
}

TEST_CASE("profiles are nonnegative and bounded by e^{-|p|} away from the origin") {
  for (const char* text : {"exp_abs", "erf:eps=1e-6", "cutoff:d=2", "hermite:r=3", "quartic:eps=1e-6"}) {
    const ProfileSpec spec = parse_profile_spec(text);
    const InitProfile psi = build_profile(spec, 12.0);
    // the cutoff ramp lives on [-left_support, -1], where psi reaches e^{1}
    const double left = std::max(2.0, spec.left_support());
    for (double p = -12.0; p <= 12.0; p += 1e-2) {
      const double v = psi(p);
      CHECK(v >= 0.0);
      if (p <= -left || p >= 2.0) CHECK(v <= std::exp(-std::abs(p)) * (1.0 + 1e-12));
    }
  }
}
