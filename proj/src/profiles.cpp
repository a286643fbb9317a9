#include "schr/profiles.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace schr {

namespace {

constexpr double kFarTail = 40.0;

SignedLog exp_log(double x) { return {x, 1}; }

int parity(int n) { return (n % 2 == 0) ? 1 : -1; }

// sum_{k=0}^{r} C(r,k) (-1)^{r-k} phi^(k)(p) e^{-p}, with phi^(k) supplied in log form.
template <typename PhiDerivative>
SignedLog leibniz_with_exp(int r, double p, PhiDerivative phi_k) {
  SignedLogSum sum;
  for (int k = 0; k <= r; ++k) {
    SignedLog term = phi_k(k);
    if (term.is_zero()) continue;
    term.log_abs += log_binomial(r, k) - p;
    term.sign *= parity(r - k);
    sum.add(term);
  }
  return sum.result();
}

// ---------------------------------------------------------------------------

class ExpAbsImpl final : public detail::ProfileImpl {
 public:
  double eval(double p) const override { return std::exp(-std::abs(p)); }
  SignedLog derivative_log(int, double p) const override { return exp_log(-std::abs(p)); }
  int deriv_order_max() const override { return 0; }
  double resolution(int) const override { return 0.5; }
  Interval natural_support(int) const override { return {-kFarTail, kFarTail}; }
};

// ---------------------------------------------------------------------------

class CutoffImpl final : public detail::ProfileImpl {
 public:
  CutoffImpl(double R, double d) : R_(R), d_(d), a1_(-1.0 - d), b1_(R + d) {}

  double zeta(double p) const { return mollifier_cdf((p - a1_) / d_) - mollifier_cdf((p - b1_) / d_); }

  double eval(double p) const override {
    const double z = zeta(p);
    return z == 0.0 ? 0.0 : z * std::exp(-p);
  }

  SignedLog zeta_log(int k, double p) const {
    if (k == 0) return SignedLog::from(zeta(p));
    const double scale = -k * std::log(d_);
    SignedLog left = mollifier_log((p - a1_) / d_, k - 1);
    SignedLog right = mollifier_log((p - b1_) / d_, k - 1);
    if (!left.is_zero()) left.log_abs += scale;
    if (!right.is_zero()) {
      right.log_abs += scale;
      right.sign = -right.sign;
    }
    return left + right;
  }

  SignedLog derivative_log(int r, double p) const override {
    return leibniz_with_exp(r, p, [&](int k) { return zeta_log(k, p); });
  }
  int deriv_order_max() const override { return kMollifierMaxOrder + 1; }
  double resolution(int r) const override { return std::min(0.25, d_ / (2.0 * (r + 1))); }
  Interval natural_support(int) const override { return {-1.0 - 2.0 * d_, R_ + 2.0 * d_}; }

 private:
  double R_, d_, a1_, b1_;
};

// ---------------------------------------------------------------------------

class HermiteImpl final : public detail::ProfileImpl {
 public:
  explicit HermiteImpl(int r) : poly_(make_hermite_interpolant(r)) {}

  double eval(double p) const override {
    if (p > 0.0) return std::exp(-p);
    if (p < -1.0) return std::exp(p);
    return poly_.eval(p);
  }
  SignedLog derivative_log(int r, double p) const override {
    if (p > 0.0) return {-p, parity(r)};
    if (p < -1.0) return exp_log(p);
    return SignedLog::from(poly_.eval(p, r));
  }
  int deriv_order_max() const override { return poly_.r - 1; }
  double resolution(int) const override { return 0.25; }
  Interval natural_support(int) const override { return {-kFarTail, kFarTail}; }

 private:
  HermiteInterpolant poly_;
};

// ---------------------------------------------------------------------------

class ErfImpl final : public detail::ProfileImpl {
 public:
  explicit ErfImpl(double a) : a_(a) {}

  // log of phi(p) = (erf(ap) + 1)/2, via erfc to keep the left tail accurate
  double log_phi(double p) const {
    const double e = std::erfc(-a_ * p);
    return e > 0.0 ? std::log(0.5 * e) : -std::numeric_limits<double>::infinity();
  }

  double eval(double p) const override { return std::exp(log_phi(p) - p); }

  SignedLog derivative_log(int r, double p) const override {
    const double x = a_ * p;
    const std::vector<SignedLog> h = hermite_polynomials_log(std::max(r - 1, 0), x);
    const double log_pref = std::log(2.0 / std::sqrt(std::numbers::pi)) - std::log(2.0) - x * x;
    const double log_a = std::log(a_);
    return leibniz_with_exp(r, p, [&](int k) -> SignedLog {
      if (k == 0) return SignedLog::from_log(log_phi(p), 1);
      const SignedLog& hk = h[static_cast<std::size_t>(k - 1)];
      if (hk.is_zero()) return {};
      return {hk.log_abs + log_pref + k * log_a, hk.sign * parity(k - 1)};
    });
  }
  int deriv_order_max() const override { return 64; }
  double resolution(int r) const override { return std::min(0.25, 0.5 / (a_ * std::sqrt(2.0 * r + 1.0))); }
  Interval natural_support(int r) const override {
    return {-(std::sqrt(2.0 * r + 1.0) + 7.0) / a_ - 0.5, kFarTail};
  }

 private:
  double a_;
};

// ---------------------------------------------------------------------------

constexpr double kQuarticCut = 8.0;  // e^{-8^4} underflows

double quartic_tail(double y) {
  // int_y^inf e^{-t^4} dt for y >= 0
  // = Gamma(1/4, y^4) / 4
  if (y >= kQuarticCut) return 0.0;
  return 0.25 * boost::math::tgamma(0.25, y * y * y * y);
}

class QuarticImpl final : public detail::ProfileImpl {
 public:
  explicit QuarticImpl(double a) : a_(a), mass_(quartic_mass()) {}

  double phi_tilde(double p) const {
    const double x = a_ * p;
    if (x < 0.0) return quartic_tail(-x) / mass_;
    return 1.0 - quartic_tail(x) / mass_;
  }

  double eval(double p) const override {
    const double f = phi_tilde(p);
    return f == 0.0 ? 0.0 : std::exp(std::log(f) - p);
  }

  // chi^(k)(x) = (k-1)! [h^{k-1}] e^{-(x+h)^4} / mass, Taylor coefficients by
  // the recurrence n e_n = sum_j j g_j e_{n-j}, scaled by e_0 = e^{-x^4}.
  SignedLog chi_derivative_log(int k, double x) const {
    const double g[5] = {-x * x * x * x, -4.0 * x * x * x, -6.0 * x * x, -4.0 * x, -1.0};
    std::vector<double> e(static_cast<std::size_t>(k), 0.0);
    e[0] = 1.0;
    for (int n = 1; n < k; ++n) {
      double acc = 0.0;
      for (int j = 1; j <= std::min(n, 4); ++j) acc += j * g[j] * e[static_cast<std::size_t>(n - j)];
      e[static_cast<std::size_t>(n)] = acc / n;
    }
    SignedLog v = SignedLog::from(e[static_cast<std::size_t>(k - 1)]);
    if (v.is_zero()) return v;
    v.log_abs += std::lgamma(static_cast<double>(k)) + g[0] - std::log(mass_);
    return v;
  }

  SignedLog derivative_log(int r, double p) const override {
    const double log_a = std::log(a_);
    return leibniz_with_exp(r, p, [&](int k) -> SignedLog {
      if (k == 0) return SignedLog::from(phi_tilde(p));
      SignedLog v = chi_derivative_log(k, a_ * p);
      if (!v.is_zero()) v.log_abs += k * log_a;
      return v;
    });
  }
  int deriv_order_max() const override { return 40; }
  double resolution(int r) const override { return std::min(0.25, 0.5 / (a_ * std::pow(r + 1.0, 0.75))); }
  Interval natural_support(int r) const override {
    return {-(2.0 * std::pow(r + 1.0, 0.25) + 2.0) / a_ - 0.5, kFarTail};
  }

 private:
  double a_;
  double mass_;
};

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::ExpAbs: return "exp_abs";
    case ProfileKind::Cutoff: return "cutoff";
    case ProfileKind::Hermite: return "hermite";
    case ProfileKind::Erf: return "erf";
    case ProfileKind::Quartic: return "quartic";
  }
  return "unknown";
}

std::string ProfileSpec::to_string() const {
  switch (kind) {
    case ProfileKind::ExpAbs: return "exp_abs";
    case ProfileKind::Cutoff: return "cutoff:d=" + format_number(value);
    case ProfileKind::Hermite: return "hermite:r=" + format_number(value);
    case ProfileKind::Erf: return "erf:eps=" + format_number(value);
    case ProfileKind::Quartic: return "quartic:eps=" + format_number(value);
  }
  return "unknown";
}

double ProfileSpec::left_support() const { return kind == ProfileKind::Cutoff ? 1.0 + 2.0 * value : 0.0; }

ProfileSpec parse_profile_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::string key, val;
  if (colon != std::string::npos) {
    const std::string rest = text.substr(colon + 1);
    const auto eq = rest.find('=');
    if (eq == std::string::npos) throw ConfigError("profile '" + text + "': expected key=value after ':'");
    key = rest.substr(0, eq);
    val = rest.substr(eq + 1);
  }
  auto number = [&](const std::string& expected_key) {
    if (key != expected_key) throw ConfigError("profile '" + text + "': expected parameter '" + expected_key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      throw ConfigError("profile '" + text + "': malformed number");
    }
    if (used != val.size() || !std::isfinite(v)) throw ConfigError("profile '" + text + "': malformed number");
    return v;
  };

  ProfileSpec spec;
  if (name == "exp_abs") {
    if (colon != std::string::npos) throw ConfigError("profile 'exp_abs' takes no parameters");
    spec.kind = ProfileKind::ExpAbs;
    spec.value = 0.0;
  } else if (name == "cutoff") {
    spec.kind = ProfileKind::Cutoff;
    spec.value = number("d");
    if (spec.value < 1.0) throw ConfigError("cutoff: d must be >= 1");
  } else if (name == "hermite") {
    spec.kind = ProfileKind::Hermite;
    spec.value = number("r");
    if (spec.value != std::floor(spec.value) || spec.value < 1 || spec.value > kHermiteMaxOrder)
      throw ConfigError("hermite: r must be an integer in [1, 16]");
  } else if (name == "erf" || name == "quartic") {
    spec.kind = name == "erf" ? ProfileKind::Erf : ProfileKind::Quartic;
    spec.value = number("eps");
    if (!(spec.value > 0.0 && spec.value < std::exp(-1.0))) throw ConfigError(name + ": eps must lie in (0, 1/e)");
  } else {
    throw ConfigError("unknown profile '" + text + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------

InitProfile::InitProfile(ProfileKind kind, double parameter, std::shared_ptr<const detail::ProfileImpl> impl)
    : kind_(kind), parameter_(parameter), impl_(std::move(impl)) {
  if (!impl_) throw ConfigError("profile: missing implementation");
}

SignedLog InitProfile::derivative_log(int r, double p) const {
  if (r < 0 || r > deriv_order_max())
    throw ConfigError("profile " + id() + ": derivative order " + std::to_string(r) + " not supported (max " +
                      std::to_string(deriv_order_max()) + ")");
  return impl_->derivative_log(r, p);
}

std::optional<double> InitProfile::beta_claim() const {
  switch (kind_) {
    case ProfileKind::Cutoff: return 0.5;
    case ProfileKind::Erf:
    case ProfileKind::Quartic: return 1.0;
    default: return std::nullopt;
  }
}

double InitProfile::p_star() const {
  return (kind_ == ProfileKind::Erf || kind_ == ProfileKind::Quartic) ? 0.5 : 0.0;
}

std::string InitProfile::id() const {
  switch (kind_) {
    case ProfileKind::ExpAbs: return "exp_abs";
    case ProfileKind::Cutoff: return "cutoff(d=" + format_number(parameter_) + ")";
    case ProfileKind::Hermite: return "hermite(r=" + format_number(parameter_) + ")";
    case ProfileKind::Erf: return "erf(a=" + format_number(parameter_) + ")";
    case ProfileKind::Quartic: return "quartic(a=" + format_number(parameter_) + ")";
  }
  return "unknown";
}

InitProfile make_exp_abs() { return InitProfile(ProfileKind::ExpAbs, 0.0, std::make_shared<ExpAbsImpl>()); }

InitProfile make_cutoff(double R, double d) {
  if (!(d >= 1.0)) throw ConfigError("cutoff: d must be >= 1");
  if (!(R > 0.0)) throw ConfigError("cutoff: R must be positive");
  return InitProfile(ProfileKind::Cutoff, d, std::make_shared<CutoffImpl>(R, d));
}

InitProfile make_hermite(int r) {
  if (r < 1 || r > kHermiteMaxOrder) throw ConfigError("hermite: r must lie in [1, 16]");
  return InitProfile(ProfileKind::Hermite, r, std::make_shared<HermiteImpl>(r));
}

InitProfile make_erf_scaled(double a) {
  if (!(a >= 1.0) || !std::isfinite(a)) throw ConfigError("erf: a must be >= 1");
  return InitProfile(ProfileKind::Erf, a, std::make_shared<ErfImpl>(a));
}

InitProfile make_erf(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < std::exp(-1.0))) throw ConfigError("erf: eps must lie in (0, 1/e)");
  return make_erf_scaled(2.0 * std::sqrt(std::log(1.0 / epsilon)));
}

double quartic_mass() {
  return 2.0 * boost::math::tgamma(1.25);
}

double quartic_scale_for(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < std::exp(-1.0))) throw ConfigError("quartic: eps must lie in (0, 1/e)");
  const double mass = quartic_mass();
  auto f = [&](double y) { return quartic_tail(y) / mass - epsilon; };
  if (!(f(0.0) > 0.0) || !(f(kQuarticCut) < 0.0)) throw NumericalError("quartic: bisection bracket invalid");
  boost::math::tools::eps_tolerance<double> tol(50);
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::bisect(f, 0.0, kQuarticCut, tol, iters);
  if (iters >= 200) throw NumericalError("quartic: bisection did not converge");
  return std::max(1.0, 2.0 * bracket.second);
}

InitProfile make_quartic_scaled(double a) {
  if (!(a >= 1.0) || !std::isfinite(a)) throw ConfigError("quartic: a must be >= 1");
  return InitProfile(ProfileKind::Quartic, a, std::make_shared<QuarticImpl>(a));
}

InitProfile make_quartic(double epsilon) { return make_quartic_scaled(quartic_scale_for(epsilon)); }

InitProfile build_profile(const ProfileSpec& spec, double R) {
  switch (spec.kind) {
    case ProfileKind::ExpAbs: return make_exp_abs();
    case ProfileKind::Cutoff: return make_cutoff(R, spec.value);
    case ProfileKind::Hermite: return make_hermite(static_cast<int>(spec.value));
    case ProfileKind::Erf: return make_erf(spec.value);
    case ProfileKind::Quartic: return make_quartic(spec.value);
  }
  throw ConfigError("unknown profile kind");
}

LogMagnitude deriv_l2_norm(const InitProfile& profile, int r, std::optional<Interval> domain) {
  if (r < 0 || r > profile.deriv_order_max())
    throw ConfigError("deriv_l2_norm: order " + std::to_string(r) + " unsupported for " + profile.id());
  const Interval dom = domain.value_or(profile.natural_support(r));
  if (!(dom.hi > dom.lo)) throw ConfigError("deriv_l2_norm: empty domain");
  const double h = profile.resolution(r);
  const auto panels = static_cast<std::size_t>(std::ceil(dom.width() / h));
  if (panels > 2000000) throw ConfigError("deriv_l2_norm: domain too wide for the quadrature resolution");
  const GaussRule& rule = gauss_legendre(32);
  const double hw = dom.width() / static_cast<double>(panels) / 2.0;

  // log(w_i |psi^(r)(x_i)|^2), summed with a global max shift
  std::vector<double> terms;
  terms.reserve(panels * rule.nodes.size());
  for (std::size_t j = 0; j < panels; ++j) {
    const double mid = dom.lo + (2.0 * static_cast<double>(j) + 1.0) * hw;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const SignedLog v = profile.derivative_log(r, mid + hw * rule.nodes[i]);
      if (v.is_zero()) continue;
      terms.push_back(std::log(rule.weights[i] * hw) + 2.0 * v.log_abs);
    }
  }
  if (terms.empty()) return {};
  const double m = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return {0.5 * (m + std::log(acc))};
}

}  // namespace schr
