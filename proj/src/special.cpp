#include "schr/special.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cfloat>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace schr {

// ---------------------------------------------------------------------------
// SignedLog
// ---------------------------------------------------------------------------

SignedLog SignedLog::from(double x) {
  if (x == 0.0) return {};
  if (!std::isfinite(x)) throw NumericalError("SignedLog: non-finite value");
  return {std::log(std::abs(x)), x > 0.0 ? 1 : -1};
}

SignedLog operator*(const SignedLog& a, const SignedLog& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return {a.log_abs + b.log_abs, a.sign * b.sign};
}

SignedLog operator+(const SignedLog& a, const SignedLog& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double m = std::max(a.log_abs, b.log_abs);
  const double v = a.sign * std::exp(a.log_abs - m) + b.sign * std::exp(b.log_abs - m);
  if (v == 0.0) return {};
  return {m + std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

void SignedLogSum::add(const SignedLog& term) {
  if (!term.is_zero()) terms_.push_back(term);
}

SignedLog SignedLogSum::result() const {
  if (terms_.empty()) return {};
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) m = std::max(m, t.log_abs);
  double v = 0.0;
  for (const auto& t : terms_) v += t.sign * std::exp(t.log_abs - m);
  if (v == 0.0) return {};
  return {m + std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// ---------------------------------------------------------------------------
// Hermite polynomials
// ---------------------------------------------------------------------------

double hermite_polynomial(int n, double x) {
  if (n < 0) throw ConfigError("hermite_polynomial: negative order");
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

SignedLog hermite_polynomial_log(int n, double x) {
  if (n < 0) throw ConfigError("hermite_polynomial_log: negative order");
  if (n == 0) return {0.0, 1};
  double h0 = 1.0;
  double h1 = 2.0 * x;
  double log_scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
    const double mag = std::max(std::abs(h0), std::abs(h1));
    if (mag > 1e150) {
      h0 /= mag;
      h1 /= mag;
      log_scale += std::log(mag);
    }
  }
  SignedLog out = SignedLog::from(h1);
  if (!out.is_zero()) out.log_abs += log_scale;
  return out;
}

std::vector<SignedLog> hermite_polynomials_log(int n_max, double x) {
  if (n_max < 0) return {};
  std::vector<SignedLog> out(static_cast<std::size_t>(n_max) + 1);
  double h0 = 1.0;
  double h1 = 2.0 * x;
  double log_scale = 0.0;
  out[0] = {0.0, 1};
  if (n_max >= 1) out[1] = SignedLog::from(h1);
  for (int k = 1; k < n_max; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
    const double mag = std::max(std::abs(h0), std::abs(h1));
    if (mag > 1e150) {
      h0 /= mag;
      h1 /= mag;
      log_scale += std::log(mag);
    }
    SignedLog v = SignedLog::from(h1);
    if (!v.is_zero()) v.log_abs += log_scale;
    out[static_cast<std::size_t>(k) + 1] = v;
  }
  return out;
}

SignedLog erf_derivative_log(int k, double x) {
  if (k < 0) throw ConfigError("erf_derivative_log: negative order");
  if (k == 0) return SignedLog::from(std::erf(x));
  SignedLog h = hermite_polynomial_log(k - 1, x);
  if (h.is_zero()) return {};
  const double log_pref = std::log(2.0 / std::sqrt(std::numbers::pi));
  const int sign = ((k - 1) % 2 == 0) ? 1 : -1;
  return {h.log_abs + log_pref - x * x, h.sign * sign};
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          unsigned max_depth) {
  using boost::math::quadrature::gauss_kronrod;
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  // The Boost driver takes a relative tolerance; a coarse pass gives the L1 scale.
  gauss_kronrod<double, 15>::integrate(f, a, b, 5, 1e-6, &err, &l1);
  const double rel = std::max(1e-15, l1 > 0.0 ? abs_tol / l1 : 1e-15);
  const double value = gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel, &err, &l1);
  if (!std::isfinite(value)) throw NumericalError("integrate_adaptive: non-finite integral");
  if (err > std::max(abs_tol, 1e-12 * l1)) {
    std::ostringstream msg;
    msg << "integrate_adaptive: tolerance not reached (error estimate " << std::scientific << err << ")";
    throw NumericalError(msg.str());
  }
  return value;
}

// ---------------------------------------------------------------------------
// Mollifier
// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<BigInt>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return Poly{BigInt(0)};
  Poly out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * static_cast<long>(i);
  return out;
}

double theta(double p) { return std::abs(p) < 1.0 ? std::exp(1.0 / (p * p - 1.0)) : 0.0; }

constexpr int kCdfRule = 32;

double gl_integral(double a, double b) {
  static const GaussRule& g = gauss_legendre(kCdfRule);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < kCdfRule; ++i) s += g.weights[i] * theta(mid + half * g.nodes[i]);
  return half * s;
}

using WideFloat = boost::multiprecision::cpp_bin_float_100;

// Q(1 - s) in powers of s; the Taylor shift keeps integer coefficients.
Poly shift_to_endpoint(const Poly& q) {
  Poly d(q.size(), BigInt(0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    BigInt binom = 1;
    for (std::size_t j = 0; j <= i; ++j) {
      d[j] += (j % 2 ? -1 : 1) * q[i] * binom;
      binom = binom * (i - j) / (j + 1);
    }
  }
  return d;
}

// Q_k in two bases: powers of p for |p| < 1/2, powers of 1 - |p| otherwise.
struct PolyTables {
  std::vector<long double> mono, shifted;
  std::vector<WideFloat> mono_wide, shifted_wide;
};

struct MollifierTables {
  std::vector<MollifierDerivative> exact;
  std::vector<PolyTables> coeffs;
  double c = 0.0;
  double log_c = 0.0;
  // Unnormalized int_{-1}^{x_j} theta on panels of [-1, 0]: geometric towards -1, then uniform.
  std::vector<double> breaks;
  std::vector<double> cumulative;

  MollifierTables() {
    exact.push_back({0, Poly{BigInt(1)}});
    for (int k = 0; k < kMollifierMaxOrder; ++k) exact.push_back(next_mollifier_derivative(exact.back()));
    for (const auto& q : exact) {
      PolyTables t;
      for (const auto& v : q.q_poly) {
        t.mono.push_back(v.convert_to<long double>());
        t.mono_wide.emplace_back(v);
      }
      for (const auto& v : shift_to_endpoint(q.q_poly)) {
        t.shifted.push_back(v.convert_to<long double>());
        t.shifted_wide.emplace_back(v);
      }
      coeffs.push_back(std::move(t));
    }
    breaks.push_back(-1.0);
    for (int m = 12; m >= 3; --m) breaks.push_back(-1.0 + std::ldexp(1.0, -m));
    for (int j = 1; j <= 56; ++j) breaks.push_back(-0.875 + j / 64.0);
    cumulative.assign(breaks.size(), 0.0);
    for (std::size_t j = 1; j < breaks.size(); ++j)
      cumulative[j] = cumulative[j - 1] + gl_integral(breaks[j - 1], breaks[j]);
    c = 2.0 * cumulative.back();
    log_c = std::log(c);
  }

  // int_{-1}^{x} theta for x in [-1, 0]
  double left_integral(double x) const {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - breaks.begin()) - 1;
    return cumulative[j] + (x > breaks[j] ? gl_integral(breaks[j], x) : 0.0);
  }
};

const MollifierTables& mollifier_tables() {
  static const MollifierTables tables;
  return tables;
}

}  // namespace

MollifierDerivative next_mollifier_derivative(const MollifierDerivative& q) {
  const long k = q.order;
  // (1 - p^2)^2 = 1 - 2p^2 + p^4
  const Poly a{BigInt(1), BigInt(0), BigInt(-2), BigInt(0), BigInt(1)};
  // 2p(2k - 1 - 2k p^2) = 2(2k-1) p - 4k p^3
  const Poly b{BigInt(0), BigInt(2 * (2 * k - 1)), BigInt(0), BigInt(-4 * k)};
  Poly next = poly_add(poly_mul(a, poly_derivative(q.q_poly)), poly_mul(b, q.q_poly));
  while (next.size() > 1 && next.back() == 0) next.pop_back();
  return {q.order + 1, std::move(next)};
}

const MollifierDerivative& mollifier_derivative(int k) {
  if (k < 0 || k > kMollifierMaxOrder) throw ConfigError("mollifier: derivative order out of range");
  return mollifier_tables().exact[static_cast<std::size_t>(k)];
}

double mollifier_normalization() { return mollifier_tables().c; }

SignedLog mollifier_log(double p, int k) {
  if (k < 0 || k > kMollifierMaxOrder) throw ConfigError("mollifier: derivative order out of range");
  if (!(std::abs(p) < 1.0)) return {};
  const auto& t = mollifier_tables();
  const PolyTables& c = t.coeffs[static_cast<std::size_t>(k)];
  // Q_k(-p) = (-1)^k Q_k(p)
  const double ap = std::abs(p);
  const bool near_end = ap >= 0.5;
  const auto& lc = near_end ? c.shifted : c.mono;
  const long double x = near_end ? 1.0L - static_cast<long double>(ap) : static_cast<long double>(ap);
  long double q = 0.0L, bound = 0.0L;
  for (auto it = lc.rbegin(); it != lc.rend(); ++it) {
    q = q * x + *it;
    bound = bound * x + std::abs(*it);
  }
  // Horner error is at most ~2 n u sum |a_i| x^i; redo in wide precision when that is not small.
  if (2.0L * lc.size() * LDBL_EPSILON * bound > 1e-15L * std::abs(q)) {
    const auto& wc = near_end ? c.shifted_wide : c.mono_wide;
    const WideFloat xw = near_end ? WideFloat(1) - WideFloat(ap) : WideFloat(ap);
    WideFloat qw = 0;
    for (auto it = wc.rbegin(); it != wc.rend(); ++it) qw = qw * xw + *it;
    q = qw.convert_to<long double>();
  }
  if (p < 0.0 && k % 2 == 1) q = -q;
  if (q == 0.0L) return {};
  const double one_minus = (1.0 - p) * (1.0 + p);
  const double log_abs = static_cast<double>(std::log(std::abs(q))) - 2.0 * k * std::log(one_minus) - 1.0 / one_minus -
                         t.log_c;
  return {log_abs, q > 0.0L ? 1 : -1};
}

double mollifier(double p, int k) { return mollifier_log(p, k).value(); }

double mollifier_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto& t = mollifier_tables();
  if (x <= 0.0) return t.left_integral(x) / t.c;
  return 1.0 - t.left_integral(-x) / t.c;
}

// ---------------------------------------------------------------------------
// Hermite interpolant
// ---------------------------------------------------------------------------

namespace {

// (1 - x)^{-r} = sum_j C(r-1+j, j) x^j, truncated and convolved with Taylor data f_k
std::vector<long double> two_point_factor(int r, const std::vector<long double>& taylor) {
  std::vector<long double> out(static_cast<std::size_t>(r), 0.0L);
  for (int m = 0; m < r; ++m) {
    long double binom = 1.0L;  // C(r-1+j, j) for j = 0
    long double acc = 0.0L;
    for (int j = 0; j <= m; ++j) {
      if (j > 0) binom = binom * static_cast<long double>(r - 1 + j) / static_cast<long double>(j);
      acc += taylor[static_cast<std::size_t>(m - j)] * binom;
    }
    out[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

// nu-th derivative of sum_j c_j x^j
long double poly_derivative_at(const std::vector<long double>& c, int nu, long double x) {
  long double acc = 0.0L;
  for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(nu);) {
    long double f = 1.0L;
    for (int m = 0; m < nu; ++m) f *= static_cast<long double>(j - m);
    acc = acc * x + c[j] * f;
  }
  return acc;
}

// d^j/dx^j x^r
long double power_derivative(int r, int j, long double x) {
  if (j > r) return 0.0L;
  long double f = 1.0L;
  for (int m = 0; m < j; ++m) f *= static_cast<long double>(r - m);
  return f * std::pow(x, r - j);
}

}  // namespace

// P(p) = s^r A(t) + t^r B(s) with t = p + 1, s = -p. A and B have non-negative
// coefficients, so evaluation on [-1, 0] is free of cancellation.
HermiteInterpolant make_hermite_interpolant(int r) {
  if (r < 1 || r > kHermiteMaxOrder) throw ConfigError("hermite: r must lie in [1, 16]");
  std::vector<long double> left(static_cast<std::size_t>(r)), right(static_cast<std::size_t>(r));
  long double fact = 1.0L;
  for (int k = 0; k < r; ++k) {
    if (k > 0) fact *= k;
    // d/dt = d/dp at p = -1; d/ds = -d/dp at p = 0 turns (-1)^k into 1
    left[static_cast<std::size_t>(k)] = std::exp(-1.0L) / fact;
    right[static_cast<std::size_t>(k)] = 1.0L / fact;
  }
  HermiteInterpolant h;
  h.r = r;
  h.a = two_point_factor(r, left);
  h.b = two_point_factor(r, right);
  return h;
}

double HermiteInterpolant::eval(double p, int k) const {
  if (k < 0) throw ConfigError("hermite: negative derivative order");
  if (k >= 2 * r) return 0.0;
  const long double t = static_cast<long double>(p) + 1.0L;
  const long double s = -static_cast<long double>(p);
  long double acc = 0.0L;
  long double binom = 1.0L;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) binom = binom * static_cast<long double>(k - j + 1) / static_cast<long double>(j);
    const int m = k - j;
    const long double sign_s = (j % 2 == 0) ? 1.0L : -1.0L;  // d/dp s = -1
    const long double sign_b = (m % 2 == 0) ? 1.0L : -1.0L;
    acc += binom * sign_s * power_derivative(r, j, s) * poly_derivative_at(a, m, t);
    acc += binom * power_derivative(r, j, t) * sign_b * poly_derivative_at(b, m, s);
  }
  return static_cast<double>(acc);
}

}  // namespace schr
