#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "schr/types.hpp"

namespace schr {

// ---------------------------------------------------------------------------
// Sign/log-magnitude numbers for derivative values that overflow doubles.
// ---------------------------------------------------------------------------

struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static SignedLog from(double x);
  static SignedLog from_log(double log_abs, int sign) { return {log_abs, log_abs == -std::numeric_limits<double>::infinity() ? 0 : sign}; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool is_zero() const { return sign == 0; }
};

SignedLog operator*(const SignedLog& a, const SignedLog& b);
SignedLog operator+(const SignedLog& a, const SignedLog& b);

// Accumulates a signed sum of terms in log form (scaled by the running max).
class SignedLogSum {
 public:
  void add(const SignedLog& term);
  SignedLog result() const;

 private:
  std::vector<SignedLog> terms_;
};

double log_binomial(int n, int k);

// ---------------------------------------------------------------------------
// Hermite polynomials (physicists').
// ---------------------------------------------------------------------------

// H_n(x) by the three-term recurrence H_{n+1} = 2x H_n - 2n H_{n-1}.
double hermite_polynomial(int n, double x);

// H_n(x) in log form; the recurrence is rescaled so large n and |x| do not overflow.
SignedLog hermite_polynomial_log(int n, double x);
// H_0(x) .. H_{n_max}(x) in log form from a single recurrence pass.
std::vector<SignedLog> hermite_polynomials_log(int n_max, double x);

// k-th derivative of erf at x in log form, via erf^(k)(x) = (2/sqrt(pi)) (-1)^{k-1} H_{k-1}(x) e^{-x^2}
// for k >= 1; erf itself for k = 0.
SignedLog erf_derivative_log(int k, double x);

// ---------------------------------------------------------------------------
// Quadrature.
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule by Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

// Adaptive Gauss-Kronrod (15-point) integral of f on [a, b] with absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                          unsigned max_depth = 30);

// ---------------------------------------------------------------------------
// Mollifier eta(p) = exp(1/(p^2-1)) / C on (-1, 1) and its derivatives.
// ---------------------------------------------------------------------------

using BigInt = boost::multiprecision::cpp_int;

// Integer coefficients (ascending powers) of Q_k with
// theta^(k)(p) = Q_k(p) (1-p^2)^{-2k} exp(1/(p^2-1)).
struct MollifierDerivative {
  int order = 0;
  std::vector<BigInt> q_poly;
};

constexpr int kMollifierMaxOrder = 40;

// Q_{k+1} = (1-p^2)^2 Q_k' + 2p(2k-1-2kp^2) Q_k, Q_0 = 1.
MollifierDerivative next_mollifier_derivative(const MollifierDerivative& q);
const MollifierDerivative& mollifier_derivative(int k);

double mollifier_normalization();                 // C = int_{-1}^{1} exp(1/(p^2-1)) dp
double mollifier(double p, int k = 0);            // eta^(k)(p)
SignedLog mollifier_log(double p, int k);          // eta^(k)(p) in log form
double mollifier_cdf(double x);                   // int_{-1}^{x} eta

// ---------------------------------------------------------------------------
// Hermite interpolation polynomial P_{2r-1} on [-1, 0] with
// P^(k)(0) = (-1)^k and P^(k)(-1) = e^{-1} for k < r.
// ---------------------------------------------------------------------------

constexpr int kHermiteMaxOrder = 16;

struct HermiteInterpolant {
  int r = 0;
  // P(p) = (-p)^r A(p + 1) + (p + 1)^r B(-p); ascending coefficients of A and B
  std::vector<long double> a;
  std::vector<long double> b;
  double eval(double p, int k = 0) const;
};

HermiteInterpolant make_hermite_interpolant(int r);

}  // namespace schr
