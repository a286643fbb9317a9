#include "schr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schr/special.hpp"

namespace schr {

std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::Expm: return "expm";
    case OracleMethod::Duhamel: return "duhamel";
    case OracleMethod::AdaptiveRK: return "adaptive_rk";
  }
  return "unknown";
}

RkResult integrate_dopri(const DynamicalSystem& sys, const RkOptions& opts) {
  // Dormand-Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  auto f = [&](double t, const CVector& u) -> CVector { return sys.a(t) * u + sys.b(t); };
  const double T = sys.horizon();
  CVector u = sys.u0();
  double t = 0.0;
  double h = T / 100.0;
  RkResult res;
  CVector k1 = f(t, u);
  while (t < T) {
    if (res.steps + res.rejected > opts.max_steps) throw NumericalError("oracle: step budget exhausted");
    if (t + h > T) h = T - t;
    if (h < 1e-14 * T) throw NumericalError("oracle: step size underflow (stiff system?)");
    const CVector k2 = f(t + c2 * h, u + h * a21 * k1);
    const CVector k3 = f(t + c3 * h, u + h * (a31 * k1 + a32 * k2));
    const CVector k4 = f(t + c4 * h, u + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const CVector k5 = f(t + c5 * h, u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CVector k6 = f(t + h, u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const CVector u_new = u + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const CVector k7 = f(t + h, u_new);
    const CVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(u(i)), std::abs(u_new(i)));
      en = std::max(en, std::abs(err(i)) / sc);
    }
    if (!std::isfinite(en)) throw NumericalError("oracle: non-finite error estimate");
    if (en <= 1.0) {
      t += h;
      u = u_new;
      k1 = k7;
      ++res.steps;
    } else {
      ++res.rejected;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= factor;
  }
  res.u_T = u;
  return res;
}

ReferenceSolution solve_reference(const DynamicalSystem& sys, double tol) {
  if (!(tol > 0.0)) throw ConfigError("oracle: tolerance must be positive");
  ReferenceSolution ref;
  const double T = sys.horizon();
  if (!sys.time_dependent()) {
    const CMatrix a = sys.a(0.0);
    const CVector b = sys.b(0.0);
    const CMatrix e = expm(CMatrix(a * T));
    ref.u_T = e * sys.u0();
    ref.method = OracleMethod::Expm;
    if (b.squaredNorm() > 0.0) {
      ref.method = OracleMethod::Duhamel;
      const Eigen::PartialPivLU<CMatrix> lu(a);
      const CMatrix id = CMatrix::Identity(a.rows(), a.cols());
      if (lu.rcond() > 1e-10) {
        ref.u_T += lu.solve(CVector((e - id) * b));
      } else {
        const GaussRule& rule = gauss_legendre(64);
        CVector acc = CVector::Zero(b.size());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double s = 0.5 * T * (rule.nodes[i] + 1.0);
          acc += rule.weights[i] * (expm(CMatrix(a * (T - s))) * b);
        }
        ref.u_T += 0.5 * T * acc;
      }
    }
    ref.est_error = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, e.norm());
    if (!ref.u_T.allFinite()) throw NumericalError("oracle: non-finite reference solution");
    return ref;
  }

  ref.method = OracleMethod::AdaptiveRK;
  double inner = tol / 10.0;
  for (int attempt = 0; attempt < 5; ++attempt, inner /= 10.0) {
    const RkResult coarse = integrate_dopri(sys, {inner, inner * 1e-2});
    const RkResult fine = integrate_dopri(sys, {inner / 2.0, inner * 5e-3});
    const double scale = std::max(fine.u_T.norm(), std::numeric_limits<double>::min());
    ref.u_T = fine.u_T;
    ref.est_error = (coarse.u_T - fine.u_T).norm() / scale;
    if (ref.est_error <= tol) return ref;
  }
  throw NumericalError("oracle: could not certify the requested tolerance");
}

}  // namespace schr
