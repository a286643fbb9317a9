#pragma once

#include <string>

#include "schr/expm.hpp"
#include "schr/system.hpp"

namespace schr {

enum class OracleMethod { Expm, Duhamel, AdaptiveRK };

std::string to_string(OracleMethod m);

struct ReferenceSolution {
  CVector u_T;
  OracleMethod method = OracleMethod::Expm;
  double est_error = 0.0;  // relative
};

// Time-independent: e^{AT} u0 + A^{-1}(e^{AT} - I) b, or 64-node Gauss-Legendre
// quadrature of e^{A(T-s)} b when A is numerically singular.
// Time-dependent: Dormand-Prince 5(4) to `tol`, certified against a
// half-tolerance re-solve.
ReferenceSolution solve_reference(const DynamicalSystem& sys, double tol = 1e-10);

struct RkOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 10000000;
};

struct RkResult {
  CVector u_T;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

// Dormand-Prince 5(4) for du/dt = A(t) u + b(t) on [0, T].
RkResult integrate_dopri(const DynamicalSystem& sys, const RkOptions& opts);

}  // namespace schr
