#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schr/types.hpp"

namespace schr {

using MatrixFn = std::function<CMatrix(double)>;
using VectorFn = std::function<CVector(double)>;

struct SystemOptions {
  // Largest eigenvalue of (A + A^H)/2 allowed before the system is rejected.
  double negativity_tol = 1e-10;
  // Sample count on [0, T] for the negativity check of time-dependent A.
  std::size_t validation_samples = 65;
};

// du/dt = A(t) u + b(t), u(0) = u0, t in [0, T]. Immutable once built.
class DynamicalSystem {
 public:
  DynamicalSystem(CMatrix a, CVector b, CVector u0, double horizon, SystemOptions opts = {});
  // The flag is taken as given: constancy of a function cannot be probed.
  DynamicalSystem(MatrixFn a_of_t, VectorFn b_of_t, CVector u0, double horizon, bool time_dependent,
                  SystemOptions opts = {});

  Eigen::Index dim() const { return u0_.size(); }
  CMatrix a(double t) const { return a_of_t_(t); }
  CVector b(double t) const { return b_of_t_(t); }
  const CVector& u0() const { return u0_; }
  double horizon() const { return horizon_; }
  bool time_dependent() const { return time_dependent_; }

  // Upper bounds on sup_t |b_i(t)|; used instead of sampling when present.
  const std::optional<RVector>& source_bound() const { return source_bound_; }
  DynamicalSystem with_source_bound(RVector bound) const;
  DynamicalSystem with_initial(CVector u0) const;
  DynamicalSystem without_source() const;

 private:
  void validate(const SystemOptions& opts) const;

  MatrixFn a_of_t_;
  VectorFn b_of_t_;
  CVector u0_;
  double horizon_ = 0.0;
  bool time_dependent_ = false;
  std::optional<RVector> source_bound_;
};

// Augmented homogeneous system du_f/dt = A_f(t) u_f, A_f = [[A, B],[0, 0]],
// B = diag(b_i / gamma_i), u_I = [u0; gamma].
struct HomogenizedSystem {
  MatrixFn a_f;
  CVector u_i;
  RVector gamma;
  double b_norm_smax = 0.0;
  bool time_dependent = false;
  Eigen::Index original_dim = 0;
  double horizon = 0.0;
};

HomogenizedSystem homogenize(const DynamicalSystem& sys, std::size_t sup_samples = 1024);

// A_f = H1 + i H2 with H1, H2 Hermitian.
struct HermitianSplit {
  MatrixFn h1;
  MatrixFn h2;
  bool time_dependent = false;
  double alpha1 = 0.0;  // sup_t ||H1(t)||_2
  double alpha2 = 0.0;  // sup_t ||H2(t)||_2
  double alpha_h() const { return std::max(alpha1, alpha2); }
};

HermitianSplit hermitian_split(const CMatrix& a_f);
HermitianSplit hermitian_split(const HomogenizedSystem& hs, std::size_t samples = 65);

struct SpectralBounds {
  double lambda_plus = 0.0;   // sup over t of the largest positive eigenvalue of H1
  double lambda_minus = 0.0;  // sup over t of |most negative eigenvalue of H1|
  double lambda_abs() const { return std::max(lambda_plus, lambda_minus); }
};

SpectralBounds spectral_bounds(const HermitianSplit& split, std::span<const double> t_grid);
std::vector<double> uniform_time_grid(double horizon, std::size_t samples);

double spectral_norm(const CMatrix& m);

// Builtin matrix generators.
CMatrix diag_matrix(const std::vector<double>& values);
// Centred finite differences for -c u_x + nu u_xx on (0, length) with
// homogeneous Dirichlet boundaries and n interior nodes.
CMatrix convection_diffusion_1d(int n, double velocity, double diffusion, double length = 1.0);

// Named test systems: "std2", "std2-homogeneous", "zero", "scalar-decay",
// "scalar-td", "unitary2".
DynamicalSystem builtin_system(const std::string& name);
std::vector<std::string> builtin_system_names();

}  // namespace schr
