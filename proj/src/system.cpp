#include "schr/system.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>

namespace schr {

namespace {

double max_hermitian_eigenvalue(const CMatrix& a) {
  const CMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return es.eigenvalues().maxCoeff();
}

// sup of |f| on [0, T]: dense sampling, then Brent refinement around the best sample.
double sup_abs(const std::function<double(double)>& f, double horizon, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 2);
  const double h = horizon / static_cast<double>(samples - 1);
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = std::abs(f(h * static_cast<double>(i)));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best <= 0.0) return 0.0;
  const double lo = std::max(0.0, h * (static_cast<double>(best_i) - 1.0));
  const double hi = std::min(horizon, h * (static_cast<double>(best_i) + 1.0));
  auto neg = [&](double t) { return -std::abs(f(t)); };
  const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
  return std::max(best, -r.second);
}

}  // namespace

DynamicalSystem::DynamicalSystem(CMatrix a, CVector b, CVector u0, double horizon, SystemOptions opts)
    : u0_(std::move(u0)), horizon_(horizon), time_dependent_(false) {
  if (a.rows() != a.cols() || a.rows() != u0_.size() || b.size() != u0_.size())
    throw ConfigError("system: inconsistent dimensions of A, b, u0");
  a_of_t_ = [a = std::move(a)](double) { return a; };
  b_of_t_ = [b = std::move(b)](double) { return b; };
  validate(opts);
}

DynamicalSystem::DynamicalSystem(MatrixFn a_of_t, VectorFn b_of_t, CVector u0, double horizon,
                                 bool time_dependent, SystemOptions opts)
    : a_of_t_(std::move(a_of_t)),
      b_of_t_(std::move(b_of_t)),
      u0_(std::move(u0)),
      horizon_(horizon),
      time_dependent_(time_dependent) {
  if (!a_of_t_ || !b_of_t_) throw ConfigError("system: A(t) and b(t) must be callable");
  const CMatrix a0 = a_of_t_(0.0);
  const CVector b0 = b_of_t_(0.0);
  if (a0.rows() != a0.cols() || a0.rows() != u0_.size() || b0.size() != u0_.size())
    throw ConfigError("system: inconsistent dimensions of A, b, u0");
  validate(opts);
}

void DynamicalSystem::validate(const SystemOptions& opts) const {
  if (u0_.size() < 1) throw ConfigError("system: dimension must be at least 1");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ConfigError("system: horizon T must be positive");
  const std::size_t n = time_dependent_ ? std::max<std::size_t>(opts.validation_samples, 2) : 1;
  for (double t : uniform_time_grid(horizon_, n)) {
    const CMatrix a = a_of_t_(t);
    if (!a.allFinite()) throw ConfigError("system: A(t) has non-finite entries");
    const double lmax = max_hermitian_eigenvalue(a);
    if (lmax > opts.negativity_tol)
      throw ConfigError("system: (A + A^H)/2 has eigenvalue " + std::to_string(lmax) + " > tolerance at t = " +
                        std::to_string(t));
  }
}

DynamicalSystem DynamicalSystem::with_source_bound(RVector bound) const {
  if (bound.size() != dim() || (bound.array() < 0.0).any())
    throw ConfigError("system: source bound must be non-negative with length N");
  DynamicalSystem out = *this;
  out.source_bound_ = std::move(bound);
  return out;
}

DynamicalSystem DynamicalSystem::with_initial(CVector u0) const {
  if (u0.size() != dim()) throw ConfigError("system: u0 length mismatch");
  DynamicalSystem out = *this;
  out.u0_ = std::move(u0);
  return out;
}

DynamicalSystem DynamicalSystem::without_source() const {
  DynamicalSystem out = *this;
  const Eigen::Index n = dim();
  out.b_of_t_ = [n](double) { return CVector::Zero(n).eval(); };
  out.source_bound_.reset();
  return out;
}

std::vector<double> uniform_time_grid(double horizon, std::size_t samples) {
  if (samples <= 1) return {0.0};
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
  return t;
}

HomogenizedSystem homogenize(const DynamicalSystem& sys, std::size_t sup_samples) {
  const Eigen::Index n = sys.dim();
  const double horizon = sys.horizon();
  RVector sup(n);
  if (sys.source_bound()) {
    sup = *sys.source_bound();
  } else if (!sys.time_dependent()) {
    sup = sys.b(0.0).cwiseAbs();
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      sup(i) = sup_abs([&](double t) { return std::abs(sys.b(t)(i)); }, horizon, sup_samples);
  }

  HomogenizedSystem hs;
  hs.gamma = horizon * sup;
  hs.b_norm_smax = sup.norm();
  hs.time_dependent = sys.time_dependent();
  hs.original_dim = n;
  hs.horizon = horizon;
  hs.u_i = CVector::Zero(2 * n);
  hs.u_i.head(n) = sys.u0();
  hs.u_i.tail(n) = hs.gamma.cast<cplx>();

  RVector inv_gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_gamma(i) = hs.gamma(i) > 0.0 ? 1.0 / hs.gamma(i) : 0.0;

  auto assemble = [n, inv_gamma](const CMatrix& a, const CVector& b) {
    CMatrix af = CMatrix::Zero(2 * n, 2 * n);
    af.topLeftCorner(n, n) = a;
    for (Eigen::Index i = 0; i < n; ++i) af(i, n + i) = b(i) * inv_gamma(i);
    return af;
  };
  if (sys.time_dependent()) {
    hs.a_f = [sys, assemble](double t) { return assemble(sys.a(t), sys.b(t)); };
  } else {
    const CMatrix af = assemble(sys.a(0.0), sys.b(0.0));
    hs.a_f = [af](double) { return af; };
  }
  return hs;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

HermitianSplit hermitian_split(const CMatrix& a_f) {
  if (a_f.rows() != a_f.cols()) throw ConfigError("hermitian_split: matrix must be square");
  const CMatrix h1 = (a_f + a_f.adjoint()) / 2.0;
  const CMatrix h2 = (a_f - a_f.adjoint()) / cplx(0.0, 2.0);
  HermitianSplit s;
  s.h1 = [h1](double) { return h1; };
  s.h2 = [h2](double) { return h2; };
  s.time_dependent = false;
  s.alpha1 = spectral_norm(h1);
  s.alpha2 = spectral_norm(h2);
  return s;
}

HermitianSplit hermitian_split(const HomogenizedSystem& hs, std::size_t samples) {
  if (!hs.time_dependent) return hermitian_split(hs.a_f(0.0));
  HermitianSplit s;
  const MatrixFn af = hs.a_f;
  s.h1 = [af](double t) {
    const CMatrix a = af(t);
    return CMatrix((a + a.adjoint()) / 2.0);
  };
  s.h2 = [af](double t) {
    const CMatrix a = af(t);
    return CMatrix((a - a.adjoint()) / cplx(0.0, 2.0));
  };
  s.time_dependent = true;
  for (double t : uniform_time_grid(hs.horizon, samples)) {
    s.alpha1 = std::max(s.alpha1, spectral_norm(s.h1(t)));
    s.alpha2 = std::max(s.alpha2, spectral_norm(s.h2(t)));
  }
  return s;
}

SpectralBounds spectral_bounds(const HermitianSplit& split, std::span<const double> t_grid) {
  SpectralBounds b;
  const std::vector<double> only_zero{0.0};
  const std::span<const double> grid = split.time_dependent ? t_grid : std::span<const double>(only_zero);
  for (double t : grid) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(split.h1(t), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("spectral_bounds: eigendecomposition failed");
    const RVector& ev = es.eigenvalues();
    b.lambda_plus = std::max(b.lambda_plus, std::max(0.0, ev.maxCoeff()));
    b.lambda_minus = std::max(b.lambda_minus, std::max(0.0, -ev.minCoeff()));
  }
  return b;
}

CMatrix diag_matrix(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("diag: empty value list");
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  return a;
}

CMatrix convection_diffusion_1d(int n, double velocity, double diffusion, double length) {
  if (n < 1) throw ConfigError("convection-diffusion-1d: n must be positive");
  if (diffusion < 0.0) throw ConfigError("convection-diffusion-1d: diffusion must be non-negative");
  if (!(length > 0.0)) throw ConfigError("convection-diffusion-1d: length must be positive");
  const double h = length / (n + 1);
  CMatrix a = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = -2.0 * diffusion / (h * h);
    if (i > 0) a(i, i - 1) = diffusion / (h * h) + velocity / (2.0 * h);
    if (i + 1 < n) a(i, i + 1) = diffusion / (h * h) - velocity / (2.0 * h);
  }
  return a;
}

std::vector<std::string> builtin_system_names() {
  return {"std2", "std2-homogeneous", "zero", "scalar-decay", "scalar-td", "unitary2"};
}

DynamicalSystem builtin_system(const std::string& name) {
  if (name == "std2" || name == "std2-homogeneous") {
    CMatrix a(2, 2);
    a << -1.0, 0.5, -0.5, -2.0;
    CVector b(2);
    b << 1.0, 0.0;
    if (name == "std2-homogeneous") b.setZero();
    CVector u0(2);
    u0 << 1.0, 1.0;
    return DynamicalSystem(a, b, u0, 1.0);
  }
  if (name == "zero") {
    CVector u0(2);
    u0 << 1.0, -0.5;
    return DynamicalSystem(CMatrix::Zero(2, 2), CVector::Zero(2), u0, 1.0);
  }
  if (name == "scalar-decay") {
    return DynamicalSystem(CMatrix::Constant(1, 1, -1.0), CVector::Zero(1), CVector::Ones(1), 1.0);
  }
  if (name == "scalar-td") {
    auto a = [](double t) { return CMatrix::Constant(1, 1, -(1.0 + 0.5 * std::sin(t))).eval(); };
    auto b = [](double) { return CVector::Zero(1).eval(); };
    return DynamicalSystem(a, b, CVector::Ones(1), 1.0, true);
  }
  if (name == "unitary2") {
    CMatrix h(2, 2);
    h << 1.0, 0.5, 0.5, -1.0;
    CVector u0(2);
    u0 << 1.0, 0.0;
    return DynamicalSystem(cplx(0.0, 1.0) * h, CVector::Zero(2), u0, 1.0);
  }
  throw ConfigError("unknown builtin system '" + name + "'");
}

}  // namespace schr
