#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "schr/types.hpp"

namespace schr {

// Matrix exponential by scaling and squaring with diagonal Padé approximants
// (degrees 3, 5, 7, 9 for small 1-norms, 13 with scaling otherwise).
// Templated so fixed-max-size matrices avoid heap traffic in hot loops.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& input) {
  using Mat = typename Derived::PlainObject;
  if (input.rows() != input.cols()) throw ConfigError("expm: matrix must be square");
  const Eigen::Index n = input.rows();
  if (n == 0) return Mat(0, 0);

  Mat a = input;
  if (!a.allFinite()) throw NumericalError("expm: non-finite input");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  const Mat id = Mat::Identity(n, n);
  auto solve = [](const Mat& u, const Mat& v) -> Mat {
    Mat r = (v - u).partialPivLu().solve(v + u);
    return r;
  };

  if (norm1 <= 2.097847961257068) {
    const Mat a2 = a * a;
    if (norm1 <= 1.495585217958292e-2) {
      const double b[] = {120.0, 60.0, 12.0, 1.0};
      const Mat u = a * (b[3] * a2 + b[1] * id);
      const Mat v = b[2] * a2 + b[0] * id;
      return solve(u, v);
    }
    const Mat a4 = a2 * a2;
    if (norm1 <= 2.539398330063230e-1) {
      const double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
      const Mat u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      const Mat v = b[4] * a4 + b[2] * a2 + b[0] * id;
      return solve(u, v);
    }
    const Mat a6 = a4 * a2;
    if (norm1 <= 9.504178996162932e-1) {
      const double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                          25200.0,    1512.0,    56.0,      1.0};
      const Mat u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      const Mat v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      return solve(u, v);
    }
    const Mat a8 = a4 * a4;
    const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                        2162160.0,     110880.0,     3960.0,       90.0,        1.0};
    const Mat u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const Mat v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return solve(u, v);
  }

  constexpr double theta13 = 5.371920351148152;
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  if (s > 1000) throw NumericalError("expm: norm too large for scaling and squaring");
  a *= std::ldexp(1.0, -s);

  const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                      1187353796428800.0,  129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,       1323241920.0,
                      40840800.0,          960960.0,            16380.0,
                      182.0,               1.0};
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const Mat u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Mat inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  const Mat v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Mat r = solve(u, v);
  for (int i = 0; i < s; ++i) {
    const Mat sq = r * r;
    r = sq;
  }
  if (!r.allFinite()) throw NumericalError("expm: non-finite result");
  return r;
}

// max_ij |(V^H V - I)_ij|
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& v) {
  using Mat = typename Derived::PlainObject;
  const Mat g = v.adjoint() * v;
  return (g - Mat::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

}  // namespace schr
