#pragma once

#include <unsupported/Eigen/FFT>
#include <vector>

#include "schr/types.hpp"

namespace schr::detail {

// Centred-mode DFT along columns. With modes mu_l (l - n/2) and nodes k,
// e^{-i mu_l (p_k + L)} = e^{-2 pi i l k / n} (-1)^k, so a plain FFT of the
// (-1)^k-modulated column gives the centred coefficients directly.
inline void centred_dft_columns(CMatrix& m, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  const Eigen::Index n = m.rows();
  std::vector<cplx> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (!inverse) {
      for (Eigen::Index k = 0; k < n; ++k) in[k] = (k % 2 == 0) ? m(k, c) : -m(k, c);
      fft.fwd(out, in);
      for (Eigen::Index k = 0; k < n; ++k) m(k, c) = out[k] * inv_n;
    } else {
      for (Eigen::Index k = 0; k < n; ++k) in[k] = m(k, c);
      fft.inv(out, in);
      for (Eigen::Index k = 0; k < n; ++k) m(k, c) = (k % 2 == 0) ? out[k] : -out[k];
    }
  }
}

}  // namespace schr::detail
