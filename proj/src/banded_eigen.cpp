#include "banded_eigen.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

#include "cyclocap/error.hpp"

namespace cyclocap::detail {

CyclicBandPlan::CyclicBandPlan(const BlockCorrelation& bc) : n_(bc.pn) {
  std::vector<int> pos(static_cast<std::size_t>(n_));
  for (int j = 0; 2 * j < n_; ++j) {
    pos[static_cast<std::size_t>(j)] = 2 * j;
    if (n_ - 1 - j > j) pos[static_cast<std::size_t>(n_ - 1 - j)] = 2 * j + 1;
  }
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      bool nonzero = false;
      for (const auto& m : bc.mats) nonzero = nonzero || m(a, b) != 0.0 || m(b, a) != 0.0;
      if (!nonzero && a != b) continue;
      const int r = pos[static_cast<std::size_t>(a)];
      const int c = pos[static_cast<std::size_t>(b)];
      if (r > c) continue;
      upper_.push_back({r, c, a, b});
      kd_ = std::max(kd_, c - r);
    }
  }
}

bool CyclicBandPlan::worthwhile() const { return n_ >= 16 && 4 * kd_ < n_; }

std::vector<double> CyclicBandPlan::eigenvalues(const BlockCorrelation& bc, double theta, double shift) const {
  const int ldab = kd_ + 1;
  std::vector<std::complex<double>> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n_));
  std::vector<std::complex<double>> phase(bc.mats.size());
  for (int tau = -bc.lags; tau <= bc.lags; ++tau) {
    phase[static_cast<std::size_t>(tau + bc.lags)] = std::polar(1.0, -theta * tau);
  }
  for (const Entry& e : upper_) {
    std::complex<double> v = e.a == e.b ? shift : 0.0;
    for (std::size_t t = 0; t < bc.mats.size(); ++t) v += bc.mats[t](e.a, e.b) * phase[t];
    // upper band storage, column major: AB(kd + i - j, j) = A(i, j)
    const std::size_t idx = static_cast<std::size_t>(kd_ + e.row - e.col) +
                            static_cast<std::size_t>(e.col) * static_cast<std::size_t>(ldab);
    ab[idx] = v;
  }
  std::vector<double> w(static_cast<std::size_t>(n_));
  const lapack_int info =
      LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'U', n_, kd_, reinterpret_cast<lapack_complex_double*>(ab.data()), ldab, w.data(), nullptr, 1);
  if (info != 0) throw NumericalError("zhbev failed with info = " + std::to_string(info));
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace cyclocap::detail
