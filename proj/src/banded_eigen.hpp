#pragma once

#include <complex>
#include <vector>

#include "cyclocap/dcd_spectrum.hpp"

namespace cyclocap::detail {

/// Interleaving order 0, n-1, 1, n-2, ... turns a cyclically banded matrix
/// into an ordinary banded one. Built once per BlockCorrelation.
class CyclicBandPlan {
 public:
  explicit CyclicBandPlan(const BlockCorrelation& bc);

  [[nodiscard]] int bandwidth() const { return kd_; }
  [[nodiscard]] bool worthwhile() const;

  /// Eigenvalues of C'(theta), descending, using LAPACK zhbev.
  [[nodiscard]] std::vector<double> eigenvalues(const BlockCorrelation& bc, double theta, double shift) const;

 private:
  struct Entry {
    int row;  // permuted, row <= col
    int col;
    int a;  // original indices
    int b;
  };
  int n_ = 0;
  int kd_ = 0;
  std::vector<Entry> upper_;
};

}  // namespace cyclocap::detail
