#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cyclocap/noise_model.hpp"
#include "cyclocap/parallel.hpp"

namespace cyclocap {

/// Block correlation C[tau] (pn x pn, tau = -L..L) of the pn-variate
/// stationary process obtained by stacking pn consecutive samples:
/// (C[tau])_{a,b} = c[b, tau*pn + a - b].
struct BlockCorrelation {
  int pn = 0;
  int lags = 0;  ///< L
  std::vector<Eigen::MatrixXd> mats;  ///< index tau + L
  double tau0 = 0.0;
  double ts = 0.0;  ///< sampling interval of the underlying process, seconds
  int tau_m = 0;

  [[nodiscard]] const Eigen::MatrixXd& at(int tau) const { return mats.at(static_cast<std::size_t>(tau + lags)); }
};

/// Requires a rational eps whose period divides pn; throws PeriodMismatchError
/// otherwise. L = ceil(tau_m / pn).
BlockCorrelation build_block_correlation(const DtCorrelation& dt, int pn);

/// White noise of variance sigma2 in block form (C[0] = sigma2*I, C[+-1] = 0).
BlockCorrelation white_block_correlation(int pn, double sigma2);

/// C'(theta) = sum_tau C[tau] exp(-j*theta*tau).
Eigen::MatrixXcd spectral_matrix(const BlockCorrelation& bc, double theta);

/// Eigenvalues of a Hermitian matrix, descending. Throws NumericalError when
/// max|M - M^H| exceeds 1e-12 * max|M|.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m);

/// Eigenvalues mu_k(theta) of C'(theta) on a uniform grid over [0, pi].
struct SpectralEigs {
  int pn = 0;
  std::vector<double> theta;
  std::vector<double> weights;  ///< trapezoid weights, sum to 1
  std::vector<double> values;   ///< theta-major, pn per theta, descending
  double loading = 0.0;         ///< diagonal loading applied (0 unless requested)

  [[nodiscard]] std::span<const double> at(std::size_t j) const {
    return {values.data() + j * static_cast<std::size_t>(pn), static_cast<std::size_t>(pn)};
  }
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double max_value() const;
};

struct SpectralOptions {
  int n_theta = 1024;
  Exec exec = Exec::parallel;
  /// Adds 1e-12 * max diag(C[0]) to the diagonal instead of failing on a
  /// non-positive eigenvalue. Reported through SpectralEigs::loading.
  bool diagonal_loading = false;
  /// Forces the dense eigensolver (reference path).
  bool dense = false;
};

/// Trapezoid weights for n points on [0, pi], normalised to sum to one so
/// that sum_j w_j f(theta_j) approximates (1/2pi) int_{-pi}^{pi} f for even f.
std::vector<double> trapezoid_weights(int n_theta);

/// Throws ModelInvalidError if some mu_k(theta) <= 0 (and loading is off).
SpectralEigs spectral_eigs(const BlockCorrelation& bc, const SpectralOptions& options = {});

}  // namespace cyclocap
