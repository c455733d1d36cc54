#include "cyclocap/dcd_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "banded_eigen.hpp"
#include "cyclocap/error.hpp"

namespace cyclocap {

BlockCorrelation build_block_correlation(const DtCorrelation& dt, int pn) {
  const auto period = dt.period();
  if (!period) throw PeriodMismatchError("block correlation needs a rational eps (synchronous sampling)");
  if (pn < 1 || pn % *period != 0) {
    throw PeriodMismatchError("block size " + std::to_string(pn) + " is not a multiple of the period " +
                              std::to_string(*period));
  }
  BlockCorrelation bc;
  bc.pn = pn;
  bc.tau_m = dt.tau_m();
  bc.lags = bc.tau_m == 0 ? 0 : (bc.tau_m + pn - 1) / pn;
  bc.tau0 = dt.spec().tau0;
  bc.ts = dt.ts();
  bc.mats.reserve(static_cast<std::size_t>(2 * bc.lags + 1));
  for (int tau = -bc.lags; tau <= bc.lags; ++tau) {
    Eigen::MatrixXd m(pn, pn);
    for (int b = 0; b < pn; ++b) {
      for (int a = 0; a < pn; ++a) {
        m(a, b) = dt(b, static_cast<std::int64_t>(tau) * pn + a - b);
      }
    }
    bc.mats.push_back(std::move(m));
  }
  return bc;
}

BlockCorrelation white_block_correlation(int pn, double sigma2) {
  BlockCorrelation bc;
  bc.pn = pn;
  bc.lags = 1;
  bc.ts = 1.0;
  bc.mats = {Eigen::MatrixXd::Zero(pn, pn), sigma2 * Eigen::MatrixXd::Identity(pn, pn),
             Eigen::MatrixXd::Zero(pn, pn)};
  return bc;
}

Eigen::MatrixXcd spectral_matrix(const BlockCorrelation& bc, double theta) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(bc.pn, bc.pn);
  for (int tau = -bc.lags; tau <= bc.lags; ++tau) {
    s += bc.at(tau).cast<std::complex<double>>() * std::polar(1.0, -theta * tau);
  }
  return s;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw NumericalError("hermitian_eigenvalues: matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  const double residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (residual > 1e-12 * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian (residual " << residual << ", scale " << scale << ")";
    throw NumericalError(os.str());
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::reverse(out.begin(), out.end());
  return out;
}

double SpectralEigs::min_value() const { return *std::min_element(values.begin(), values.end()); }
double SpectralEigs::max_value() const { return *std::max_element(values.begin(), values.end()); }

std::vector<double> trapezoid_weights(int n_theta) {
  if (n_theta < 2) throw ParseError("the frequency grid needs at least 2 points");
  std::vector<double> w(static_cast<std::size_t>(n_theta), 1.0 / (n_theta - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

SpectralEigs spectral_eigs(const BlockCorrelation& bc, const SpectralOptions& options) {
  const int n_theta = options.n_theta;
  SpectralEigs out;
  out.pn = bc.pn;
  out.weights = trapezoid_weights(n_theta);
  out.theta.resize(static_cast<std::size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) out.theta[static_cast<std::size_t>(j)] = std::numbers::pi * j / (n_theta - 1);

  // C[-tau] = C[tau]^T makes every C'(theta) Hermitian
  double scale = 0.0;
  for (const auto& m : bc.mats) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  for (int tau = 0; tau <= bc.lags; ++tau) {
    const double residual = (bc.at(-tau) - bc.at(tau).transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-12 * scale) throw NumericalError("block correlation violates C[-tau] = C[tau]^T");
  }

  const std::size_t pn = static_cast<std::size_t>(bc.pn);
  out.values.resize(static_cast<std::size_t>(n_theta) * pn);
  const detail::CyclicBandPlan plan(bc);
  const bool banded = !options.dense && plan.worthwhile();

  for_each_index(static_cast<std::size_t>(n_theta), options.exec, [&](std::size_t j) {
    const double theta = out.theta[j];
    const std::vector<double> mu =
        banded ? plan.eigenvalues(bc, theta, 0.0) : hermitian_eigenvalues(spectral_matrix(bc, theta));
    std::copy(mu.begin(), mu.end(), out.values.begin() + static_cast<std::ptrdiff_t>(j * pn));
  });

  if (out.min_value() <= 0.0) {
    const double max_diag = bc.at(0).diagonal().maxCoeff();
    if (options.diagonal_loading) {
      out.loading = 1e-12 * max_diag;
      for (double& v : out.values) v += out.loading;
    }
    if (out.min_value() <= 0.0) {
      std::ostringstream os;
      os << "spectral density is not positive definite (min eigenvalue " << out.min_value() << ")";
      throw ModelInvalidError(os.str());
    }
  }
  return out;
}

}  // namespace cyclocap
