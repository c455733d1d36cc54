#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cyclocap/noise_model.hpp"
#include "cyclocap/parallel.hpp"

namespace cyclocap {

/// Largest k accepted by the dense k x k solvers.
inline constexpr int kMaxBlockLength = 4096;

/// k x k noise covariance (C_W)_{u,v} = c[v, u - v] at sampling phase tau0.
struct BlockNoiseCov {
  int k = 0;
  Eigen::MatrixXd cov;
  double tau0 = 0.0;
};

/// Throws SizeLimitError for k > kMaxBlockLength and ModelInvalidError when
/// the covariance is not positive definite (unless check_pd is false).
BlockNoiseCov block_noise_covariance(const DtCorrelation& dt, int k, double tau0, bool check_pd = true);

/// log2 det of a symmetric positive-definite matrix from its Cholesky pivots.
double log2_det_spd(const Eigen::MatrixXd& m);

/// Waterfilled input covariance U diag((level - mu)^+) U^T with trace k*power.
struct FiniteBlockSolution {
  Eigen::MatrixXd input_cov;
  double level = 0.0;
  double capacity = 0.0;  ///< bits per channel use
};
FiniteBlockSolution waterfill_block(const BlockNoiseCov& noise, double power);

/// Finite-blocklength Gaussian capacity (1/2k) sum log2(1 + gamma_i / mu_i).
double cover_pombra_capacity(const BlockNoiseCov& noise, double power);

struct PhaseAverage {
  double average = 0.0;
  double minimum = 0.0;
  std::vector<double> per_phase;
};

/// Average and minimum of cover_pombra_capacity over a uniform tau0 grid.
PhaseAverage phase_average_rate(const PulseCorrelationModel& model, const SamplingSpec& spec, double power, int k,
                                int n_tau0, Exec exec = Exec::parallel);

struct InfoDensityStats {
  int k = 0;
  double analytic_mean = 0.0;  ///< bits per use
  double analytic_var = 0.0;   ///< (bits per use)^2
  double mc_mean = 0.0;
  double mc_var = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double input_trace_sq = 0.0;  ///< Tr{C_X^2} / k^2
};

/// Analytic moments of the information density rate Z_k plus a Monte-Carlo
/// estimate from `samples` draws of X ~ N(0, C_X), W ~ N(0, C_W).
/// Batches of kMcBatch samples each use their own mt19937_64 stream seeded
/// from splitmix64(seed, batch index); results do not depend on `exec`.
InfoDensityStats info_density_stats(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov,
                                    std::uint64_t samples, std::uint64_t seed, Exec exec = Exec::parallel);

inline constexpr std::uint64_t kMcBatch = 1024;

/// Only the analytic part of info_density_stats.
InfoDensityStats info_density_moments(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov);

/// |Tr{-(C_X + C_W)^{-1} C_X - (C_X + C_W)^{-1} C_W + I}|, zero up to rounding.
double eigen_sum_identity_check(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov);

/// Delay after a block of k + tau_m samples that returns the sampling phase
/// to tau_opt, in [0, tpw).
double guard_delay(double tau_opt, int k, int tau_m, double ts, double tpw);

}  // namespace cyclocap
