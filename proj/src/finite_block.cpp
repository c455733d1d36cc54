#include "cyclocap/finite_block.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cyclocap/capacity.hpp"
#include "cyclocap/error.hpp"

namespace cyclocap {

namespace {

void check_k(int k) {
  if (k < 1) throw ParseError("block length k must be >= 1");
  if (k > kMaxBlockLength) {
    throw SizeLimitError("block length " + std::to_string(k) + " exceeds the dense solver cap of " +
                         std::to_string(kMaxBlockLength));
  }
}

void check_shapes(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov) {
  if (input_cov.rows() != noise.k || input_cov.cols() != noise.k) {
    throw ShapeMismatchError("input covariance must be " + std::to_string(noise.k) + "x" + std::to_string(noise.k));
  }
}

Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw ModelInvalidError(std::string(what) + " is not positive definite");
  return llt;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
};

}  // namespace

BlockNoiseCov block_noise_covariance(const DtCorrelation& dt, int k, double tau0, bool check_pd) {
  check_k(k);
  const DtCorrelation at_phase = dt.with_tau0(tau0);
  BlockNoiseCov out;
  out.k = k;
  out.tau0 = tau0;
  out.cov.resize(k, k);
  for (int v = 0; v < k; ++v) {
    for (int u = 0; u < k; ++u) out.cov(u, v) = at_phase(v, u - v);
  }
  if (check_pd) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      std::ostringstream os;
      os << "noise covariance is not positive definite (min eigenvalue " << es.eigenvalues().minCoeff() << ")";
      throw ModelInvalidError(os.str());
    }
  }
  return out;
}

double log2_det_spd(const Eigen::MatrixXd& m) {
  const auto llt = cholesky(m, "matrix");
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log2(l(i, i));
  return 2.0 * s;
}

FiniteBlockSolution waterfill_block(const BlockNoiseCov& noise, double power) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(noise.cov);
  if (es.info() != Eigen::Success) throw NumericalError("noise eigendecomposition failed");
  const Eigen::VectorXd& mu = es.eigenvalues();
  if (mu.minCoeff() <= 0.0) throw ModelInvalidError("noise covariance is not positive definite");

  const std::vector<double> mus(mu.data(), mu.data() + mu.size());
  const std::vector<double> w(mus.size(), 1.0 / noise.k);
  FiniteBlockSolution sol;
  sol.level = waterfill_weighted(mus, w, power, noise.k);

  Eigen::VectorXd gamma(noise.k);
  double rate = 0.0;
  for (int i = 0; i < noise.k; ++i) {
    gamma(i) = std::max(sol.level - mu(i), 0.0);
    rate += std::log2(1.0 + gamma(i) / mu(i));
  }
  sol.capacity = rate / (2.0 * noise.k);
  sol.input_cov = es.eigenvectors() * gamma.asDiagonal() * es.eigenvectors().transpose();
  sol.input_cov = 0.5 * (sol.input_cov + sol.input_cov.transpose());
  return sol;
}

double cover_pombra_capacity(const BlockNoiseCov& noise, double power) { return waterfill_block(noise, power).capacity; }

PhaseAverage phase_average_rate(const PulseCorrelationModel& model, const SamplingSpec& spec, double power, int k,
                                int n_tau0, Exec exec) {
  check_k(k);
  const DtCorrelation dt(model, spec);
  const std::vector<double> grid = phase_grid(model.tpw, n_tau0);
  PhaseAverage out;
  out.per_phase.resize(grid.size());
  for_each_index(grid.size(), exec, [&](std::size_t j) {
    out.per_phase[j] = cover_pombra_capacity(block_noise_covariance(dt, k, grid[j]), power);
  });
  out.minimum = out.per_phase.front();
  double sum = 0.0;
  for (const double c : out.per_phase) {
    sum += c;
    out.minimum = std::min(out.minimum, c);
  }
  out.average = sum / static_cast<double>(out.per_phase.size());
  return out;
}

InfoDensityStats info_density_moments(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov) {
  check_shapes(noise, input_cov);
  const int k = noise.k;
  const Eigen::MatrixXd cy = input_cov + noise.cov;
  const auto llt_y = cholesky(cy, "C_X + C_W");

  InfoDensityStats s;
  s.k = k;
  s.analytic_mean = (log2_det_spd(cy) - log2_det_spd(noise.cov)) / (2.0 * k);
  // Tr{(I + C_W^{-1} C_X)^{-1}} = Tr{(C_X + C_W)^{-1} C_W}
  const double trace = llt_y.solve(noise.cov).trace();
  const double log2e = std::numbers::log2e;
  s.analytic_var = std::max(0.0, log2e * log2e * (k - trace) / (static_cast<double>(k) * k));
  s.input_trace_sq = (input_cov * input_cov).trace() / (static_cast<double>(k) * k);
  return s;
}

InfoDensityStats info_density_stats(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov,
                                    std::uint64_t samples, std::uint64_t seed, Exec exec) {
  if (samples < 1) throw ParseError("Monte-Carlo needs at least one sample");
  InfoDensityStats s = info_density_moments(noise, input_cov);
  s.samples = samples;
  s.seed = seed;
  const int k = noise.k;

  // X = A h with A A^T = C_X (C_X may be singular), W = L_W g
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_x(input_cov);
  const Eigen::VectorXd sqrt_gamma = es_x.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd a = es_x.eigenvectors() * sqrt_gamma.asDiagonal();
  const Eigen::MatrixXd l_w = cholesky(noise.cov, "C_W").matrixL();
  const Eigen::MatrixXd l_y = cholesky(input_cov + noise.cov, "C_X + C_W").matrixL();
  const double half_log_ratio = 0.5 * (log2_det_spd(input_cov + noise.cov) - log2_det_spd(noise.cov));
  const double log2e = std::numbers::log2e;

  const std::uint64_t batches = (samples + kMcBatch - 1) / kMcBatch;
  std::vector<Moments> partial(batches);
  for_each_index(batches, exec, [&](std::size_t b) {
    const std::uint64_t begin = b * kMcBatch;
    const auto count = static_cast<Eigen::Index>(std::min<std::uint64_t>(kMcBatch, samples - begin));
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
    std::normal_distribution<double> normal;
    Eigen::MatrixXd h(k, count);
    Eigen::MatrixXd g(k, count);
    for (Eigen::Index c = 0; c < count; ++c) {
      for (int i = 0; i < k; ++i) h(i, c) = normal(rng);
      for (int i = 0; i < k; ++i) g(i, c) = normal(rng);
    }
    Eigen::MatrixXd y = a * h;
    y.noalias() += l_w.triangularView<Eigen::Lower>() * g;
    l_y.triangularView<Eigen::Lower>().solveInPlace(y);
    Moments m;
    for (Eigen::Index c = 0; c < count; ++c) {
      // y^T C_Y^{-1} y - w^T C_W^{-1} w with w = L_W g
      const double quad = y.col(c).squaredNorm() - g.col(c).squaredNorm();
      m.add((half_log_ratio + 0.5 * log2e * quad) / k);
    }
    partial[b] = m;
  });

  Moments total;
  for (const Moments& m : partial) total.merge(m);
  s.mc_mean = total.mean;
  s.mc_var = total.count > 1.0 ? total.m2 / (total.count - 1.0) : 0.0;
  return s;
}

double eigen_sum_identity_check(const BlockNoiseCov& noise, const Eigen::MatrixXd& input_cov) {
  check_shapes(noise, input_cov);
  const auto llt = cholesky(input_cov + noise.cov, "C_X + C_W");
  const double t = -llt.solve(input_cov).trace() - llt.solve(noise.cov).trace() + noise.k;
  return std::abs(t);
}

double guard_delay(double tau_opt, int k, int tau_m, double ts, double tpw) {
  const double end_phase = std::fmod(tau_opt + (k + tau_m) * ts, tpw);
  const double tol = 1e-12 * tpw;
  if (std::abs(end_phase - tau_opt) <= tol || std::abs(end_phase - tau_opt - tpw) <= tol ||
      std::abs(end_phase + tpw - tau_opt) <= tol) {
    return 0.0;
  }
  if (end_phase < tau_opt) return tau_opt - end_phase;
  return tau_opt + tpw - end_phase;
}

}  // namespace cyclocap
