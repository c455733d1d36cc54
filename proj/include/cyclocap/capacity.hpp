#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cyclocap/dcd_spectrum.hpp"
#include "cyclocap/noise_model.hpp"

namespace cyclocap {

/// All rates are in bits (base-2 logarithms).
struct CapacityResult {
  double delta_bar = 0.0;  ///< waterfilling level
  double c_per_use = 0.0;  ///< bits per channel use
  double c_bps = 0.0;      ///< bits per second, c_per_use / Ts
  double tau0 = 0.0;       ///< sampling phase, seconds
  int pn = 0;
  std::int64_t n = 0;       ///< approximation index (0 when not part of a sequence)
  Rational eps_n{0, 1};
};

/// Solves sum_i w_i (level - mu_i)^+ = power for weights summing to one.
/// `modes` only widens the initial bracket. Throws NumericalError if the
/// residual is not within 1e-10 relative after 200 bisection steps.
double waterfill_weighted(std::span<const double> mu, std::span<const double> w, double power, int modes = 1);

/// Allocated power (1/(2 pi pn)) sum_k int (level - mu_k)^+ on the grid.
double allocated_power(const SpectralEigs& eigs, double level);

/// Level such that allocated_power(eigs, level) == power.
double waterfill_level(const SpectralEigs& eigs, double power);

/// (1/(4 pi pn)) sum_k int (log2(level / mu_k))^+ on the grid.
double capacity_from_level(const SpectralEigs& eigs, double level);

CapacityResult capacity_at_phase(const BlockCorrelation& bc, double power, const SpectralOptions& options = {});

/// Waterfilling over the per-sample variances diag(C[0]) with a flat spectrum.
CapacityResult memoryless_capacity(const BlockCorrelation& bc, double power);

/// Uniform grid of n points over [0, tpw).
std::vector<double> phase_grid(double tpw, int n);

/// Maximises capacity_at_phase over a uniform tau0 grid; ties go to the
/// smallest tau0. `eps` must be rational. options.exec parallelises the grid.
CapacityResult capacity_max_phase(const PulseCorrelationModel& model, int p, const Epsilon& eps, double power,
                                  int n_tau0, const SpectralOptions& options = {});

struct CnSequenceOptions {
  std::int64_t n_min = 1;
  std::int64_t n_max = 130;
  double tau0 = 0.0;
  bool maximize_phase = false;
  int n_tau0 = 256;
  SpectralOptions spectral;
};

/// C_n for each n in [n_min, n_max]: eps_n = floor(n eps)/n, pn = p n + floor(n eps).
std::vector<CapacityResult> cn_sequence(const PulseCorrelationModel& model, int p, const Epsilon& eps, double power,
                                        const CnSequenceOptions& options);

/// Minimum over the trailing `window` entries; a reproducible stand-in for
/// the limit inferior of a sequence that does not converge.
double liminf_estimate(std::span<const double> values, std::size_t window);

/// Ratio tpw/Ts rationalised as p + u/v with v dividing `denom`.
struct RatePoint {
  double ratio = 0.0;
  int p = 0;
  std::int64_t u = 0;  ///< reduced
  std::int64_t v = 1;  ///< reduced
  [[nodiscard]] std::int64_t period() const { return p * v + u; }
  [[nodiscard]] Epsilon eps() const { return Epsilon::rational(u, v); }
};
RatePoint decompose_ratio(double ratio, int denom);

}  // namespace cyclocap
