#include "cyclocap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cyclocap/error.hpp"

namespace cyclocap {

namespace {

double power_at(std::span<const double> mu, std::span<const double> w, double level) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (level > mu[i]) total += w[i] * (level - mu[i]);
  }
  return total;
}

double rate_at(std::span<const double> mu, std::span<const double> w, double level) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (level > mu[i]) total += w[i] * std::log2(level / mu[i]);
  }
  return 0.5 * total;
}

std::vector<double> spectral_weights(const SpectralEigs& eigs) {
  std::vector<double> w(eigs.values.size());
  const std::size_t pn = static_cast<std::size_t>(eigs.pn);
  for (std::size_t j = 0; j < eigs.weights.size(); ++j) {
    std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(j * pn), pn, eigs.weights[j] / eigs.pn);
  }
  return w;
}

CapacityResult flat_capacity(const BlockCorrelation& bc, std::span<const double> variances, double power) {
  const std::vector<double> w(variances.size(), 1.0 / static_cast<double>(variances.size()));
  CapacityResult r;
  r.delta_bar = waterfill_weighted(variances, w, power, bc.pn);
  r.c_per_use = rate_at(variances, w, r.delta_bar);
  r.c_bps = r.c_per_use / bc.ts;
  r.tau0 = bc.tau0;
  r.pn = bc.pn;
  return r;
}

}  // namespace

double waterfill_weighted(std::span<const double> mu, std::span<const double> w, double power, int modes) {
  if (!(power > 0.0)) throw ParseError("power must be positive");
  if (mu.empty() || mu.size() != w.size()) throw ShapeMismatchError("waterfill: eigenvalue/weight size mismatch");
  const auto [min_it, max_it] = std::minmax_element(mu.begin(), mu.end());
  double lo = *min_it;
  double hi = *min_it + 2.0 * power * modes + *max_it;

  for (int step = 0; step < 200 && hi - lo > 1e-15 * hi; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (power_at(mu, w, mid) < power) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double level = 0.5 * (lo + hi);

  // the allocated power is linear on the active set; solve it exactly
  double w_active = 0.0;
  double wmu_active = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < level) {
      w_active += w[i];
      wmu_active += w[i] * mu[i];
    }
  }
  if (w_active > 0.0) {
    const double exact = (power + wmu_active) / w_active;
    if (std::abs(exact - level) <= 1e-9 * level) level = exact;
  }

  // rounding floor of level - mu when power is tiny relative to level
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * level * w_active;
  const double residual = std::abs(power_at(mu, w, level) - power);
  if (residual > 1e-10 * power + floor) {
    std::ostringstream os;
    os << "waterfilling did not converge (residual " << residual << ")";
    throw NumericalError(os.str());
  }
  return level;
}

double allocated_power(const SpectralEigs& eigs, double level) {
  const auto w = spectral_weights(eigs);
  return power_at(eigs.values, w, level);
}

double waterfill_level(const SpectralEigs& eigs, double power) {
  if (!(eigs.min_value() > 0.0)) throw ModelInvalidError("waterfilling needs positive eigenvalues");
  const auto w = spectral_weights(eigs);
  return waterfill_weighted(eigs.values, w, power, eigs.pn);
}

double capacity_from_level(const SpectralEigs& eigs, double level) {
  const auto w = spectral_weights(eigs);
  return rate_at(eigs.values, w, level);
}

CapacityResult capacity_at_phase(const BlockCorrelation& bc, double power, const SpectralOptions& options) {
  const SpectralEigs eigs = spectral_eigs(bc, options);
  const auto w = spectral_weights(eigs);
  CapacityResult r;
  r.delta_bar = waterfill_weighted(eigs.values, w, power, eigs.pn);
  r.c_per_use = rate_at(eigs.values, w, r.delta_bar);
  r.c_bps = r.c_per_use / bc.ts;
  r.tau0 = bc.tau0;
  r.pn = bc.pn;
  return r;
}

CapacityResult memoryless_capacity(const BlockCorrelation& bc, double power) {
  const Eigen::VectorXd d = bc.at(0).diagonal();
  const std::vector<double> variances(d.data(), d.data() + d.size());
  if (*std::min_element(variances.begin(), variances.end()) <= 0.0) {
    throw ModelInvalidError("memoryless baseline needs positive variances");
  }
  return flat_capacity(bc, variances, power);
}

std::vector<double> phase_grid(double tpw, int n) {
  if (n < 1) throw ParseError("phase grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(j)] = tpw * j / n;
  return g;
}

CapacityResult capacity_max_phase(const PulseCorrelationModel& model, int p, const Epsilon& eps, double power,
                                  int n_tau0, const SpectralOptions& options) {
  if (n_tau0 < 2) throw ParseError("phase maximisation needs at least 2 grid points");
  const DtCorrelation base(model, SamplingSpec{p, eps, 0.0});
  const auto period = base.period();
  if (!period) throw PeriodMismatchError("phase maximisation needs a rational eps");
  const std::vector<double> grid = phase_grid(model.tpw, n_tau0);

  SpectralOptions inner = options;
  inner.exec = Exec::serial;
  std::vector<CapacityResult> results(grid.size());
  for_each_index(grid.size(), options.exec, [&](std::size_t j) {
    const BlockCorrelation bc = build_block_correlation(base.with_tau0(grid[j]), static_cast<int>(*period));
    results[j] = capacity_at_phase(bc, power, inner);
  });

  std::size_t best = 0;
  for (std::size_t j = 1; j < results.size(); ++j) {
    if (results[j].c_per_use > results[best].c_per_use) best = j;
  }
  return results[best];
}

std::vector<CapacityResult> cn_sequence(const PulseCorrelationModel& model, int p, const Epsilon& eps, double power,
                                        const CnSequenceOptions& options) {
  if (options.n_min < 1 || options.n_max < options.n_min) throw ParseError("cn_sequence needs 1 <= n_min <= n_max");
  const auto count = static_cast<std::size_t>(options.n_max - options.n_min + 1);
  std::vector<CapacityResult> out(count);

  SpectralOptions inner = options.spectral;
  inner.exec = Exec::serial;
  for_each_index(count, options.spectral.exec, [&](std::size_t idx) {
    const std::int64_t n = options.n_min + static_cast<std::int64_t>(idx);
    const Rational en = eps_n(eps, n);
    const Epsilon approx = Epsilon::rational(en.num, en.den);
    const int pn = static_cast<int>(p * n + en.num);

    CapacityResult r;
    if (options.maximize_phase) {
      r = capacity_max_phase(model, p, approx, power, options.n_tau0, inner);
      // the maximiser ran at the fundamental period; report the pn of this n
      r.pn = pn;
    } else {
      const DtCorrelation dt(model, SamplingSpec{p, approx, options.tau0});
      r = capacity_at_phase(build_block_correlation(dt, pn), power, inner);
    }
    r.n = n;
    r.eps_n = en;
    out[idx] = r;
  });
  return out;
}

double liminf_estimate(std::span<const double> values, std::size_t window) {
  if (window == 0 || values.empty()) throw ParseError("liminf estimate needs a non-empty window");
  if (window > values.size()) throw ParseError("liminf window exceeds the sequence length");
  return *std::min_element(values.end() - static_cast<std::ptrdiff_t>(window), values.end());
}

RatePoint decompose_ratio(double ratio, int denom) {
  if (denom < 1) throw ParseError("ratio denominator must be positive");
  const auto total = static_cast<std::int64_t>(std::llround(ratio * denom));
  RatePoint rp;
  rp.ratio = ratio;
  rp.p = static_cast<int>(total / denom);
  if (rp.p < 1) throw ParseError("ratio must be at least 1");
  const Rational frac = Rational{total % denom, denom}.reduced();
  rp.u = frac.num;
  rp.v = frac.den;
  return rp;
}

}  // namespace cyclocap
