#pragma once

#include <span>
#include <vector>

#include "cyclocap/noise_model.hpp"
#include "cyclocap/parallel.hpp"

namespace cyclocap {

/// Uniform grids used for the extrema over t and lambda.
struct GridSizes {
  int t_points = 2048;
  int lambda_points = 2048;
};

struct MarginCheck {
  double value = 0.0;
  double threshold = 0.0;
  bool ok = false;
};

/// min_t { c(t,0) - 2 tau_m max_{tpw/(p+1) <= |lam| <= lambda_m} |c(t,lam)| };
/// ok when the margin is positive.
MarginCheck check_eq8(const PulseCorrelationModel& model, int p, const GridSizes& grids = {});

/// max_t { c(t,0) + tau_m max_{|lam| >= tpw/(p+1)} |c(t,lam)| }; ok when power
/// exceeds it. `value` holds the power, `threshold` the bound.
MarginCheck check_power(const PulseCorrelationModel& model, int p, double power, const GridSizes& grids = {});

/// Smallest row margin |diag| - sum |offdiag| of the k x k noise covariance
/// over the given sampling phases; ok when positive.
MarginCheck check_sdd(const DtCorrelation& dt, int k, std::span<const double> tau0_grid, Exec exec = Exec::parallel);

/// Block length at which SDD row margins have stabilised.
inline int default_sdd_length(int tau_m) { return 4 * tau_m + 8; }

struct ConditionReport {
  MarginCheck eq8;
  MarginCheck power;
  MarginCheck sdd;
  int sdd_k = 0;
  int n_tau0 = 0;
  GridSizes grids;

  /// Convergence conditions hold: SDD and the power bound.
  [[nodiscard]] bool ok() const { return sdd.ok && power.ok; }
};

/// Runs all three checks; SDD uses k (0 picks default_sdd_length) over a
/// uniform grid of n_tau0 phases.
ConditionReport check_conditions(const PulseCorrelationModel& model, const SamplingSpec& spec, double power,
                                 int k = 0, int n_tau0 = 64, const GridSizes& grids = {},
                                 Exec exec = Exec::parallel);

}  // namespace cyclocap
