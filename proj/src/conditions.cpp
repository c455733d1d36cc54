#include "cyclocap/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyclocap/capacity.hpp"
#include "cyclocap/error.hpp"

namespace cyclocap {

namespace {

void check_grids(const GridSizes& g) {
  if (g.t_points < 2 || g.lambda_points < 2) throw ParseError("condition grids need at least 2 points");
}

// max over lam in [lo, lambda_m] of max(|c(t,lam)|, |c(t,-lam)|)
double tail_max(const PulseCorrelationModel& model, double t, double lo, int points) {
  if (lo > model.lambda_m) return 0.0;
  double best = 0.0;
  for (int j = 0; j < points; ++j) {
    const double lam = lo + (model.lambda_m - lo) * j / (points - 1);
    best = std::max({best, std::abs(ct_corr(model, t, lam)), std::abs(ct_corr(model, t, -lam))});
  }
  return best;
}

template <class Combine>
std::vector<double> over_t(const PulseCorrelationModel& model, int p, const GridSizes& g, Combine combine) {
  check_grids(g);
  model.validate();
  if (p < 1) throw ParseError("p must be >= 1");
  const double lo = model.tpw / (p + 1);
  const int tm = tau_m(model, p);
  std::vector<double> out(static_cast<std::size_t>(g.t_points));
  for (int i = 0; i < g.t_points; ++i) {
    const double t = model.tpw * i / (g.t_points - 1);
    out[static_cast<std::size_t>(i)] = combine(ct_corr(model, t, 0.0), tm * tail_max(model, t, lo, g.lambda_points));
  }
  return out;
}

}  // namespace

MarginCheck check_eq8(const PulseCorrelationModel& model, int p, const GridSizes& grids) {
  const auto vals = over_t(model, p, grids, [](double c0, double tail) { return c0 - 2.0 * tail; });
  MarginCheck out;
  out.value = *std::min_element(vals.begin(), vals.end());
  out.ok = out.value > 0.0;
  return out;
}

MarginCheck check_power(const PulseCorrelationModel& model, int p, double power, const GridSizes& grids) {
  const auto vals = over_t(model, p, grids, [](double c0, double tail) { return c0 + tail; });
  MarginCheck out;
  out.value = power;
  out.threshold = *std::max_element(vals.begin(), vals.end());
  out.ok = power > out.threshold;
  return out;
}

MarginCheck check_sdd(const DtCorrelation& dt, int k, std::span<const double> tau0_grid, Exec exec) {
  if (k < 1) throw ParseError("SDD block length must be >= 1");
  if (tau0_grid.empty()) throw ParseError("SDD needs at least one sampling phase");
  std::vector<double> margins(tau0_grid.size());
  for_each_index(tau0_grid.size(), exec, [&](std::size_t j) {
    const DtCorrelation at = dt.with_tau0(tau0_grid[j]);
    double worst = std::numeric_limits<double>::infinity();
    for (int u = 0; u < k; ++u) {
      double off = 0.0;
      for (int v = std::max(0, u - at.tau_m()); v <= std::min(k - 1, u + at.tau_m()); ++v) {
        if (v != u) off += std::abs(at(v, u - v));
      }
      worst = std::min(worst, std::abs(at(u, 0)) - off);
    }
    margins[j] = worst;
  });
  MarginCheck out;
  out.value = *std::min_element(margins.begin(), margins.end());
  out.ok = out.value > 0.0;
  return out;
}

ConditionReport check_conditions(const PulseCorrelationModel& model, const SamplingSpec& spec, double power, int k,
                                 int n_tau0, const GridSizes& grids, Exec exec) {
  ConditionReport r;
  r.grids = grids;
  r.n_tau0 = n_tau0;
  r.eq8 = check_eq8(model, spec.p, grids);
  r.power = check_power(model, spec.p, power, grids);
  const DtCorrelation dt(model, spec);
  r.sdd_k = k > 0 ? k : default_sdd_length(dt.tau_m());
  const auto phases = phase_grid(model.tpw, n_tau0);
  r.sdd = check_sdd(dt, r.sdd_k, phases, exec);
  return r;
}

}  // namespace cyclocap
