#pragma once

#include <cstdint>
#include <optional>

#include "cyclocap/rational.hpp"

namespace cyclocap {

/// Periodic trapezoidal pulse with period 1: linear rise over [0, trf], flat
/// top until tdc + trf, linear fall until tdc + 2*trf, zero afterwards.
/// Throws InvalidShapeError unless trf > 0 and tdc + 2*trf <= 1.
double pulse_value(double t, double tdc, double trf);

/// Continuous-time WSCS correlation: variance base_var + amp * pulse(t/tpw - phi)
/// decaying as exp(-alpha * lag) up to the correlation length lambda_m.
/// All times are in seconds.
struct PulseCorrelationModel {
  double tpw = 5e-6;
  double tdc = 0.75;
  double trf = 0.01;
  double phi = 0.0;
  double base_var = 1.0;
  double amp = 4.0;
  double alpha = 1e6;
  double lambda_m = 4e-6;

  void validate() const;

  /// c(t, 0) with the time given as a fraction of the period.
  [[nodiscard]] double variance_at_fraction(double frac) const;
  [[nodiscard]] double variance(double t) const { return variance_at_fraction(t / tpw); }
};

/// c(t, lam). For lam < 0 this is c(t + lam, -lam).
double ct_corr(const PulseCorrelationModel& model, double t, double lam);

/// Memory of the sampled process in samples: ceil((p + 1) * lambda_m / tpw).
int tau_m(const PulseCorrelationModel& model, int p);

/// floor(n * eps) / n, exact and unreduced.
Rational eps_n(const Epsilon& eps, std::int64_t n);

/// Integer part p, fractional part eps and sampling phase tau0 (seconds) of
/// the ratio tpw / Ts = p + eps.
struct SamplingSpec {
  int p = 2;
  Epsilon eps;
  double tau0 = 0.0;

  [[nodiscard]] double ratio() const { return p + eps.value(); }
  [[nodiscard]] double ts(double tpw) const;
  /// Period p*v + u of the sampled correlation when eps = u/v (reduced).
  [[nodiscard]] std::optional<std::int64_t> period() const;
};

/// Discrete-time correlation c[i, delta] of the process sampled at
/// i*Ts + tau0. Pure and cheap to copy.
class DtCorrelation {
 public:
  DtCorrelation(const PulseCorrelationModel& model, const SamplingSpec& spec);

  [[nodiscard]] double operator()(std::int64_t i, std::int64_t delta) const;

  [[nodiscard]] int tau_m() const { return tau_m_; }
  [[nodiscard]] std::optional<std::int64_t> period() const { return period_; }
  [[nodiscard]] double ts() const { return ts_; }
  [[nodiscard]] const PulseCorrelationModel& model() const { return model_; }
  [[nodiscard]] const SamplingSpec& spec() const { return spec_; }

  /// Same process observed from a different sampling phase.
  [[nodiscard]] DtCorrelation with_tau0(double tau0) const;

  /// (i*Ts + tau0) / tpw, reduced modulo the period for exact rational eps so
  /// that c[i + P, delta] == c[i, delta] holds bitwise.
  [[nodiscard]] double time_fraction(std::int64_t i) const;

 private:
  PulseCorrelationModel model_;
  SamplingSpec spec_;
  double ts_ = 0.0;
  int tau_m_ = 0;
  std::optional<std::int64_t> period_;
  // reduced u/v when eps is rational
  std::int64_t u_ = 0;
  std::int64_t v_ = 1;
};

inline double sample_corr(const DtCorrelation& dt, std::int64_t i, std::int64_t delta) { return dt(i, delta); }

}  // namespace cyclocap
