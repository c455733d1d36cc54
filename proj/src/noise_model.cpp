#include "cyclocap/noise_model.hpp"

#include <cmath>
#include <string>

#include "cyclocap/error.hpp"

namespace cyclocap {

double pulse_value(double t, double tdc, double trf) {
  if (!(trf > 0.0) || !(tdc >= 0.0) || tdc + 2.0 * trf > 1.0) {
    throw InvalidShapeError("pulse needs trf > 0, tdc >= 0 and tdc + 2*trf <= 1");
  }
  const double x = t - std::floor(t);
  if (x <= trf) return x / trf;
  if (x < tdc + trf) return 1.0;
  if (x <= tdc + 2.0 * trf) return 1.0 - (x - tdc - trf) / trf;
  return 0.0;
}

void PulseCorrelationModel::validate() const {
  pulse_value(0.0, tdc, trf);
  if (!(tpw > 0.0)) throw InvalidShapeError("tpw must be positive");
  if (!(base_var > 0.0)) throw InvalidShapeError("base_var must be positive");
  if (!(amp >= 0.0)) throw InvalidShapeError("amp must be nonnegative");
  if (!(lambda_m > 0.0)) throw InvalidShapeError("lambda_m must be positive");
  if (!(alpha >= 0.0)) throw InvalidShapeError("alpha must be nonnegative");
  if (!std::isfinite(phi)) throw InvalidShapeError("phi must be finite");
}

double PulseCorrelationModel::variance_at_fraction(double frac) const {
  return base_var + amp * pulse_value(frac - phi, tdc, trf);
}

double ct_corr(const PulseCorrelationModel& model, double t, double lam) {
  if (lam < 0.0) return ct_corr(model, t + lam, -lam);
  if (lam > model.lambda_m) return 0.0;
  return std::exp(-model.alpha * lam) * model.variance(t);
}

int tau_m(const PulseCorrelationModel& model, int p) {
  return static_cast<int>(std::ceil((p + 1) * model.lambda_m / model.tpw));
}

Rational eps_n(const Epsilon& eps, std::int64_t n) {
  if (n < 1) throw ParseError("eps_n needs n >= 1");
  if (const auto& r = eps.exact()) {
    const Rational red = r->reduced();
    return {(n * red.num) / red.den, n};
  }
  return {static_cast<std::int64_t>(std::floor(static_cast<double>(n) * eps.value())), n};
}

double SamplingSpec::ts(double tpw) const {
  if (const auto& r = eps.exact()) {
    const Rational red = r->reduced();
    return tpw * static_cast<double>(red.den) / static_cast<double>(p * red.den + red.num);
  }
  return tpw / (p + eps.value());
}

std::optional<std::int64_t> SamplingSpec::period() const {
  if (const auto& r = eps.exact()) {
    const Rational red = r->reduced();
    return p * red.den + red.num;
  }
  return std::nullopt;
}

DtCorrelation::DtCorrelation(const PulseCorrelationModel& model, const SamplingSpec& spec)
    : model_(model), spec_(spec) {
  model_.validate();
  if (spec_.p < 1) throw ParseError("p must be a positive integer");
  ts_ = spec_.ts(model_.tpw);
  tau_m_ = cyclocap::tau_m(model_, spec_.p);
  period_ = spec_.period();
  if (const auto& r = spec_.eps.exact()) {
    const Rational red = r->reduced();
    u_ = red.num;
    v_ = red.den;
  }
}

DtCorrelation DtCorrelation::with_tau0(double tau0) const {
  DtCorrelation copy = *this;
  copy.spec_.tau0 = tau0;
  return copy;
}

double DtCorrelation::time_fraction(std::int64_t i) const {
  const double phase0 = spec_.tau0 / model_.tpw;
  if (period_) {
    // i*Ts/tpw = i*v / (p*v + u); reduce the numerator modulo the period
    const std::int64_t P = *period_;
    std::int64_t r = (i % P) * v_ % P;
    if (r < 0) r += P;
    return static_cast<double>(r) / static_cast<double>(P) + phase0;
  }
  return static_cast<double>(i) / spec_.ratio() + phase0;
}

double DtCorrelation::operator()(std::int64_t i, std::int64_t delta) const {
  if (delta > tau_m_ || delta < -tau_m_) return 0.0;
  if (delta < 0) {
    i += delta;
    delta = -delta;
  }
  const double lag = static_cast<double>(delta) * ts_;
  if (lag > model_.lambda_m) return 0.0;
  return std::exp(-model_.alpha * lag) * model_.variance_at_fraction(time_fraction(i));
}

}  // namespace cyclocap
