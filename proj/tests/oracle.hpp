#pragma once
// Test-side reference implementations written directly from the model
// definitions, sharing no code with the library, plus frozen values from an
// independent NumPy implementation (trapezoid grid of 1024 points on [0, pi]).

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Params {
  double tpw = 5e-6;
  double tdc = 0.75;
  double trf = 0.01;
  double phi = 0.0;
  double base = 1.0;
  double amp = 4.0;
  double alpha = 1e6;
  double lam = 4e-6;
};

inline double pulse(double t, double tdc, double trf) {
  t -= std::floor(t);
  if (t <= trf) return t / trf;
  if (t < tdc + trf) return 1.0;
  if (t <= tdc + 2 * trf) return 1.0 - (t - tdc - trf) / trf;
  return 0.0;
}

inline double corr(const Params& m, double t, double l) {
  if (l < 0) return corr(m, t + l, -l);
  if (l > m.lam) return 0.0;
  return std::exp(-m.alpha * l) * (m.base + m.amp * pulse(t / m.tpw - m.phi, m.tdc, m.trf));
}

inline int memory(const Params& m, int p) { return static_cast<int>(std::ceil((p + 1) * m.lam / m.tpw)); }

/// c[i, d] evaluated literally at t = i Ts + tau0, lag d Ts.
inline double sample(const Params& m, int p, double eps, double tau0, long i, long d) {
  if (std::abs(d) > memory(m, p)) return 0.0;
  const double ts = m.tpw / (p + eps);
  return corr(m, static_cast<double>(i) * ts + tau0, static_cast<double>(d) * ts);
}

/// C[tau] blocks, index tau + L, with L = max(1, ceil(tau_m / pn)).
inline std::vector<Eigen::MatrixXd> blocks(const Params& m, int p, double eps, double tau0, int pn) {
  const int tm = memory(m, p);
  const int lags = std::max(1, (tm + pn - 1) / pn);
  std::vector<Eigen::MatrixXd> out;
  for (int tau = -lags; tau <= lags; ++tau) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(pn, pn);
    for (int r = 0; r < pn; ++r) {
      for (int c = 0; c < pn; ++c) a(r, c) = sample(m, p, eps, tau0, c, static_cast<long>(tau) * pn + r - c);
    }
    out.push_back(a);
  }
  return out;
}

/// Eigenvalues of a Hermitian matrix through the real embedding
/// [[Re, -Im], [Im, Re]], whose spectrum is each eigenvalue twice.
inline std::vector<double> hermitian_eigs(const Eigen::MatrixXcd& h) {
  const auto n = h.rows();
  Eigen::MatrixXd big(2 * n, 2 * n);
  big << h.real(), -h.imag(), h.imag(), h.real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big, Eigen::EigenvaluesOnly);
  std::vector<double> v;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) v.push_back(es.eigenvalues()(i));
  return v;
}

/// Capacity in bits per use by plain bisection over the trapezoid grid.
inline double capacity(const std::vector<Eigen::MatrixXd>& c, double power, int n_theta = 1024,
                       bool memoryless = false) {
  const int pn = static_cast<int>(c[0].rows());
  const int lags = static_cast<int>(c.size() / 2);
  std::vector<std::vector<double>> mu(static_cast<std::size_t>(n_theta));
  std::vector<double> w(static_cast<std::size_t>(n_theta), 1.0 / (n_theta - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  for (int j = 0; j < n_theta; ++j) {
    const double th = M_PI * j / (n_theta - 1);
    if (memoryless) {
      mu[j].assign(c[lags].diagonal().data(), c[lags].diagonal().data() + pn);
      continue;
    }
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(pn, pn);
    for (int t = -lags; t <= lags; ++t) s += c[t + lags].cast<std::complex<double>>() * std::exp(std::complex<double>(0, -th * t));
    mu[j] = hermitian_eigs(s);
  }
  double lo = 1e300, hi = 0;
  for (const auto& v : mu) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  hi += lo + 2 * power * pn;
  auto pw = [&](double d) {
    double s = 0;
    for (int j = 0; j < n_theta; ++j)
      for (double x : mu[j]) s += w[j] * std::max(d - x, 0.0);
    return s / pn;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pw(mid) < power ? lo : hi) = mid;
  }
  const double d = 0.5 * (lo + hi);
  double s = 0;
  for (int j = 0; j < n_theta; ++j)
    for (double x : mu[j]) s += w[j] * std::max(std::log2(d / x), 0.0);
  return 0.5 * s / pn;
}

// Frozen reference values (alpha = 1e7/s, P = 10, tau0 = 0, phi shifts the pulse).
namespace frozen {
inline constexpr double kRatio5Tdc45Phi0 = 1.3632902978;
inline constexpr double kRatio5Tdc75Phi0 = 1.1755021218;
inline constexpr double kRatio5Tdc45PhiPi20 = 1.1755021218;
inline constexpr double kRatio5Tdc75PhiPi20 = 0.9851382768;
inline constexpr double kRatio52Tdc45 = 1.3081162495;
inline constexpr double kRatio52Tdc75 = 1.0444764029;
inline constexpr double kRatio232Tdc45Phi0 = 1.3161117120;
inline constexpr double kRatio232Tdc75Phi0 = 1.0320810933;
inline constexpr double kRatio232Tdc45PhiPi20 = 1.3158048051;
inline constexpr double kRatio232Tdc75PhiPi20 = 1.0313292772;
inline constexpr double kRatio85Mem = 1.0189136662;
inline constexpr double kRatio85Memless = 1.0189059471;
inline constexpr double kRatio29Tdc75Mem = 1.0508907974;
inline constexpr double kRatio29Tdc75Memless = 1.0247206482;
inline constexpr double kRatio29Tdc45Mem = 1.3167933778;
inline constexpr double kRatio29Tdc45Memless = 1.2916116247;
// alpha = 1e6/s, p = 2, tdc = 0.75, phi = 0
inline constexpr double kBaselineN7 = 1.0549724863;  // eps 3/7, pn 17
inline constexpr double kBaselineN1 = 1.2826191605;  // eps 0, pn 2
}  // namespace frozen

}  // namespace oracle
