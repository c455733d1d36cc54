// Acceptance gate: one PASS/FAIL line per criterion. The exit status reports
// whether every criterion was evaluated; the verdicts are in the lines.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cyclocap/capacity.hpp"
#include "cyclocap/cli.hpp"
#include "cyclocap/conditions.hpp"
#include "cyclocap/error.hpp"
#include "cyclocap/finite_block.hpp"

using namespace cyclocap;

namespace {

constexpr double kPi20 = std::numbers::pi / 20;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[x] ") << what << "; ";
  }
};

std::string f(double v, int prec = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string rel_text(double got, double want) { return f(100.0 * (got - want) / want, 2) + "%"; }

PulseCorrelationModel fast_decay(double tdc, double phi) {
  PulseCorrelationModel m;
  m.tdc = tdc;
  m.phi = phi;
  m.alpha = 1e7;
  return m;
}

BlockCorrelation sync_block(const PulseCorrelationModel& m, double ratio) {
  const RatePoint rp = decompose_ratio(ratio, 10);
  return build_block_correlation(DtCorrelation(m, SamplingSpec{rp.p, rp.eps(), 0.0}), static_cast<int>(rp.period()));
}

double sync_cap(const PulseCorrelationModel& m, double ratio) {
  return capacity_at_phase(sync_block(m, ratio), 10.0).c_per_use;
}

void anchor(Verdict& v, const std::string& name, double got, double want, double rel) {
  v.require(within(got, want, rel), name + " " + f(got) + " vs " + f(want, 3) + " (" + rel_text(got, want) + ")");
}

// ---------------------------------------------------------------------------

void criterion1(Verdict& v) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_c = 0.0, worst_l = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double p = std::pow(10.0, u(rng));
    const double s2 = std::pow(10.0, u(rng));
    const CapacityResult r = capacity_at_phase(white_block_correlation(1, s2), p, {.n_theta = 16});
    const double c = 0.5 * std::log2(1.0 + p / s2);
    worst_c = std::max(worst_c, std::abs(r.c_per_use - c) / c);
    worst_l = std::max(worst_l, std::abs(r.delta_bar - (p + s2)) / (p + s2));
  }
  v.require(worst_c <= 1e-9, "max rel err capacity " + sci(worst_c));
  v.require(worst_l <= 1e-9, "max rel err level " + sci(worst_l));
}

void criterion2(Verdict& v) {
  anchor(v, "r5 tdc.45", sync_cap(fast_decay(0.45, 0), 5.0), 1.356, 0.03);
  anchor(v, "r5 tdc.75", sync_cap(fast_decay(0.75, 0), 5.0), 1.170, 0.03);
  anchor(v, "r5.2 tdc.45", sync_cap(fast_decay(0.45, 0), 5.2), 1.302, 0.03);
  anchor(v, "r5.2 tdc.75", sync_cap(fast_decay(0.75, 0), 5.2), 1.039, 0.03);
}

void criterion3(Verdict& v) {
  anchor(v, "r5 phi=pi/20 tdc.45", sync_cap(fast_decay(0.45, kPi20), 5.0), 1.170, 0.03);
  anchor(v, "r5 phi=pi/20 tdc.75", sync_cap(fast_decay(0.75, kPi20), 5.0), 0.980, 0.03);
  for (auto [tdc, want] : {std::pair{0.45, 1.298}, std::pair{0.75, 1.015}}) {
    const double a = sync_cap(fast_decay(tdc, 0), 23.2);
    const double b = sync_cap(fast_decay(tdc, kPi20), 23.2);
    const std::string tag = tdc < 0.5 ? "r23.2 tdc.45" : "r23.2 tdc.75";
    v.require(within(b, a, 0.005), tag + " phi agreement " + rel_text(b, a));
    anchor(v, tag + " phi=0", a, want, 0.03);
    anchor(v, tag + " phi=pi/20", b, want, 0.03);
  }
}

void criterion4(Verdict& v) {
  for (auto [tdc, want] : {std::pair{0.45, 0.648}, std::pair{0.75, 0.503}}) {
    double est[2];
    for (int k = 0; k < 2; ++k) {
      PulseCorrelationModel m;
      m.tdc = tdc;
      m.phi = k == 0 ? 0.0 : kPi20;
      const auto seq = cn_sequence(m, 2, Epsilon::parse("pi/7"), 10.0, {.n_min = 1, .n_max = 130});
      std::vector<double> mbps;
      for (const auto& r : seq) mbps.push_back(r.c_bps * 1e-6);
      est[k] = liminf_estimate(mbps, 30);
      const std::string tag = std::string(tdc < 0.5 ? "tdc.45" : "tdc.75") + (k == 0 ? " phi=0" : " phi=pi/20");
      anchor(v, tag + " liminf Mbps", est[k], want, 0.05);
    }
    v.require(within(est[1], est[0], 0.005),
              std::string(tdc < 0.5 ? "tdc.45" : "tdc.75") + " phi agreement " + rel_text(est[1], est[0]));
  }
}

void criterion5(Verdict& v) {
  {
    const BlockCorrelation bc = sync_block(fast_decay(0.75, kPi20), 8.5);
    const double mem = capacity_at_phase(bc, 10.0).c_per_use;
    const double less = memoryless_capacity(bc, 10.0).c_per_use;
    v.require(within(less, mem, 0.005), "r8.5 memory/memoryless agree " + f(mem) + "/" + f(less));
    anchor(v, "r8.5 memory", mem, 1.014, 0.03);
  }
  const BlockCorrelation bc = sync_block(fast_decay(0.75, kPi20), 29.0);
  const double mem = capacity_at_phase(bc, 10.0).c_per_use;
  const double less = memoryless_capacity(bc, 10.0).c_per_use;
  v.require(mem > less, "r29 memory > memoryless " + f(mem) + " > " + f(less));
  anchor(v, "r29 tdc.75 memoryless", less, 1.285, 0.03);
  anchor(v, "r29 tdc.75 memory", mem, 1.310, 0.03);
}

void criterion5_diagnostic(std::ostream& os) {
  const BlockCorrelation bc = sync_block(fast_decay(0.45, kPi20), 29.0);
  const double mem = capacity_at_phase(bc, 10.0).c_per_use;
  const double less = memoryless_capacity(bc, 10.0).c_per_use;
  os << "  diagnostic: r29 at tdc=0.45: memory " << f(mem) << " (" << rel_text(mem, 1.310) << " vs 1.310), "
            << "memoryless " << f(less) << " (" << rel_text(less, 1.285) << " vs 1.285)\n";
}

void criterion6(Verdict& v) {
  struct Case {
    std::string name;
    PulseCorrelationModel model;
    int p;
    Epsilon eps;
  };
  PulseCorrelationModel baseline_45;
  baseline_45.tdc = 0.45;
  const std::vector<Case> cases{
      {"baseline tdc.75 n=7", PulseCorrelationModel{}, 2, Epsilon::rational(3, 7)},
      {"baseline tdc.45 n=7", baseline_45, 2, Epsilon::rational(3, 7)},
      {"fast r5 tdc.45", fast_decay(0.45, 0), 5, Epsilon::rational(0, 1)},
      {"fast r5.2 tdc.75", fast_decay(0.75, 0), 5, Epsilon::rational(1, 5)},
      {"fast r8.5 tdc.75 phi=pi/20", fast_decay(0.75, kPi20), 8, Epsilon::rational(1, 2)},
  };
  for (const auto& c : cases) {
    const DtCorrelation dt(c.model, SamplingSpec{c.p, c.eps, 0.0});
    const int pn = static_cast<int>(*dt.period());
    const double cn = capacity_at_phase(build_block_correlation(dt, pn), 10.0).c_per_use;
    const double cp = cover_pombra_capacity(block_noise_covariance(dt, 64 * pn, 0.0), 10.0);
    const double gap = std::abs(cn - cp) / cn;
    v.require(gap <= 0.01, c.name + " gap " + f(100 * gap, 3) + "%");
  }
}

void criterion7(Verdict& v) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst_identity = 0.0;
  bool var_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 4 + rep % 61;
    Eigen::MatrixXd a(k, k), b(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        a(i, j) = g(rng);
        b(i, j) = g(rng);
      }
    const BlockNoiseCov w{k, a * a.transpose() / k + 0.05 * Eigen::MatrixXd::Identity(k, k), 0.0};
    const Eigen::MatrixXd x = b * b.transpose() / k;
    worst_identity = std::max(worst_identity, eigen_sum_identity_check(w, x) / (1e-8 * k));
    var_ok = var_ok && info_density_moments(w, x).analytic_var <= 3.0 / k;
  }
  v.require(worst_identity <= 1.0, "identity residual / (1e-8 k) max " + f(worst_identity, 6));
  v.require(var_ok, "analytic var <= 3/k on random pairs");
  const DtCorrelation dt(PulseCorrelationModel{}, SamplingSpec{2, Epsilon::parse("pi/7"), 0.0});
  for (int k : {16, 64, 256}) {
    const BlockNoiseCov noise = block_noise_covariance(dt, k, 0.0);
    const FiniteBlockSolution sol = waterfill_block(noise, 10.0);
    const InfoDensityStats s = info_density_stats(noise, sol.input_cov, 100000, 42);
    const double z = std::abs(s.mc_mean - s.analytic_mean) / std::sqrt(s.analytic_var / 100000.0);
    v.require(z <= 4.0, "k=" + std::to_string(k) + " mc z " + f(z, 2));
    v.require(s.analytic_var <= 3.0 / k, "k=" + std::to_string(k) + " var " + f(s.analytic_var, 6) + " <= 3/k");
  }
}

void criterion8(Verdict& v) {
  const PulseCorrelationModel baseline;
  const ConditionReport r = check_conditions(baseline, SamplingSpec{2, Epsilon::parse("pi/7"), 0.0}, 10.0);
  const double analytic = 5.0 + 15.0 * std::exp(-5.0 / 3.0);
  v.require(!r.eq8.ok, "baseline eq8 fails (margin " + f(r.eq8.value) + ")");
  v.require(r.sdd.ok, "baseline SDD passes (margin " + f(r.sdd.value) + ")");
  v.require(r.power.ok && r.power.threshold < 10.0 && within(r.power.threshold, 7.83, 0.005),
            "baseline power threshold " + f(r.power.threshold) + " (analytic " + f(analytic) + ") < 10");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int implied = 0, violations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    PulseCorrelationModel m;
    m.tdc = 0.05 + 0.7 * u01(rng);
    m.phi = u01(rng);
    m.amp = 6 * u01(rng);
    m.alpha = std::pow(10.0, 5.5 + 2.0 * u01(rng));
    m.lambda_m = (1 + 5 * u01(rng)) * 1e-6;
    const int p = 1 + static_cast<int>(6 * u01(rng));
    const ConditionReport c = check_conditions(m, SamplingSpec{p, Epsilon::real(0.99 * u01(rng)), 0.0}, 10.0, 0, 32);
    if (c.eq8.ok) {
      ++implied;
      if (!c.sdd.ok) ++violations;
    }
  }
  v.require(violations == 0, "eq8 => sdd on 100 random configs (" + std::to_string(implied) + " with eq8 ok, " +
                                 std::to_string(violations) + " violations)");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion9(Verdict& v) {
  // spectral positivity and theta symmetry over the experiment configurations
  struct Cfg {
    PulseCorrelationModel m;
    int p;
    Epsilon eps;
  };
  std::vector<Cfg> cfgs;
  for (double tdc : {0.45, 0.75}) {
    for (double phi : {0.0, kPi20}) {
      PulseCorrelationModel m;
      m.tdc = tdc;
      m.phi = phi;
      for (std::int64_t n : {1, 2, 7, 25, 60}) {
        const Rational en = eps_n(Epsilon::parse("pi/7"), n);
        cfgs.push_back({m, 2, Epsilon::rational(en.num, en.den)});
      }
      for (double ratio : {5.0, 5.2, 8.5, 23.2, 29.0}) {
        const RatePoint rp = decompose_ratio(ratio, 10);
        cfgs.push_back({fast_decay(tdc, phi), rp.p, rp.eps()});
      }
    }
  }
  bool positive = true, symmetric = true, parseval = true;
  for (const auto& c : cfgs) {
    const DtCorrelation dt(c.m, SamplingSpec{c.p, c.eps, 0.0});
    const BlockCorrelation bc = build_block_correlation(dt, static_cast<int>(*dt.period()));
    const SpectralEigs e = spectral_eigs(bc, {.n_theta = 1024});
    positive = positive && e.min_value() > 0.0;
    for (std::size_t j : {std::size_t{1}, std::size_t{300}, std::size_t{777}}) {
      const auto neg = hermitian_eigenvalues(spectral_matrix(bc, -e.theta[j]));
      const auto pos = hermitian_eigenvalues(spectral_matrix(bc, e.theta[j]));
      for (std::size_t k = 0; k < neg.size(); ++k) symmetric = symmetric && std::abs(neg[k] - pos[k]) <= 1e-12 * e.max_value();
    }
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(bc.pn, bc.pn);
    for (std::size_t j = 0; j < e.theta.size(); ++j) {
      acc += 0.5 * e.weights[j] * (spectral_matrix(bc, e.theta[j]) + spectral_matrix(bc, -e.theta[j]));
    }
    parseval = parseval && (acc.real() - bc.at(0)).cwiseAbs().maxCoeff() <= 1e-6 * bc.at(0).cwiseAbs().maxCoeff();
  }
  v.require(positive, "spectral positivity on " + std::to_string(cfgs.size()) + " configs");
  v.require(symmetric, "theta symmetry");
  v.require(parseval, "Parseval at N=1024");

  const double tpw = 5e-6, ts = tpw / (2 + std::numbers::pi / 7);
  bool guard = true;
  for (int j = 0; j < 1000; ++j) {
    const double tau = tpw * j / 1000;
    const int k = 1 + j % 97;
    const double d = guard_delay(tau, k, 3, ts, tpw);
    const double end = std::fmod(tau + (k + 3) * ts + d, tpw);
    const double dist = std::min(std::abs(end - tau), tpw - std::abs(end - tau));
    guard = guard && d >= 0.0 && d < tpw && dist <= 1e-12 * tpw;
  }
  v.require(guard, "guard delay returns to tau_opt");

  const auto dir = std::filesystem::temp_directory_path() / "cyclocap_acceptance";
  std::filesystem::create_directories(dir);
  std::ostringstream sink;
  bool same = true;
  for (const char* cmd : {"finite-block", "cn-sweep"}) {
    std::string runs[2];
    for (int i = 0; i < 2; ++i) {
      const std::string out = (dir / (std::string(cmd) + std::to_string(i) + ".csv")).string();
      std::vector<std::string> args = std::string(cmd) == "finite-block"
                                          ? std::vector<std::string>{"finite-block", "--k", "64", "--samples", "20000",
                                                                     "--seed", "42", "--out", out}
                                          : std::vector<std::string>{"--n-theta", "128", "cn-sweep", "--n-max", "20",
                                                                     "--out", out};
      same = same && cli::run(args, sink, sink) == 0;
      runs[i] = slurp(out);
    }
    same = same && !runs[0].empty() && runs[0] == runs[1];
  }
  std::filesystem::remove_all(dir);
  v.require(same, "byte-identical CSVs under a fixed seed");
}

// Writes each line to stdout and to the optional report file.
struct Tee {
  std::ofstream file;
  void line(const std::string& text) {
    std::cout << text << std::endl;
    if (file) file << text << '\n' << std::flush;
  }
};

}  // namespace

int main(int argc, char** argv) {
  Tee tee;
  if (argc > 1) tee.file.open(argv[1]);
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"white-noise closed forms", criterion1},
      {"synchronous anchor values", criterion2},
      {"phase effect at ratios 5 and 23.2", criterion3},
      {"liminf anchors of the convergence experiment", criterion4},
      {"memory/memoryless crossover", criterion5},
      {"finite-block oracle equivalence", criterion6},
      {"information-density identities", criterion7},
      {"condition suite", criterion8},
      {"structural invariants", criterion9},
  };
  const double limits[] = {1, 60, 120, 600, 120, 300, 180, 120, 180};
  int passed = 0;
  bool evaluated = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
      evaluated = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs < limits[i], "runtime " + f(secs, 1) + " s < " + f(limits[i], 0) + " s");
    passed += v.pass ? 1 : 0;
    tee.line("criterion " + std::to_string(i + 1) + ": " + (v.pass ? "PASS" : "FAIL") + "  " + criteria[i].first +
             "  | " + v.detail.str());
    if (i == 4) {
      std::ostringstream diag;
      criterion5_diagnostic(diag);
      tee.line(diag.str().substr(0, diag.str().size() - 1));
    }
  }
  tee.line("acceptance: " + std::to_string(passed) + "/" + std::to_string(criteria.size()) + " criteria pass");
  return evaluated ? 0 : 1;
}
