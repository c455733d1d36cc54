#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>

#include "cyclocap/noise_model.hpp"

namespace cyclocap {

/// Resolved experiment configuration. Defaults reproduce the t_dc = 0.75,
/// phi = 0 setup of the convergence experiment.
struct RunConfig {
  PulseCorrelationModel model;
  int p = 2;
  Epsilon eps = Epsilon::parse("pi/7");
  double power = 10.0;
  std::string phi_text = "0";

  /// Keys given explicitly by a file or override (used for per-command defaults).
  std::set<std::string> explicit_keys;

  [[nodiscard]] SamplingSpec sampling(double tau0 = 0.0) const { return {p, eps, tau0}; }
  [[nodiscard]] bool is_explicit(const std::string& key) const { return explicit_keys.count(key) != 0; }
};

/// Sets one key. Times are in microseconds (tpw_us, lambda_m_us) and the
/// decay rate is per microsecond (alpha_per_us). Unknown keys throw ParseError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// `key=value` per line, `#` starts a comment, blank lines ignored.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Throws ParseError / InvalidShapeError on an inconsistent configuration.
void validate(const RunConfig& config);

/// Canonical `key=value` rendering; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

}  // namespace cyclocap
