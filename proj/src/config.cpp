#include "cyclocap/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

#include "cyclocap/error.hpp"

namespace cyclocap {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double as_real(std::string_view key, std::string_view value) {
  try {
    return parse_real_expression(value);
  } catch (const ParseError& e) {
    throw ParseError(std::string(key) + ": " + e.what());
  }
}

int as_positive_int(std::string_view key, std::string_view value) {
  const double v = as_real(key, value);
  if (v < 1.0 || v != static_cast<double>(static_cast<int>(v))) {
    throw ParseError(std::string(key) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

// Shortest decimal text t with parse(t) * from_unit == v, so that a rendered
// config parses back to identical SI values.
// Shortest decimal text t with from_config(t) == v, so that a rendered config
// parses back to identical SI values. Exponents only for extreme magnitudes.
template <class To, class From>
std::string fmt_units(double v, To to_config, From from_config) {
  const double shown = to_config(v);
  std::string text;
  for (int digits = 1; digits <= 17; ++digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << shown;
    text = os.str();
    const bool exponent = text.find('e') != std::string::npos;
    if (exponent && digits < 17 && std::abs(shown) >= 1e-4 && std::abs(shown) < 1e15) continue;
    if (from_config(std::stod(text)) == v) return text;
  }
  return text;
}

std::string fmt(double v) {
  return fmt_units(v, [](double x) { return x; }, [](double x) { return x; });
}

// microseconds in the file, seconds inside
std::string fmt_us(double v) {
  return fmt_units(v, [](double x) { return x * 1e6; }, [](double x) { return x / 1e6; });
}

// per microsecond in the file, per second inside
std::string fmt_per_us(double v) {
  return fmt_units(v, [](double x) { return x / 1e6; }, [](double x) { return x * 1e6; });
}

bool phi_text_matches(const RunConfig& c) {
  try {
    return parse_real_expression(c.phi_text) == c.model.phi;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);
  if (value.empty()) throw ParseError("missing value for key '" + key + "'");

  auto& m = config.model;
  if (key == "tpw_us") {
    m.tpw = as_real(key, value) / 1e6;
  } else if (key == "tdc") {
    m.tdc = as_real(key, value);
  } else if (key == "trf") {
    m.trf = as_real(key, value);
  } else if (key == "phi") {
    m.phi = as_real(key, value);
    config.phi_text = std::string(value);
  } else if (key == "base_var") {
    m.base_var = as_real(key, value);
  } else if (key == "amp") {
    m.amp = as_real(key, value);
  } else if (key == "alpha_per_us") {
    m.alpha = as_real(key, value) * 1e6;
  } else if (key == "lambda_m_us") {
    m.lambda_m = as_real(key, value) / 1e6;
  } else if (key == "p") {
    config.p = as_positive_int(key, value);
  } else if (key == "eps") {
    try {
      config.eps = Epsilon::parse(value);
    } catch (const ParseError& e) {
      throw ParseError("eps: " + std::string(e.what()));
    }
  } else if (key == "power") {
    config.power = as_real(key, value);
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
  config.explicit_keys.insert(key);
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void validate(const RunConfig& config) {
  try {
    config.model.validate();
  } catch (const InvalidShapeError& e) {
    throw ParseError(std::string("invalid model: ") + e.what());
  }
  if (config.p < 1) throw ParseError("p must be >= 1");
  if (!(config.power > 0.0)) throw ParseError("power must be positive");
}

std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  os << "tpw_us=" << fmt_us(c.model.tpw) << '\n'
     << "tdc=" << fmt(c.model.tdc) << '\n'
     << "trf=" << fmt(c.model.trf) << '\n'
     << "phi=" << (phi_text_matches(c) ? c.phi_text : fmt(c.model.phi)) << '\n'
     << "base_var=" << fmt(c.model.base_var) << '\n'
     << "amp=" << fmt(c.model.amp) << '\n'
     << "alpha_per_us=" << fmt_per_us(c.model.alpha) << '\n'
     << "lambda_m_us=" << fmt_us(c.model.lambda_m) << '\n'
     << "p=" << c.p << '\n'
     << "eps=" << c.eps.text() << '\n'
     << "power=" << fmt(c.power) << '\n';
  return os.str();
}

}  // namespace cyclocap
