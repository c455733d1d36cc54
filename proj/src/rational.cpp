#include "cyclocap/rational.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "cyclocap/error.hpp"

namespace cyclocap {

namespace {

struct ParsedNumber {
  double value = 0.0;
  std::optional<Rational> exact;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::int64_t> parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

ParsedNumber parse_pi_expression(std::string_view s, std::string_view original) {
  // tokens separated by '*' or '/'; exactly one token is "pi"
  std::vector<std::string_view> tokens;
  std::vector<char> ops;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' || s[i] == '/') {
      tokens.push_back(trim(s.substr(start, i - start)));
      ops.push_back(s[i]);
      start = i + 1;
    }
  }
  tokens.push_back(trim(s.substr(start)));

  int pi_count = 0;
  double value = 1.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    double factor = 0.0;
    if (tokens[t] == "pi") {
      ++pi_count;
      factor = std::numbers::pi;
    } else {
      const auto n = parse_integer(tokens[t]);
      if (!n || *n <= 0) throw ParseError("bad token in pi expression: '" + std::string(original) + "'");
      factor = static_cast<double>(*n);
    }
    if (t == 0) {
      value = factor;
    } else if (ops[t - 1] == '*') {
      value *= factor;
    } else {
      value /= factor;
    }
  }
  if (pi_count != 1) throw ParseError("expression must contain pi exactly once: '" + std::string(original) + "'");
  return {value, std::nullopt};
}

ParsedNumber parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty numeric value");

  if (s.find("pi") != std::string_view::npos) return parse_pi_expression(s, text);

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto u = parse_integer(s.substr(0, slash));
    const auto v = parse_integer(s.substr(slash + 1));
    if (!u || !v) throw ParseError("bad rational '" + std::string(text) + "'");
    if (*v <= 0) throw ParseError("rational denominator must be positive: '" + std::string(text) + "'");
    return {static_cast<double>(*u) / static_cast<double>(*v), Rational{*u, *v}};
  }

  if (const auto n = parse_integer(s)) return {static_cast<double>(*n), Rational{*n, 1}};

  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return {v, std::nullopt};
}

}  // namespace

Rational Rational::reduced() const {
  if (num == 0) return {0, 1};
  const std::int64_t g = std::gcd(num, den);
  Rational r{num / g, den / g};
  if (r.den < 0) r = {-r.num, -r.den};
  return r;
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Epsilon Epsilon::real(double value, std::string text) {
  if (!(value >= 0.0 && value < 1.0)) throw ParseError("eps must lie in [0, 1)");
  Epsilon e;
  e.value_ = value;
  e.exact_.reset();
  if (text.empty()) {
    std::ostringstream os;
    os << std::setprecision(17) << value;
    text = os.str();
  }
  e.text_ = std::move(text);
  return e;
}

Epsilon Epsilon::rational(std::int64_t u, std::int64_t v) {
  if (v <= 0 || u < 0 || u >= v) throw ParseError("rational eps needs 0 <= u < v");
  Epsilon e;
  e.exact_ = Rational{u, v};
  e.value_ = e.exact_->value();
  e.text_ = e.exact_->str();
  return e;
}

Epsilon Epsilon::parse(std::string_view text) {
  const ParsedNumber n = parse_number(text);
  if (n.exact) {
    if (n.exact->num == 0) return rational(0, 1);
    Epsilon e = rational(n.exact->num, n.exact->den);
    e.text_ = std::string(trim(text));
    return e;
  }
  return real(n.value, std::string(trim(text)));
}

double parse_real_expression(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '-') return -parse_number(s.substr(1)).value;
  return parse_number(s).value;
}

}  // namespace cyclocap
