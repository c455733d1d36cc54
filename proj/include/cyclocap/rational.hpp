#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cyclocap {

/// Exact ratio of two integers. Not reduced unless `reduced()` is called;
/// eps_n keeps the floor(n*eps)/n form so its denominator stays n.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  [[nodiscard]] Rational reduced() const;
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
  }
};

/// Sampling mismatch: either an exact rational u/v (synchronous sampling)
/// or a real number treated as irrational (asynchronous sampling).
class Epsilon {
 public:
  Epsilon() = default;
  static Epsilon real(double value, std::string text = {});
  static Epsilon rational(std::int64_t u, std::int64_t v);

  /// Accepts "u/v", an integer, a decimal literal, or a product/quotient of
  /// `pi` with integers ("pi/7", "3*pi/20"). Throws ParseError otherwise.
  static Epsilon parse(std::string_view text);

  [[nodiscard]] double value() const { return value_; }
  [[nodiscard]] const std::optional<Rational>& exact() const { return exact_; }
  [[nodiscard]] bool is_rational() const { return exact_.has_value(); }
  [[nodiscard]] const std::string& text() const { return text_; }

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_ = Rational{0, 1};
  std::string text_ = "0";
};

/// Evaluates the same grammar as Epsilon::parse without range checks
/// (used for phi, which may be "pi/20").
double parse_real_expression(std::string_view text);

}  // namespace cyclocap
