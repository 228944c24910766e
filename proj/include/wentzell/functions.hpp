#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wentzell {

/// Real function on [0, 1] from the closed-form vocabulary of the
/// configuration format: constant(v), poly([c0..ck]), trig(amp, freq, phase)
/// meaning amp * sin(freq * x + phase), or a table of equispaced samples
/// interpolated linearly.
class ScalarFunction {
 public:
  ScalarFunction();  // zero

  static ScalarFunction constant(double value);
  static ScalarFunction poly(std::vector<double> coefficients);
  static ScalarFunction trig(double amp, double freq, double phase);
  static ScalarFunction table(std::vector<double> samples);
  /// Arbitrary callable; not serializable.
  static ScalarFunction custom(std::function<double(double)> f, std::string label);

  /// Parse {"constant": v} | {"poly": [...]} | {"trig": {...}} | {"table": [...]}.
  static ScalarFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double operator()(double x) const { return eval_(x); }
  const std::string& description() const { return description_; }

  /// Exactly zero by construction (constant 0).
  bool is_zero() const { return zero_; }

 private:
  std::function<double(double)> eval_;
  std::string description_;
  nlohmann::json json_;
  bool zero_ = false;
};

}  // namespace wentzell
