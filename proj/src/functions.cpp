#include "wentzell/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

ScalarFunction::ScalarFunction()
    : eval_([](double) { return 0.0; }), description_("constant(0)"), json_({{"constant", 0.0}}), zero_(true) {}

ScalarFunction ScalarFunction::constant(double value) {
  if (!std::isfinite(value)) throw ConfigError("constant function value is not finite");
  ScalarFunction f;
  f.eval_ = [value](double) { return value; };
  std::ostringstream os;
  os << "constant(" << value << ")";
  f.description_ = os.str();
  f.json_ = {{"constant", value}};
  f.zero_ = (value == 0.0);
  return f;
}

ScalarFunction ScalarFunction::poly(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ConfigError("poly needs at least one coefficient");
  ScalarFunction f;
  f.json_ = {{"poly", coefficients}};
  bool zero = true;
  for (double c : coefficients) zero = zero && c == 0.0;
  f.zero_ = zero;
  f.description_ = "poly(" + f.json_["poly"].dump() + ")";
  f.eval_ = [c = std::move(coefficients)](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  return f;
}

ScalarFunction ScalarFunction::trig(double amp, double freq, double phase) {
  ScalarFunction f;
  f.eval_ = [=](double x) { return amp * std::sin(freq * x + phase); };
  f.json_ = {{"trig", {{"amp", amp}, {"freq", freq}, {"phase", phase}}}};
  std::ostringstream os;
  os << "trig(" << amp << ", " << freq << ", " << phase << ")";
  f.description_ = os.str();
  f.zero_ = (amp == 0.0);
  return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> samples) {
  if (samples.size() < 2) throw ConfigError("table needs at least two samples");
  ScalarFunction f;
  f.json_ = {{"table", samples}};
  f.description_ = "table(" + std::to_string(samples.size()) + " samples)";
  bool zero = true;
  for (double s : samples) zero = zero && s == 0.0;
  f.zero_ = zero;
  f.eval_ = [s = std::move(samples)](double x) {
    const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(s.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), s.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * s[i] + frac * s[i + 1];
  };
  return f;
}

ScalarFunction ScalarFunction::custom(std::function<double(double)> fn, std::string label) {
  ScalarFunction f;
  f.eval_ = std::move(fn);
  f.description_ = label;
  f.json_ = {{"custom", std::move(label)}};
  return f;
}

ScalarFunction ScalarFunction::from_json(const nlohmann::json& j) {
  if (j.is_number()) return constant(j.get<double>());
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError("function must be an object with exactly one of constant/poly/trig/table: " + j.dump());
  }
  const auto it = j.begin();
  const std::string key = it.key();
  const nlohmann::json& value = it.value();
  try {
    if (key == "constant") return constant(value.get<double>());
    if (key == "poly") return poly(value.get<std::vector<double>>());
    if (key == "table") return table(value.get<std::vector<double>>());
    if (key == "trig") {
      for (const auto& [k, _] : value.items()) {
        if (k != "amp" && k != "freq" && k != "phase") throw ConfigError("unknown trig key '" + k + "'");
      }
      return trig(value.value("amp", 1.0), value.value("freq", 1.0), value.value("phase", 0.0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad function '" + key + "': " + e.what());
  }
  throw ConfigError("unknown function form '" + key + "'");
}

nlohmann::json ScalarFunction::to_json() const { return json_; }

}  // namespace wentzell
