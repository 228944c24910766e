#include "wentzell/config.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "': " + j.dump());
  }
}

double finite_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' is not finite");
  return v;
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return j.get<int>();
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("dense kernel must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("dense kernel rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = finite_number(row[static_cast<std::size_t>(c)], "dense");
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

CoefficientSet coefficients_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("'coefficients' must be an object");
  reject_unknown(j, {"a", "b", "c", "c_prime", "eta"}, "coefficients");
  CoefficientSet cs;
  if (j.contains("a")) cs.a = ScalarFunction::from_json(j["a"]);
  if (j.contains("b")) cs.b = ScalarFunction::from_json(j["b"]);
  if (j.contains("c")) cs.c = ScalarFunction::from_json(j["c"]);
  if (j.contains("c_prime")) cs.c_prime = ScalarFunction::from_json(j["c_prime"]);
  if (j.contains("eta")) {
    cs.eta = finite_number(j["eta"], "eta");
    if (cs.eta <= 0.0) throw ConfigError("'eta' must be positive");
  }
  if (!cs.c.is_zero() && !j.contains("c_prime")) {
    throw ConfigError("a nonzero 'c' requires 'c_prime'");
  }
  return cs;
}

CouplingDescriptor coupling_from_json(const json& j) {
  if (j.is_string()) return CouplingDescriptor::parse_preset(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("'coupling' must be a preset string or an object");
  if (j.contains("preset")) {
    reject_unknown(j, {"preset", "tau"}, "coupling");
    const auto name = get_as<std::string>(j["preset"], "preset");
    if (j.contains("tau")) {
      if (name != "example-8.1") throw ConfigError("'tau' only applies to preset example-8.1");
      return CouplingDescriptor::example_8_1(finite_number(j["tau"], "tau"));
    }
    return CouplingDescriptor::parse_preset(name);
  }
  reject_unknown(j, {"blocks", "label"}, "coupling");
  if (!j.contains("blocks") || !j["blocks"].is_object()) {
    throw ConfigError("'coupling' needs 'preset' or 'blocks'");
  }
  const auto& blocks = j["blocks"];
  reject_unknown(blocks, {"B11", "B12", "B21", "B22"}, "coupling.blocks");
  CouplingDescriptor d;
  if (blocks.contains("B11")) d.b11 = block_from_json(blocks["B11"]);
  if (blocks.contains("B12")) d.b12 = block_from_json(blocks["B12"]);
  if (blocks.contains("B21")) d.b21 = block_from_json(blocks["B21"]);
  if (blocks.contains("B22")) d.b22 = block_from_json(blocks["B22"]);
  for (const auto* off : {&d.b12, &d.b21}) {
    if (std::holds_alternative<MultiplicationKernel>(*off)) {
      throw ConfigError("multiplication kernels are only allowed for B11 and B22");
    }
  }
  d.label = j.contains("label") ? get_as<std::string>(j["label"], "label") : std::string("custom");
  return d;
}

}  // namespace

BlockDescriptor block_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return ZeroKernel{};
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError("block must be \"zero\" or an object with one of zero/dense/separable/multiplication");
  }
  const auto it = j.begin();
  const std::string form = it.key();
  const json& body = it.value();
  if (form == "zero") return ZeroKernel{};
  if (form == "dense") return DenseKernel{matrix_from_json(body)};
  if (form == "separable") {
    if (!body.is_object()) throw ConfigError("separable kernel must be an object");
    reject_unknown(body, {"left", "right"}, "separable kernel");
    if (!body.contains("left") || !body.contains("right")) {
      throw ConfigError("separable kernel needs 'left' and 'right'");
    }
    return SeparableKernel{ScalarFunction::from_json(body["left"]), ScalarFunction::from_json(body["right"])};
  }
  if (form == "multiplication" || form == "diagonal") return MultiplicationKernel{ScalarFunction::from_json(body)};
  throw ConfigError("unknown block form '" + form + "'");
}

json block_to_json(const BlockDescriptor& b) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ZeroKernel>) {
          return "zero";
        } else if constexpr (std::is_same_v<K, DenseKernel>) {
          return {{"dense", matrix_to_json(k.values)}};
        } else if constexpr (std::is_same_v<K, SeparableKernel>) {
          return {{"separable", {{"left", k.left.to_json()}, {"right", k.right.to_json()}}}};
        } else {
          return {{"multiplication", k.m.to_json()}};
        }
      },
      b);
}

Vec InitialDatum::materialize(const Grid1D& grid) const {
  const int size = grid.size();
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "ones") return Vec::Ones(size);
    if (name == "e0") return Vec::Unit(size, 0);
    if (name == "e_last") return Vec::Unit(size, size - 1);
    throw ConfigError("unknown initial datum '" + name + "'");
  }
  if (spec.is_array()) {
    if (static_cast<int>(spec.size()) != size) {
      throw ConfigError("u0 has " + std::to_string(spec.size()) + " values, grid has " + std::to_string(size));
    }
    Vec u(size);
    for (int i = 0; i < size; ++i) u[i] = finite_number(spec[static_cast<std::size_t>(i)], "u0");
    return u;
  }
  if (spec.is_object() && spec.contains("basis")) {
    reject_unknown(spec, {"basis"}, "u0");
    const int k = integer(spec["basis"], "u0.basis");
    if (k < 0 || k >= size) throw ConfigError("u0.basis out of range");
    return Vec::Unit(size, k);
  }
  const auto f = ScalarFunction::from_json(spec);
  return grid.sample([&](double x) { return f(x); });
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"schema_version", "n", "coefficients", "coupling", "tau", "t_final", "samples", "horizon", "tol",
                  "rescale", "u0"},
                 "configuration");
  RunConfig rc;
  if (j.contains("schema_version")) {
    const int v = integer(j["schema_version"], "schema_version");
    if (v != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(v));
  }
  if (j.contains("n")) rc.n = integer(j["n"], "n");
  if (j.contains("coefficients")) rc.coefficients = coefficients_from_json(j["coefficients"]);
  if (j.contains("tau")) rc.tau = finite_number(j["tau"], "tau");
  if (j.contains("coupling")) {
    rc.coupling = coupling_from_json(j["coupling"]);
    rc.coupling_given = true;
    if (rc.coupling.example_tau) {
      if (rc.tau && *rc.tau != *rc.coupling.example_tau) {
        throw ConfigError("'tau' disagrees with the tau of the coupling preset");
      }
      rc.tau = rc.coupling.example_tau;
    } else if (rc.tau) {
      throw ConfigError("'tau' is only meaningful with the example-8.1 coupling");
    }
  }
  if (j.contains("t_final")) rc.t_final = finite_number(j["t_final"], "t_final");
  if (j.contains("samples")) rc.samples = integer(j["samples"], "samples");
  if (j.contains("horizon")) rc.horizon = finite_number(j["horizon"], "horizon");
  if (j.contains("tol")) rc.tol = finite_number(j["tol"], "tol");
  if (j.contains("rescale")) {
    if (!j["rescale"].is_boolean()) throw ConfigError("'rescale' must be a boolean");
    rc.rescale = j["rescale"].get<bool>();
  }
  if (j.contains("u0")) rc.u0.spec = j["u0"];
  rc.validate();
  rc.u0.materialize(rc.grid());
  return rc;
}

RunConfig RunConfig::from_stream(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::from_file(const std::string& path) {
  if (path == "-") return from_stream(std::cin);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return from_stream(in);
}

void RunConfig::validate() const {
  if (n < 2) throw ConfigError("'n' must be at least 2");
  if (n > 4000) throw ConfigError("'n' above 4000 is not supported by the dense solvers");
  if (samples < 2) throw ConfigError("'samples' must be at least 2");
  if (!(t_final > 0.0)) throw ConfigError("'t_final' must be positive");
  if (!(tol > 0.0)) throw ConfigError("'tol' must be positive");
  if (horizon < 0.0) throw ConfigError("'horizon' must be nonnegative");
}

CouplingDescriptor RunConfig::effective_coupling() const {
  if (coupling_given) return coupling;
  if (tau) return CouplingDescriptor::example_8_1(*tau);
  return CouplingDescriptor::zero();
}

DiscreteGenerator RunConfig::generator() const {
  const Grid1D g = grid();
  return assemble_generator(g, coefficients, build_kernel_blocks(g, effective_coupling()));
}

json RunConfig::to_json() const {
  const auto cpl = effective_coupling();
  json out = {{"schema_version", kSchemaVersion},
              {"n", n},
              {"coefficients",
               {{"a", coefficients.a.to_json()},
                {"b", coefficients.b.to_json()},
                {"c", coefficients.c.to_json()},
                {"c_prime", coefficients.c_prime.to_json()},
                {"eta", coefficients.eta}}},
              {"coupling",
               {{"label", cpl.label},
                {"blocks",
                 {{"B11", block_to_json(cpl.b11)},
                  {"B12", block_to_json(cpl.b12)},
                  {"B21", block_to_json(cpl.b21)},
                  {"B22", block_to_json(cpl.b22)}}}}},
              {"t_final", t_final},
              {"samples", samples},
              {"horizon", horizon},
              {"tol", tol},
              {"rescale", rescale},
              {"u0", u0.spec}};
  if (tau) out["tau"] = *tau;
  return out;
}

}  // namespace wentzell
