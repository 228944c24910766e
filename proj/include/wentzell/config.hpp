#pragma once

// JSON run configuration shared by the command-line front end and tests.

#include <istream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wentzell/assembly.hpp"

namespace wentzell {

inline constexpr int kSchemaVersion = 1;

/// Initial datum for evolution: "ones", "e0", "e_last", {"basis": k}, an
/// explicit array of nodal values, or a closed-form function.
struct InitialDatum {
  nlohmann::json spec = "ones";
  Vec materialize(const Grid1D& grid) const;
};

struct RunConfig {
  int n = 100;
  CoefficientSet coefficients;
  CouplingDescriptor coupling;
  bool coupling_given = false;
  /// tau of an "example-8.1" coupling, when that is what the config describes.
  std::optional<double> tau;
  double t_final = 10.0;
  int samples = 201;
  double horizon = 0.0;  // <= 0: automatic
  double tol = 1e-8;
  bool rescale = false;  // evolve exp(-s t) exp(tG) with s the spectral bound
  InitialDatum u0;

  /// Parses and validates; unknown keys and malformed values throw ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_stream(std::istream& in);
  static RunConfig from_file(const std::string& path);  // "-" reads stdin

  /// Checks ranges (n >= 2, samples >= 2, t_final > 0, tol > 0).  ConfigError.
  void validate() const;
  /// Coupling used by the commands: the explicit descriptor, else
  /// example-8.1(tau) when a tau is set, else zero.
  CouplingDescriptor effective_coupling() const;
  Grid1D grid() const { return Grid1D(n); }
  DiscreteGenerator generator() const;

  nlohmann::json to_json() const;
};

/// Block descriptor from {"zero": {}} | "zero" | {"dense": [[...]]} |
/// {"separable": {"left": f, "right": g}} | {"multiplication": f}.
BlockDescriptor block_from_json(const nlohmann::json& j);
nlohmann::json block_to_json(const BlockDescriptor& b);

}  // namespace wentzell
