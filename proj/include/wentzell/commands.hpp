#pragma once

// Subcommands of the wrlab front end.  Each cmd_* returns structured data;
// run_command renders it and dispatch maps failures to exit codes.

#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/config.hpp"
#include "wentzell/oned_exact.hpp"
#include "wentzell/semigroup.hpp"

namespace wentzell {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitInconsistent = 3 };

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

nlohmann::json cmd_thresholds();
nlohmann::json cmd_classify(double tau);

struct SweepRow {
  double tau = 0.0;
  Regime regime = Regime::OutOfValidatedRange;
  cplx lambda1{NAN, NAN};
  cplx lambda2{NAN, NAN};
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by tau
  /// lambda1 strictly decreasing in |tau| over the sampled 0 < |tau| < tau_s;
  /// empty when fewer than two such samples exist.
  std::optional<bool> lambda1_monotone;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Requires steps >= 2 and tau_min < tau_max.
SweepResult cmd_sweep(double tau_min, double tau_max, int steps);

nlohmann::json cmd_spectrum(const RunConfig& cfg);

struct EvolveResult {
  EvolutionTrace trace;
  nlohmann::json summary;
  std::string to_svg() const;
};
EvolveResult cmd_evolve(const RunConfig& cfg);

struct CheckResult {
  nlohmann::json report;
  bool consistent = true;
};
/// Algebraic certificates and spectral verdicts next to empirical probes of
/// exp(tG); `consistent` is false when any pair disagrees.
CheckResult cmd_check(const RunConfig& cfg);

struct EigenfunctionResult {
  double tau = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  Eigenfunction function;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};
/// Leading real eigenfunction of the one-dimensional example; DomainError
/// when |tau| > tau_s (no real window root).
EigenfunctionResult cmd_eigenfunction(double tau, int samples);

struct ProjRankResult {
  nlohmann::json report;
  bool consistent = true;
};
/// Contour projection over the leading box, compared with the analytic
/// argument-principle count when the coupling is example-8.1.
ProjRankResult cmd_proj_rank(const RunConfig& cfg);

struct CommandOptions {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<double> tau;
  std::optional<int> n;
  std::optional<double> t_final;
  std::optional<int> samples;
  std::optional<double> tol;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  std::optional<int> steps;
  std::string out;     // empty: stdout
  std::string format;  // empty: command default
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"thresholds", "classify", "sweep",         "spectrum",
                                                 "evolve",     "check",    "eigenfunction", "proj-rank"};
  return names;
}

/// Configuration with command-line overrides applied.
RunConfig resolve_config(const CommandOptions& opts);

struct CommandOutput {
  std::string text;
  int exit_code = kExitOk;
};
/// Runs a command and renders it in the requested format.  Throws on failure.
CommandOutput run_command(const CommandOptions& opts);

/// run_command + output writing + exception mapping.  Diagnostics go to err.
int dispatch(const CommandOptions& opts, std::ostream& err);

}  // namespace wentzell
