#pragma once

// Time evolution t -> exp(tG) u and empirical probes of its order behavior.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/assembly.hpp"

namespace wentzell {

struct EvolutionTrace {
  Vec times;
  std::vector<Vec> states;
  Vec min_component;
  Vec mass;  // <u(t), 1>_M
  Vec sup_norm;
  double shift = 0.0;  // states are exp(-shift t) exp(tG) u0

  /// Columns t, min_component, mass, sup_norm and optionally u0 .. un.
  std::string to_csv(bool full_states = false) const;
  nlohmann::json summary() const;
};

/// Uniform samples t_k = k t_final / (samples - 1).  The states are obtained by
/// repeated application of exp(dt (G - shift I)).
EvolutionTrace evolve(const DiscreteGenerator& gen, const Vec& u0, double t_final, int samples, double shift = 0.0);

struct PositivityProbe {
  bool positive = true;
  std::optional<double> time;  // first time with a violation
  int row = -1;
  int col = -1;
  double value = 0.0;  // most negative entry at that time
};

/// All entries of exp(tG) >= -tol at each sampled time.
PositivityProbe empirical_positivity(const Mat& G, const std::vector<double>& times, double tol = 1e-8);
PositivityProbe empirical_positivity(const DiscreteGenerator& gen, const std::vector<double>& times,
                                     double tol = 1e-8);

enum class TailBehavior { StrictlyPositive, ConvergesToSignChanging, Oscillating, ConvergesToNonStrict };
std::string to_string(TailBehavior b);

struct EventualPositivityEmpirical {
  bool holds_up_to_horizon = false;
  std::optional<double> t0;
  double delta = 0.0;
  double horizon = 0.0;
  int probes = 0;
  double shift = 0.0;
  TailBehavior behavior = TailBehavior::ConvergesToNonStrict;
  /// Smallest min_component / sup_norm over probes at the final time.
  double final_ratio = 0.0;
  nlohmann::json to_json() const;
};

struct EventualProbeOptions {
  double horizon = 0.0;  // <= 0: 20 / gap when the bound is dominant, else 50
  int samples = 401;
  int probes = 0;  // <= 0: all basis vectors for n + 1 <= 401, else 64 random
  std::uint64_t seed = 20240101;
};

/// Evolves exp(-s t) exp(tG) on nonnegative probes (s = spectral bound).  A
/// probe passes when its min/sup ratio is positive on a tail that starts no
/// later than horizon / 2; delta is half the smallest ratio on the tails.
EventualPositivityEmpirical empirical_eventual_positivity(const DiscreteGenerator& gen,
                                                          const EventualProbeOptions& options = {});

enum class AsymptoticKind { ConvergesToProjection, DecaysExponentially, GrowsExponentially };
std::string to_string(AsymptoticKind k);

struct AsymptoticResult {
  AsymptoticKind kind = AsymptoticKind::ConvergesToProjection;
  /// Fitted exponential rate: decay rate of ||exp(tG) - P|| for convergence,
  /// -slope for decay, slope for growth (always reported as a positive number).
  double rate = 0.0;
  /// The rate predicted by the spectrum: gap, -s or s.
  double predicted_rate = 0.0;
  bool rate_matches = false;  // within 10 %
  double fit_residual = 0.0;  // RMS deviation of the log-linear fit
  double spectral_bound = 0.0;
  double gap = 0.0;
  bool positive_generator = false;  // false: classification outside its intended scope
  CVec profile;                     // right eigenvector v
  CVec density;                     // left eigenvector psi, <v, psi>_M = 1
  nlohmann::json to_json() const;
};

/// Classifies by the sign of the spectral bound and verifies the predicted rate
/// with a log-linear fit.  Throws NumericalError if the fit is ambiguous.
AsymptoticResult asymptotic_classify(const DiscreteGenerator& gen, double tol = 1e-8);

}  // namespace wentzell
