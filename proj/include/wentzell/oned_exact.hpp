#pragma once

// Closed-form analysis of the one-dimensional example: Laplacian on (0, 1)
// with the boundary coupling B22 = tau [[0, 1], [-1, 0]].  Eigenvalues
// lambda = w^2 = -mu^2 solve det M_w = 0, equivalently
//   cot(mu) = (tau^2 - mu^2 + mu^4) / (2 mu^3)
// for real negative lambda.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/types.hpp"

namespace wentzell {

/// det M_w = 2(-tau^2 - w^2 - w^4) sinh(w) - 4 w^3 cosh(w).
cplx det_Mw(cplx w, double tau);
/// d/dw det M_w.
cplx det_Mw_derivative(cplx w, double tau);
/// det M_w / w as an entire function of lambda = w^2; its zeros are exactly
/// the eigenvalues (including lambda = 0 when tau = 0).
cplx characteristic_function(cplx lambda, double tau);

/// cot(mu) - (tau^2 - mu^2 + mu^4) / (2 mu^3).  DomainError for mu <= 0 or at
/// a pole of cot.
double char_residual_mu(double mu, double tau);

/// f(mu) = mu sqrt(2 mu cot(mu) + 1 - mu^2) on (0, sqrt(-lambda2_0)].
double f_of_mu(double mu);

struct Thresholds {
  double mu_p = 0.0;
  double tau_p = 0.0;
  double mu_s = 0.0;
  double tau_s = 0.0;
  double lambda2_0 = 0.0;
  double lambda3_0 = 0.0;
  double tau_star = 0.0;
  double residuals = 0.0;

  bool ordering_holds() const;
  nlohmann::json to_json() const;
};

/// Computed once; thread-safe.
const Thresholds& compute_thresholds();

/// The box [lambda2_0 - tau*, tau*] x [-tau*, tau*] enclosing the two
/// leading eigenvalues for |tau| < tau*.
Box leading_box();

struct RealEigenvalue {
  double lambda = 0.0;
  double mu = 0.0;
  bool in_window = true;
};

/// Real eigenvalues, descending: the window roots of f(mu) = |tau| (two below
/// tau_s, one at tau_s, none above) followed by deeper roots with
/// sqrt(-lambda2_0) < mu <= max_mu.  Requires |tau| < tau*.
std::vector<RealEigenvalue> real_eigenvalues(double tau, double max_mu = 10.0);

/// Leading conjugate pair (positive imaginary part first) for tau_s < |tau| < tau*.
std::pair<cplx, cplx> complex_leading_pair(double tau);

struct WindingCount {
  int count = 0;
  double winding = 0.0;  // unrounded
};

/// Number of eigenvalues (zeros of the characteristic function) inside the box.
WindingCount argument_principle_count(double tau, const Box& box, int initial_points = 256);

enum class ZeroKind { None, Boundary, Interior };
std::string to_string(ZeroKind k);

struct Eigenfunction {
  Vec x;
  Vec values;
  std::optional<double> zero;
  ZeroKind kind = ZeroKind::None;
};

/// v+ (tau > 0) or v- (tau < 0) for a window root mu with f(mu) = |tau|.
/// Throws ConsistencyError if that relation fails by more than 1e-8.
Eigenfunction eigenfunction(double tau, double mu, int samples = 101);

enum class Regime {
  PositiveSemigroup,
  EventuallyStronglyPositive,
  BoundaryDegenerate,
  DominantSignChanging,
  JordanDefect,
  ComplexDominantPair,
  OutOfValidatedRange
};
std::string to_string(Regime r);

inline constexpr double kRegimeTol = 1e-9;

struct RegimeClassification {
  double tau = 0.0;
  Regime regime = Regime::OutOfValidatedRange;
  std::vector<cplx> leading_eigenvalues;
  std::optional<double> leading_mu;
  std::optional<double> eigenfunction_zero;
  ZeroKind zero_kind = ZeroKind::None;
  nlohmann::json to_json() const;
};

RegimeClassification classify(double tau);

}  // namespace wentzell
