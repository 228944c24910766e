#pragma once

// Algebraic certification of positivity, (sub-)Markov behavior, domination
// and irreducibility on the assembled discrete model.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/assembly.hpp"

namespace wentzell {

inline constexpr double kSignTol = 1e-10;

struct Witness {
  std::string block;
  int row = -1;
  int col = -1;
  double value = 0.0;
};

struct PmpResult {
  bool holds = true;
  /// Most negative off-diagonal entry (row = col = -1 if the matrix is 1x1 or empty).
  Witness worst;
};

/// Positive minimum principle for a matrix: every off-diagonal entry >= -tol.
PmpResult pmp_check(const Mat& B, double tol = kSignTol, const std::string& name = "B");

struct PositivityResult {
  bool positive = true;
  std::vector<Witness> witnesses;
};

/// B12, B21 entrywise nonnegative and B11, B22 satisfy the minimum principle.
PositivityResult certify_positive(const NonlocalCoupling& coupling, double tol = kSignTol);

struct OrderCertificate {
  bool positive = false;
  bool sub_markov = false;
  bool markov = false;
  std::vector<Witness> witnesses;
  /// c'(x_i) + (B11 1)_i + (B12 1)_i at every node.
  Vec interior_slack;
  /// B21 1 + B22 1 - c.nu at the two endpoints, with c.nu = (-c(0), c(1)).
  Eigen::Vector2d boundary_slack = Eigen::Vector2d::Zero();
  double tolerance = kSignTol;

  nlohmann::json to_json() const;
};

OrderCertificate certify_markov(const CoefficientSet& coeffs, const NonlocalCoupling& coupling, const Grid1D& grid,
                                double tol = kSignTol);

/// Sufficient condition for 0 <= exp(tG1) <= exp(tG2): G1 Metzler and G2 - G1 >= -tol.
bool check_domination(const Mat& G1, const Mat& G2, double tol = kSignTol);

/// Every entry of exp(tG) exceeds tol.  Throws PreconditionError if G is not Metzler.
bool irreducibility_probe(const Mat& G, double t, double tol = kSignTol);

/// Coupling of a Markov semigroup dominating the sub-Markov one: the slack of
/// the interior inequality is added to B12 (split over both endpoints) and the
/// slack of the boundary inequality to B21 (spread by the interior weights).
/// Throws PreconditionError unless the certificate is sub-Markov.
NonlocalCoupling markov_majorant(const CoefficientSet& coeffs, const NonlocalCoupling& coupling,
                                 const Grid1D& grid, double tol = kSignTol);

}  // namespace wentzell
