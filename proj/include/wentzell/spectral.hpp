#pragma once

// Dense spectral analysis of the discrete generator.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/assembly.hpp"

namespace wentzell {

struct SpectrumOptions {
  /// Number of leading eigenvalues for which vectors are computed; extended to
  /// complete clusters and conjugate pairs.
  int count = 6;
  /// Clustering radius; <= 0 selects 10 * sqrt(eps * ||G||_inf).
  double cluster_tol = 0.0;
  std::uint64_t seed = 0x5eed;
};

struct SpectrumReport {
  /// All eigenvalues, sorted by descending real part, positive imaginary part
  /// first within a conjugate pair.
  CVec eigenvalues;
  /// Columns k < retained(): right eigenvectors with ||v||_M = 1.
  CMat right_vectors;
  /// M-adjoint eigenvectors (G* psi = conj(lambda) psi), scaled so that
  /// <v, psi>_M = 1 unless the pair is numerically defective (then ||psi||_M = 1).
  CMat left_vectors;
  /// |<v, psi>_M| / (||v||_M ||psi||_M) per retained pair.
  Vec biorthogonality;
  Vec right_residuals;
  Vec left_residuals;
  /// Cluster index per eigenvalue (0 = the cluster containing the spectral bound).
  std::vector<int> cluster;
  Vec mass;  // lumped mass used for the M-inner product
  double spectral_bound = 0.0;
  double gap = 0.0;
  double cluster_tol = 0.0;
  double g_norm = 0.0;
  bool dominant = false;
  bool symmetric = false;

  int retained() const { return static_cast<int>(right_vectors.cols()); }
  int size() const { return static_cast<int>(eigenvalues.size()); }
  nlohmann::json to_json(int max_eigenvalues = 20) const;
};

/// Full eigen-decomposition of G with vectors for the leading eigenvalues.
/// Throws NumericalError when the eigensolver fails or a residual exceeds
/// 1e-8 * ||G||.
SpectrumReport spectrum(const DiscreteGenerator& gen, const SpectrumOptions& options = {});
SpectrumReport spectrum(const Mat& G, const Vec& mass, const SpectrumOptions& options = {});

enum class Simplicity { AlgebraicallySimple, GeometricallySimpleOnly, Degenerate };
std::string to_string(Simplicity s);

struct DominanceResult {
  bool dominant = false;
  Simplicity simple = Simplicity::Degenerate;
  int top_cluster_size = 0;
  double biorthogonality = 0.0;
  /// "", "jordan" or "semisimple" for degenerate clusters; "complex" when the
  /// bound is attained by a non-real pair.
  std::string details;
};

DominanceResult classify_dominance(const SpectrumReport& report);

enum class QuadratureRule { GaussLegendre, Trapezoid };

struct ContourProjection {
  int rank = 0;
  CMat projection;
  Vec singular_values;
  double idempotency_residual = 0.0;
  double trace = 0.0;
  int enclosed_eigenvalues = 0;
};

/// P = (1 / 2 pi i) \oint (z - G)^{-1} dz over the boundary of the box,
/// `quad_points` nodes per edge.  Throws ContourError when an eigenvalue lies
/// within dist_tol of the contour.
ContourProjection spectral_projection_contour(const DiscreteGenerator& gen, const Box& box, int quad_points = 64,
                                              QuadratureRule rule = QuadratureRule::GaussLegendre);
ContourProjection spectral_projection_contour(const Mat& G, const CVec& eigenvalues, const Box& box,
                                              int quad_points = 64,
                                              QuadratureRule rule = QuadratureRule::GaussLegendre);

enum class PositivityReason {
  DominantSimpleStrictEigvecs,
  EigvecNotStrictlyPositive,
  EigvecSignChanging,
  NotAlgebraicallySimple,
  ComplexDominantPair,
  NoRealDominant
};
std::string to_string(PositivityReason r);

struct EventualPositivityVerdict {
  bool holds = false;
  PositivityReason reason = PositivityReason::NoRealDominant;
  double delta_primal = 0.0;  // min / max of the sign-normalized right vector
  double delta_dual = 0.0;    // same for the left vector
  nlohmann::json to_json() const;
};

/// Sign threshold for the normalized eigenvector components.
inline constexpr double kStrictTol = 1e-8;

EventualPositivityVerdict eventual_positivity_spectral(const SpectrumReport& report);
EventualPositivityVerdict eventual_positivity_spectral(const DiscreteGenerator& gen);

struct DissipativeReport {
  double spectral_bound = 0.0;
  double coupling_dissipativity = 0.0;  // largest M-eigenvalue of the symmetric part of B_h
  double coupling_on_one = 0.0;         // ||B 1||_inf
  bool bound_nonpositive = false;
  bool imaginary_axis_only_zero = false;
  bool coupling_kills_one = false;
  bool bound_is_zero = false;
  bool equivalence_holds = false;
  /// Largest principal angle between the top eigenvector and 1 (NaN unless bound_is_zero).
  double kernel_angle = 0.0;
  bool all_hold() const;
  nlohmann::json to_json() const;
};

/// Spectral consequences of dissipativity checked numerically for a drift-free
/// generator with dissipative coupling.  Throws PreconditionError otherwise.
DissipativeReport dissipative_regime_checks(const DiscreteGenerator& gen, double tol = 1e-8);

/// Principal angles (radians, ascending) between the column spans of A and B
/// in the M-inner product.
Vec principal_angles(const CMat& A, const CMat& B, const Vec& mass);

/// tau at which the two leading real eigenvalues of the discrete
/// "example-8.1(tau)" generator coalesce, on a grid with `cells` cells.
double discrete_coalescence_tau(int cells, double lo = 1.1, double hi = 1.2, double tol = 1e-13);

}  // namespace wentzell
