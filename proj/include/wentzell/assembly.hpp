#pragma once

// Finite element assembly of the Wentzell-Robin form
//   a[u, v] = q[u1, v1] - <B u, v>_H
// with piecewise linear elements on a uniform grid, midpoint quadrature for
// the coefficients, and lumped mass.  The generator of the semigroup is
// G = -M^{-1} (K_q - B_h).

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "wentzell/functions.hpp"
#include "wentzell/mesh.hpp"

namespace wentzell {

/// Coefficients of L u = -(a u')' + b u' - (c u)' on (0, 1).
struct CoefficientSet {
  ScalarFunction a = ScalarFunction::constant(1.0);
  ScalarFunction b;
  ScalarFunction c;
  ScalarFunction c_prime;  // derivative of c, supplied by the caller
  double eta = 1.0;

  static CoefficientSet laplacian() { return {}; }
  /// b and c vanish identically (the self-adjoint Markov base case).
  bool drift_free() const { return b.is_zero() && c.is_zero(); }
};

// Kernel descriptors for a single block B_kl.  Kernels are functions
// k(p, q) with p in the target domain and q in the source domain; integration
// over the source uses the lumped weights (trapezoid on the interval, unit
// mass at each endpoint of the boundary).
struct ZeroKernel {};
/// Kernel values k(p_i, q_j) tabulated on target x source nodes.  For B22
/// these are the matrix entries themselves.
struct DenseKernel {
  Mat values;
};
/// k(p, q) = left(p) * right(q).  Boundary points are evaluated at 0 and 1.
struct SeparableKernel {
  ScalarFunction left;
  ScalarFunction right;
};
/// Multiplication operator (B11 or B22 only): (B u)(p) = m(p) u(p).
struct MultiplicationKernel {
  ScalarFunction m;
};

using BlockDescriptor = std::variant<ZeroKernel, DenseKernel, SeparableKernel, MultiplicationKernel>;

struct CouplingDescriptor {
  BlockDescriptor b11 = ZeroKernel{};
  BlockDescriptor b12 = ZeroKernel{};
  BlockDescriptor b21 = ZeroKernel{};
  BlockDescriptor b22 = ZeroKernel{};
  std::string label = "zero";
  /// Set by example_8_1.
  std::optional<double> example_tau;

  static CouplingDescriptor zero() { return {}; }
  /// B22 = tau * [[0, 1], [-1, 0]], all other blocks zero.
  static CouplingDescriptor example_8_1(double tau);
  /// B22 = [[1, -1], [-1, 1]], all other blocks zero.
  static CouplingDescriptor example_6_10();
  /// Skew kernel k(x, z) = f(x) g(z): B12 u2 = int_Gamma k u2, B21 u1 = -int_Omega k u1.
  static CouplingDescriptor skew(ScalarFunction f, std::array<double, 2> g);
  /// Default skew preset: f(x) = cos(pi x), g = (1, -1).
  static CouplingDescriptor skew_default();

  /// Parse a preset name: "zero", "example-6.10", "example-8.1(tau=2)",
  /// "example-8.1(2)", "skew".  Throws ConfigError otherwise.
  static CouplingDescriptor parse_preset(const std::string& text);
};

/// The four blocks as matrices acting on nodal values.
///   B11: (n+1) x (n+1), B12: (n+1) x 2, B21: 2 x (n+1), B22: 2 x 2.
struct NonlocalCoupling {
  Mat B11;
  Mat B12;
  Mat B21;
  Eigen::Matrix2d B22 = Eigen::Matrix2d::Zero();
  std::string label = "zero";

  /// (B11 1 + B12 1, B21 1 + B22 1) as an interior vector and a boundary pair.
  Vec interior_row_sums() const;
  Eigen::Vector2d boundary_row_sums() const;
};

NonlocalCoupling build_kernel_blocks(const Grid1D& grid, const CouplingDescriptor& descriptor);

struct DiscreteGenerator {
  Grid1D grid;
  MassWeights weights;
  CoefficientSet coeffs;
  NonlocalCoupling coupling;
  Mat K_q;     // K_q(i, j) = q[phi_j, phi_i]
  Mat B_h;     // u^T B_h v ~ <B u, v>_H  (B_h(i, j) = <B phi_j, phi_i>)
  Mat A_form;  // K_q - B_h
  Mat G;       // -M^{-1} A_form

  int size() const { return grid.size(); }
  /// Discrete form a_h[u, v] = v^T A_form u (real states).
  double form(const Vec& u, const Vec& v) const { return v.dot(A_form * u); }
  /// The coupling operator applied to a state, as a nodal vector: M^{-1} B_h u.
  Vec apply_coupling(const Vec& u) const;
};

/// Stiffness matrix of q; throws CoefficientError when a < eta at a quadrature point.
Mat assemble_q(const Grid1D& grid, const CoefficientSet& coeffs);

DiscreteGenerator assemble_generator(const Grid1D& grid, const CoefficientSet& coeffs,
                                     const NonlocalCoupling& coupling);

/// Weak Neumann problem q[u, v] + lambda <u, v>_Omega = <f, v>_Omega + g . trace(v).
/// For a singular system with one-dimensional kernel (e.g. lambda = 0 with c = 0)
/// the solution is normalized to zero interior mean when the data are
/// compatible; incompatible or otherwise singular systems throw ResolventError.
Vec solve_neumann(const DiscreteGenerator& gen, double lambda, const Vec& f, const Eigen::Vector2d& g);

/// Discrete conormal functional: g_k = q_h[u, phi_k] - <Lu, phi_k>_Omega at the
/// two boundary nodes.
Eigen::Vector2d conormal_of(const DiscreteGenerator& gen, const Vec& u, const Vec& Lu);

}  // namespace wentzell
