#pragma once

// Discretized product space L^2(0,1) x C^2 with the trace identification
// built in: a state is a vector of nodal values, and its boundary component
// is (values[0], values[n]).

#include "wentzell/types.hpp"

namespace wentzell {

/// Uniform grid on [0, 1] with `cells` cells and cells + 1 nodes.
class Grid1D {
 public:
  explicit Grid1D(int cells);

  int cells() const { return cells_; }
  int size() const { return cells_ + 1; }
  double h() const { return h_; }
  double node(int i) const { return nodes_[i]; }
  double midpoint(int cell) const { return 0.5 * (nodes_[cell] + nodes_[cell + 1]); }
  const Vec& nodes() const { return nodes_; }

  /// Nodal samples of a function.
  template <class F>
  Vec sample(F&& f) const {
    Vec out(size());
    for (int i = 0; i < size(); ++i) out[i] = f(nodes_[i]);
    return out;
  }

 private:
  int cells_;
  double h_;
  Vec nodes_;
};

/// Lumped mass of the product space: trapezoid weights for the interval plus
/// unit counting measure at each endpoint.
class MassWeights {
 public:
  explicit MassWeights(const Grid1D& grid);

  /// Full weights w = interior + boundary.
  const Vec& total() const { return total_; }
  /// Trapezoid weights of the interval part (sum to 1).
  const Vec& interior() const { return interior_; }
  int size() const { return static_cast<int>(total_.size()); }
  double operator[](int i) const { return total_[i]; }

 private:
  Vec interior_;
  Vec total_;
};

/// <u, v>_H = sum_i w_i u_i conj(v_i).
double inner_product(const Vec& u, const Vec& v, const MassWeights& w);
cplx inner_product(const CVec& u, const CVec& v, const MassWeights& w);

struct LatticeParts {
  Vec positive_part;
  Vec negative_part;
  Vec modulus;
};

LatticeParts lattice_ops(const Vec& u);
/// Only defined on the real subspace; throws DomainError for complex data.
LatticeParts lattice_ops(const CVec& u);

/// Boundary component (u(0), u(1)) of a state.
inline Eigen::Vector2d trace(const Vec& u) { return {u[0], u[u.size() - 1]}; }

}  // namespace wentzell
