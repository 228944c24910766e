#include "wentzell/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wentzell/errors.hpp"

namespace wentzell {

double Box::boundary_distance(cplx z) const {
  const double x = z.real();
  const double y = z.imag();
  auto seg = [](double p, double q, double lo, double hi) {
    // distance from (p, q) to the segment {lo <= p' <= hi, q' = 0}
    const double dp = p < lo ? lo - p : (p > hi ? p - hi : 0.0);
    return std::hypot(dp, q);
  };
  return std::min({seg(x, y - im_min, re_min, re_max), seg(x, y - im_max, re_min, re_max),
                   seg(y, x - re_min, im_min, im_max), seg(y, x - re_max, im_min, im_max)});
}

Grid1D::Grid1D(int cells) : cells_(cells) {
  if (cells < 2) throw DomainError("Grid1D needs at least 2 cells, got " + std::to_string(cells));
  h_ = 1.0 / cells;
  nodes_.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) nodes_[i] = static_cast<double>(i) / cells;
}

MassWeights::MassWeights(const Grid1D& grid) {
  const int n = grid.size();
  interior_ = Vec::Constant(n, grid.h());
  interior_[0] = interior_[n - 1] = 0.5 * grid.h();
  total_ = interior_;
  total_[0] += 1.0;
  total_[n - 1] += 1.0;
}

namespace {

void check_lengths(Eigen::Index u, Eigen::Index v, Eigen::Index w) {
  if (u != v || u != w) {
    throw DimensionError("inner_product: lengths " + std::to_string(u) + ", " + std::to_string(v) +
                         " and weights " + std::to_string(w) + " differ");
  }
}

}  // namespace

double inner_product(const Vec& u, const Vec& v, const MassWeights& w) {
  check_lengths(u.size(), v.size(), w.size());
  return (w.total().array() * u.array() * v.array()).sum();
}

cplx inner_product(const CVec& u, const CVec& v, const MassWeights& w) {
  check_lengths(u.size(), v.size(), w.size());
  return (w.total().cast<cplx>().array() * u.array() * v.array().conjugate()).sum();
}

LatticeParts lattice_ops(const Vec& u) {
  LatticeParts out;
  out.positive_part = u.cwiseMax(0.0);
  out.negative_part = (-u).cwiseMax(0.0);
  out.modulus = u.cwiseAbs();
  return out;
}

LatticeParts lattice_ops(const CVec& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i].imag() != 0.0) {
      throw DomainError("lattice operations need a real state; component " + std::to_string(i) +
                        " has imaginary part " + std::to_string(u[i].imag()));
    }
  }
  return lattice_ops(Vec(u.real()));
}

}  // namespace wentzell
