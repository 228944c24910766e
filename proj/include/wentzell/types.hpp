#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wentzell {

using cplx = std::complex<double>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Closed axis-aligned rectangle in the complex plane.
struct Box {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
  // Distance from z to the boundary of the rectangle.
  double boundary_distance(cplx z) const;
};

}  // namespace wentzell
