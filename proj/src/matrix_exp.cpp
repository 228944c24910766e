#include "wentzell/matrix_exp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

namespace {

constexpr double kTheta13 = 5.371920351148152;
constexpr double kPade13[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                670442572800.0,      33522128640.0,       1323241920.0,
                                40840800.0,          960960.0,            16380.0,
                                182.0,               1.0};

template <class S>
Mat pade_and_square(const Mat& A, double t, int squarings) {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  const M X = (A * (t / std::ldexp(1.0, squarings))).template cast<S>();
  const M I = M::Identity(n, n);
  const M X2 = X * X;
  const M X4 = X2 * X2;
  const M X6 = X4 * X2;
  const auto c = [](int k) { return static_cast<S>(kPade13[k]); };
  M W = X6 * (c(13) * X6 + c(11) * X4 + c(9) * X2);
  W += c(7) * X6 + c(5) * X4 + c(3) * X2 + c(1) * I;
  const M U = X * W;
  M V = X6 * (c(12) * X6 + c(10) * X4 + c(8) * X2);
  V += c(6) * X6 + c(4) * X4 + c(2) * X2 + c(0) * I;

  // r(X) - I = (V - U)^{-1} 2U; squaring in this form keeps the identity exact.
  M F = (V - U).partialPivLu().solve(static_cast<S>(2) * U);
  for (int k = 0; k < squarings; ++k) F = static_cast<S>(2) * F + F * F;
  F += I;
  return F.template cast<double>();
}

}  // namespace

double gershgorin_abscissa(const Mat& A) {
  double bound = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double radius = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
    bound = std::max(bound, A(i, i) + radius);
  }
  return bound;
}

Mat expm(const Mat& A, double t, ExpmPrecision precision) {
  if (A.rows() != A.cols()) throw DimensionError("expm: matrix is not square");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("expm: t must be finite and nonnegative");
  const Eigen::Index n = A.rows();
  if (n == 0) return Mat(0, 0);
  if (!A.allFinite()) throw ScalingError("expm: matrix has non-finite entries");
  const double growth = gershgorin_abscissa(A) * t;
  if (growth > 700.0) {
    std::ostringstream os;
    os << "expm: growth bound " << growth << " overflows; compute exp(-s t) exp(tG) with a shift s instead";
    throw ScalingError(os.str());
  }
  const double norm1 = t * A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));

  if (precision == ExpmPrecision::Auto) {
    const bool lossy = std::numeric_limits<double>::epsilon() * norm1 > 1e-13;
    precision = (lossy && n <= 600) ? ExpmPrecision::Extended : ExpmPrecision::Double;
  }
  Mat E = precision == ExpmPrecision::Extended ? pade_and_square<long double>(A, t, squarings)
                                               : pade_and_square<double>(A, t, squarings);
  if (!E.allFinite()) throw ScalingError("expm: result is not finite");
  return E;
}

Mat expm_spectral(const Mat& A, double t) {
  if (A.rows() != A.cols()) throw DimensionError("expm_spectral: matrix is not square");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("expm_spectral: t must be finite and nonnegative");
  Eigen::EigenSolver<Mat> es(A, true);
  if (es.info() != Eigen::Success) throw NumericalError("expm_spectral: eigensolver did not converge");
  const CMat V = es.eigenvectors();
  const CVec ev = (es.eigenvalues() * t).array().exp().matrix();
  const CMat E = V * ev.asDiagonal() * V.partialPivLu().inverse();
  if (!E.allFinite()) throw ScalingError("expm_spectral: result is not finite");
  return E.real();
}

}  // namespace wentzell
