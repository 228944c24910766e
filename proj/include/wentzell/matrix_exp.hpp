#pragma once

#include "wentzell/types.hpp"

namespace wentzell {

/// Working precision of the scaling-and-squaring pipeline.  Rounding in the
/// approximant is doubled by every squaring, so the double-precision error in
/// exp(tA)1 is roughly u * ||tA||_1.  Auto switches to long double when that
/// estimate exceeds 1e-13 and the matrix has at most 600 rows.
enum class ExpmPrecision { Auto, Double, Extended };

/// exp(tA) by scaling and squaring with the degree-13 Pade approximant.
/// Throws ScalingError when the Gershgorin bound on the spectral abscissa
/// times t exceeds the double exponent range; rescale by exp(-s t) first.
Mat expm(const Mat& A, double t = 1.0, ExpmPrecision precision = ExpmPrecision::Auto);

/// exp(tA) through a complex eigendecomposition.  Inaccurate for defective or
/// ill-conditioned eigenbases; intended for cross-validation.
Mat expm_spectral(const Mat& A, double t = 1.0);

/// Upper bound on the spectral abscissa from Gershgorin discs.
double gershgorin_abscissa(const Mat& A);

}  // namespace wentzell
