#pragma once

#include <array>
#include <span>

#include "skincal/types.hpp"

namespace skincal {

inline constexpr int kPolyDegree = 5;
inline constexpr int kNumCoeffs = kPolyDegree + 1;

/// Quintic coefficients, constant term first: p(c) = v[0] + v[1] c + ... + v[5] c^5.
using PolyCoeffs = std::array<double, kNumCoeffs>;

struct FitPoint {
  double c_norm = 0.0;      // normalized capacitance in [-1, 1]
  double pressure_pa = 0.0;
};

/// Affine map of a raw reading onto [-1, 1] over the taxel's calibrated
/// range; readings outside [c_min, c_max] clamp to the boundary. Raising raw
/// 8-bit counts to the 5th power is numerically hopeless (255^5 ~ 1.1e12),
/// hence the fit always runs in this normalized coordinate.
/// Throws DegenerateRangeError when c_min >= c_max.
double normalize_capacitance(double raw, RawCount c_min, RawCount c_max);

/// Regressor row [1, c, c^2, c^3, c^4, c^5].
std::array<double, kNumCoeffs> build_regressor(double c_norm);

struct FitResult {
  PolyCoeffs coeffs{};
  double residual_rms_pa = 0.0;
};

/// Least-squares quintic fit of pressure against normalized capacitance,
/// solved by Householder QR on the Vandermonde system rather than the normal
/// equations. Throws RankDeficientError when fewer than 6 distinct abscissae
/// are present (or the system is numerically rank deficient), and
/// InvalidDataError on non-finite input.
FitResult fit_polynomial(std::span<const FitPoint> points);

double evaluate_polynomial(const PolyCoeffs& coeffs, double c_norm);

}  // namespace skincal
