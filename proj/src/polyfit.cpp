#include "skincal/polyfit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "skincal/error.hpp"

namespace skincal {

double normalize_capacitance(double raw, RawCount c_min, RawCount c_max) {
  if (c_min >= c_max)
    throw DegenerateRangeError("normalize: c_min " + std::to_string(c_min) +
                               " >= c_max " + std::to_string(c_max));
  const double t = 2.0 * (raw - c_min) / (c_max - c_min) - 1.0;
  return std::clamp(t, -1.0, 1.0);
}

std::array<double, kNumCoeffs> build_regressor(double c_norm) {
  std::array<double, kNumCoeffs> row;
  row[0] = 1.0;
  for (int j = 1; j < kNumCoeffs; ++j) row[j] = row[j - 1] * c_norm;
  return row;
}

double evaluate_polynomial(const PolyCoeffs& coeffs, double c_norm) {
  double acc = 0.0;
  for (int j = kNumCoeffs - 1; j >= 0; --j) acc = acc * c_norm + coeffs[j];
  return acc;
}

FitResult fit_polynomial(std::span<const FitPoint> points) {
  const int m = static_cast<int>(points.size());
  const int n = kNumCoeffs;

  std::vector<double> cs;
  cs.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.c_norm) || !std::isfinite(p.pressure_pa))
      throw InvalidDataError("fit: non-finite input point");
    cs.push_back(p.c_norm);
  }
  std::sort(cs.begin(), cs.end());
  const int distinct =
      static_cast<int>(std::unique(cs.begin(), cs.end()) - cs.begin());
  if (distinct < n)
    throw RankDeficientError("fit: " + std::to_string(distinct) +
                             " distinct abscissae, need " + std::to_string(n));

  // Vandermonde system in the normalized coordinate, row-major.
  std::vector<double> a(static_cast<std::size_t>(m) * n);
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) {
    const auto row = build_regressor(points[i].c_norm);
    std::copy(row.begin(), row.end(), a.begin() + static_cast<std::size_t>(i) * n);
    b[i] = points[i].pressure_pa;
  }

  // Householder QR, transforms applied to b in lockstep. Column k below the
  // diagonal holds the reflector after step k; diag[k] keeps R's diagonal.
  double diag[kNumCoeffs];
  double diag_max = 0.0;
  for (int k = 0; k < n; ++k) {
    double norm2 = 0.0;
    for (int i = k; i < m; ++i) norm2 += a[i * n + k] * a[i * n + k];
    double alpha = std::sqrt(norm2);
    if (a[k * n + k] > 0.0) alpha = -alpha;
    diag[k] = alpha;
    diag_max = std::max(diag_max, std::fabs(alpha));
    if (std::fabs(alpha) <= 1e-13 * std::max(1.0, diag_max))
      throw RankDeficientError("fit: numerically rank-deficient system");

    a[k * n + k] -= alpha;  // reflector v lives in column k, rows k..m-1
    double vtv = 0.0;
    for (int i = k; i < m; ++i) vtv += a[i * n + k] * a[i * n + k];

    for (int j = k + 1; j < n; ++j) {
      double dot = 0.0;
      for (int i = k; i < m; ++i) dot += a[i * n + k] * a[i * n + j];
      const double f = 2.0 * dot / vtv;
      for (int i = k; i < m; ++i) a[i * n + j] -= f * a[i * n + k];
    }
    double dot = 0.0;
    for (int i = k; i < m; ++i) dot += a[i * n + k] * b[i];
    const double f = 2.0 * dot / vtv;
    for (int i = k; i < m; ++i) b[i] -= f * a[i * n + k];
  }

  FitResult result;
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * result.coeffs[j];
    result.coeffs[i] = s / diag[i];
  }

  double ss = 0.0;
  for (const auto& p : points) {
    const double r = p.pressure_pa - evaluate_polynomial(result.coeffs, p.c_norm);
    ss += r * r;
  }
  result.residual_rms_pa = std::sqrt(ss / m);
  return result;
}

}  // namespace skincal
