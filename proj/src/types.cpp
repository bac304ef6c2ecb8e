#include "skincal/types.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "skincal/error.hpp"

namespace skincal {

SkinGeometry make_geometry(int n_triangles, int taxels_per_triangle,
                           double taxel_area_m2) {
  if (n_triangles <= 0 || taxels_per_triangle <= 0)
    throw InvalidGeometryError("geometry: taxel counts must be positive");
  if (!(taxel_area_m2 > 0.0) || !std::isfinite(taxel_area_m2))
    throw InvalidGeometryError("geometry: taxel area must be positive");
  return {n_triangles, taxels_per_triangle, taxel_area_m2};
}

CalibrationDataset::CalibrationDataset(SkinGeometry geometry,
                                       std::vector<CalibrationSample> samples)
    : geometry_(geometry), samples_(std::move(samples)) {
  make_geometry(geometry_.n_triangles, geometry_.taxels_per_triangle,
                geometry_.taxel_area_m2);
  const std::size_t n = static_cast<std::size_t>(geometry_.n_taxels());
  double prev = 0.0;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (s.frame.size() != n)
      throw InvalidDataError("sample " + std::to_string(k) + ": frame has " +
                             std::to_string(s.frame.size()) + " counts, expected " +
                             std::to_string(n));
    if (!std::isfinite(s.pressure_pa) || s.pressure_pa < 0.0)
      throw InvalidDataError("sample " + std::to_string(k) +
                             ": pressure must be finite and non-negative");
    if (s.pressure_pa < prev)
      throw ProtocolError("sample " + std::to_string(k) +
                          ": pressure decreases; calibration sweeps use the "
                          "loading branch only");
    prev = s.pressure_pa;
    for (RawCount c : s.frame)
      if (c < kCountMin || c > kCountMax)
        throw InvalidDataError("sample " + std::to_string(k) + ": count " +
                               std::to_string(c) + " outside [0, 255]");
  }
}

const char* to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::low_amplitude:
      return "low-amplitude";
    case ExclusionReason::rank_deficient:
      return "rank-deficient";
    case ExclusionReason::none:
      break;
  }
  return "";
}

}  // namespace skincal
