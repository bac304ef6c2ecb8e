#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "skincal/types.hpp"

namespace skincal {

/// Result of integrating calibrated pressures over the activated taxels.
/// total_force_n is taxel_area times the sum of per_taxel_pressure_pa, by
/// construction. clamped lists activated taxels whose reading fell outside
/// their calibrated range and was clamped to it.
struct ForceEstimate {
  double total_force_n = 0.0;
  std::size_t n_activated = 0;
  std::map<TaxelId, double> per_taxel_pressure_pa;
  std::vector<TaxelId> clamped;
};

/// Taxels that are not excluded and moved at least activation_threshold
/// counts away from the baseline. Sorted ascending.
std::vector<TaxelId> activated_taxels(const CapacitanceFrame& frame,
                                      const BaselineFrame& baseline,
                                      const SkinModel& model);

struct TaxelPressure {
  double pressure_pa = 0.0;
  bool clamped = false;  // reading was outside the calibrated [c_min, c_max]
};

/// Evaluates one taxel's calibrated polynomial at a raw reading. Readings
/// outside the calibrated range clamp to the boundary (a quintic explodes
/// outside its fit range); negative predictions clamp to zero.
/// Throws ExcludedTaxelError for excluded taxels.
TaxelPressure taxel_pressure(const SkinModel& model, TaxelId taxel,
                             RawCount raw);

/// Total normal force: taxel_area times the sum of calibrated pressures over
/// the activated taxels.
ForceEstimate estimate_force(const CapacitanceFrame& frame,
                             const BaselineFrame& baseline,
                             const SkinModel& model);

}  // namespace skincal
