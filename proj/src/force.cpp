#include "skincal/force.hpp"

#include <string>

#include "skincal/error.hpp"
#include "skincal/polyfit.hpp"

namespace skincal {

namespace {

void check_shapes(const CapacitanceFrame& frame, const BaselineFrame& baseline,
                  const SkinModel& model) {
  const std::size_t n = static_cast<std::size_t>(model.geometry.n_taxels());
  if (frame.counts.size() != n)
    throw FrameShapeError("frame has " + std::to_string(frame.counts.size()) +
                          " counts, model expects " + std::to_string(n));
  if (baseline.counts.size() != n)
    throw FrameShapeError("baseline has " +
                          std::to_string(baseline.counts.size()) +
                          " counts, model expects " + std::to_string(n));
}

}  // namespace

std::vector<TaxelId> activated_taxels(const CapacitanceFrame& frame,
                                      const BaselineFrame& baseline,
                                      const SkinModel& model) {
  check_shapes(frame, baseline, model);
  std::vector<TaxelId> ids;
  for (TaxelId t = 0; t < model.geometry.n_taxels(); ++t) {
    const auto& tm = model.taxels[static_cast<std::size_t>(t)];
    if (tm.excluded) continue;
    const int delta = frame.counts[static_cast<std::size_t>(t)] -
                      baseline.counts[static_cast<std::size_t>(t)];
    if (std::abs(delta) >= model.activation_threshold) ids.push_back(t);
  }
  return ids;
}

TaxelPressure taxel_pressure(const SkinModel& model, TaxelId taxel,
                             RawCount raw) {
  if (taxel < 0 || taxel >= model.geometry.n_taxels())
    throw IndexError("taxel " + std::to_string(taxel) + " outside [0, " +
                     std::to_string(model.geometry.n_taxels()) + ")");
  const auto& tm = model.taxels[static_cast<std::size_t>(taxel)];
  if (tm.excluded)
    throw ExcludedTaxelError("taxel " + std::to_string(taxel) +
                             " was excluded during calibration (" +
                             std::string(to_string(tm.reason)) + ")");

  TaxelPressure out;
  out.clamped = raw < tm.c_min || raw > tm.c_max;
  const double c_norm = normalize_capacitance(raw, tm.c_min, tm.c_max);
  const double p = evaluate_polynomial(tm.coeffs, c_norm);
  out.pressure_pa = p < 0.0 ? 0.0 : p;  // pressure is physically non-negative
  return out;
}

ForceEstimate estimate_force(const CapacitanceFrame& frame,
                             const BaselineFrame& baseline,
                             const SkinModel& model) {
  check_shapes(frame, baseline, model);
  ForceEstimate est;
  double pressure_sum = 0.0;
  for (TaxelId t : activated_taxels(frame, baseline, model)) {
    const auto tp =
        taxel_pressure(model, t, frame.counts[static_cast<std::size_t>(t)]);
    est.per_taxel_pressure_pa.emplace(t, tp.pressure_pa);
    pressure_sum += tp.pressure_pa;
    if (tp.clamped) est.clamped.push_back(t);
  }
  est.total_force_n = model.geometry.taxel_area_m2 * pressure_sum;
  est.n_activated = est.per_taxel_pressure_pa.size();
  return est;
}

}  // namespace skincal
