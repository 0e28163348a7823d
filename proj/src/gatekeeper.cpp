#include "hdtta/gatekeeper.hpp"

#include <string>

#include "hdtta/errors.hpp"

namespace hdtta {

void GateThresholds::validate() const {
  if (!(uncertain_low <= uncertain_high))
    throw InvalidArgument("gate uncertainty band must satisfy low <= high");
  if (!(max_uncertainty_ratio >= 0.0 && max_uncertainty_ratio <= 1.0))
    throw InvalidArgument("gate max_uncertainty_ratio must lie in [0, 1]");
}

std::string_view to_string(GateTrigger t) {
  switch (t) {
    case GateTrigger::none: return "none";
    case GateTrigger::small_volume: return "small_volume";
    case GateTrigger::high_uncertainty: return "high_uncertainty";
    case GateTrigger::both: return "both";
  }
  return "none";
}

GateTrigger gate_trigger_from_string(std::string_view s) {
  if (s == "none") return GateTrigger::none;
  if (s == "small_volume") return GateTrigger::small_volume;
  if (s == "high_uncertainty") return GateTrigger::high_uncertainty;
  if (s == "both") return GateTrigger::both;
  throw InvalidArgument("unknown gate trigger '" + std::string(s) + "'");
}

GateVerdict gate(const Volume& p0, const GateThresholds& th) {
  th.validate();
  GateVerdict v;
  std::size_t uncertain = 0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double p = p0[i];
    if (!(p > th.tumor_threshold)) continue;
    ++v.predicted_volume_voxels;
    if (p > th.uncertain_low && p < th.uncertain_high) ++uncertain;
  }
  if (v.predicted_volume_voxels > 0)
    v.uncertainty_ratio =
        static_cast<double>(uncertain) / static_cast<double>(v.predicted_volume_voxels);

  const bool small = v.predicted_volume_voxels < th.min_volume_voxels;
  const bool unsure = v.uncertainty_ratio > th.max_uncertainty_ratio;
  v.trigger = small && unsure ? GateTrigger::both
              : small         ? GateTrigger::small_volume
              : unsure        ? GateTrigger::high_uncertainty
                              : GateTrigger::none;
  v.flagged = v.trigger != GateTrigger::none;
  return v;
}

}  // namespace hdtta
