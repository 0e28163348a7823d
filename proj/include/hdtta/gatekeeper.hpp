#pragma once

#include <cstddef>
#include <string_view>

#include "hdtta/volume.hpp"

namespace hdtta {

struct GateThresholds {
  std::size_t min_volume_voxels = 300;  // flag if predicted volume is below this
  double uncertain_low = 0.3;           // open band (low, high) of uncertain P0
  double uncertain_high = 0.7;
  double max_uncertainty_ratio = 0.05;  // flag if ratio exceeds this
  double tumor_threshold = 0.5;         // predicted tumor is P0 > this

  void validate() const;
  friend bool operator==(const GateThresholds&, const GateThresholds&) = default;
};

enum class GateTrigger { none, small_volume, high_uncertainty, both };

std::string_view to_string(GateTrigger t);
GateTrigger gate_trigger_from_string(std::string_view s);

struct GateVerdict {
  bool flagged = false;
  std::size_t predicted_volume_voxels = 0;
  double uncertainty_ratio = 0.0;  // 0 for an empty prediction
  GateTrigger trigger = GateTrigger::none;

  friend bool operator==(const GateVerdict&, const GateVerdict&) = default;
};

/// Decides whether a baseline prediction P0 warrants refinement: the
/// predicted tumor is too small, or too much of it is uncertain.
GateVerdict gate(const Volume& p0, const GateThresholds& thresholds = {});

}  // namespace hdtta
