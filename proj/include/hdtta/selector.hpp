#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "hdtta/losses.hpp"
#include "hdtta/volume.hpp"

namespace hdtta {

struct SelectorParams {
  double core_threshold = 0.8;  // core is P0 > this
  double accept = 0.95;         // diffuse wins iff S_rep > this
  double gamma = 1.5;           // tolerance scale on the core spread
  double eps = 1e-6;            // intensity units
  double mask_threshold = 0.5;  // binarization of refined probabilities

  void validate() const;
  friend bool operator==(const SelectorParams&, const SelectorParams&) = default;
};

struct SelectionResult {
  Hypothesis chosen = Hypothesis::compact;
  std::optional<double> s_rep;
  std::size_t core_voxels = 0;
  std::size_t delta_voxels = 0;
  // Statistics of the channel that produced the (minimum) score.
  std::optional<double> mu_core, sigma_core, mu_delta;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

struct ExpansionRegion {
  Mask core;   // P0 > core_threshold
  Mask delta;  // diffuse mask minus core
};

ExpansionRegion expansion_region(const Volume& p0, const Mask& diffuse_mask,
                                 double core_threshold = 0.8);

/// Single-channel texture consistency score:
/// exp(-0.5 (|mu_delta - mu_core| / (gamma (sigma_core + eps)))^2).
double consistency_score(double mu_delta, double mu_core, double sigma_core, double gamma,
                         double eps);

struct ScoreDetail {
  double score = 0.0;
  std::size_t channel = 0;
  double mu_core = 0.0, sigma_core = 0.0, mu_delta = 0.0;
};

/// Minimum per-channel consistency score. Throws EmptyRegion if either
/// region is empty.
ScoreDetail s_rep_detail(std::span<const Volume> channels, const Mask& core, const Mask& delta,
                         double gamma = 1.5, double eps = 1e-6);

double s_rep(std::span<const Volume> channels, const Mask& core, const Mask& delta,
             double gamma = 1.5, double eps = 1e-6);

/// Picks compact unless the voxels recruited by the diffuse hypothesis look
/// like the confident core.
SelectionResult select(const Case& c, const Volume& compact_z, const Volume& diffuse_z,
                       const SelectorParams& params = {});

}  // namespace hdtta
