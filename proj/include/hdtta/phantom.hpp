#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hdtta/volume.hpp"

namespace hdtta {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so phantoms are reproducible across
/// implementations. See docs/file_format.md for the constants.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t mix(std::uint64_t x);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Standard normal (Box-Muller, cosine branch) from counters 2i and 2i+1.
  double normal(std::uint64_t i) const;

 private:
  std::uint64_t key_;
};

enum class Scenario {
  clean_confident,
  noise_island,
  under_segmented_matched,
  under_segmented_mismatched,
  fragmented_small,
};

inline constexpr Scenario kAllScenarios[] = {
    Scenario::clean_confident, Scenario::noise_island, Scenario::under_segmented_matched,
    Scenario::under_segmented_mismatched, Scenario::fragmented_small};

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

struct PhantomSpec {
  std::array<std::size_t, 3> dims{32, 32, 32};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::clean_confident;
  std::size_t channels = 1;

  // Tumour ellipsoid. center_mm defaults to the volume centre.
  std::optional<std::array<double, 3>> center_mm;
  std::array<double, 3> radii_mm{6.0, 5.0, 5.0};
  /// Random per-seed perturbation: centre shift (mm) and relative radius change.
  double center_jitter_mm = 0.5;
  double radius_jitter = 0.05;

  // Intensity model.
  double tumor_mean = 1.0;
  double tumor_std = 0.1;
  double background_mean = 0.5;
  double background_std = 0.1;
  /// Intensity added to a shell just outside the tumour; 0 disables it.
  double edge_contrast = 0.0;
  double shell_gap_mm = 0.0;
  double shell_thickness_mm = 1.5;
  /// Rim offset, in tumour standard deviations, for the mismatched scenario.
  double mismatch_sigmas = 5.0;

  // Logit corruption.
  double confidence_scale = 6.0;
  double uncertain_logit = 0.4;     // P ~ 0.6: predicted, but inside the uncertainty band
  double uncertain_band_mm = 1.0;   // soft fringe width around islands / eroded cores
  double shrink_margin_mm = 2.0;    // under-segmentation depth
  double rim_logit = -0.5;          // missed rim, just below the decision threshold
  double island_offset_mm = 10.0;   // island centre distance from the tumour centre, along the xy diagonal
  double island_radius_mm = 2.5;
  /// The island is a tumour-like bright spot in the image, not only in the logits.
  bool island_visible = true;
  // fragmented_small: a small tumour predicted as a few disjoint pieces.
  std::array<double, 3> small_radii_mm{4.0, 3.5, 3.5};
  std::size_t fragment_count = 3;
  double fragment_radius_mm = 1.2;
  /// Background logits ramp from -background_near_logit at the tumour surface
  /// to -confidence_scale over this distance; 0 gives a flat background.
  double background_ramp_mm = 0.0;
  double background_near_logit = 6.0;

  friend bool operator==(const PhantomSpec&, const PhantomSpec&) = default;
};

struct PhantomAnnotations {
  std::vector<std::size_t> island_voxels;  // predicted-positive voxels of the spurious island
  std::vector<std::size_t> rim_voxels;     // ground-truth voxels missed by the baseline
  std::vector<std::size_t> shell_voxels;   // high-contrast shell outside the tumour
  bool expected_flagged = false;           // engineered instability label
  std::array<double, 3> center_mm{};
  std::array<double, 3> radii_mm{};
};

struct Phantom {
  Case case_data;
  Mask gt;
  PhantomAnnotations annotations;
  PhantomSpec spec;
};

/// Throws GeometryError if the tumour (or island, shell) does not fit with a
/// two-voxel margin.
Phantom generate(const PhantomSpec& spec);

struct CohortTemplate {
  PhantomSpec base;
  std::uint64_t first_seed = 0;
  /// Scenario counts, generated in this order with consecutive seeds.
  std::vector<std::pair<Scenario, std::size_t>> mix;
};

std::vector<Phantom> cohort(const CohortTemplate& t);
std::vector<Phantom> cohort(std::span<const PhantomSpec> specs);

}  // namespace hdtta
