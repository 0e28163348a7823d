#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hdtta/volume.hpp"

namespace hdtta {

struct MetricSet {
  double dice = 0.0;
  double hd95_mm = 0.0;
  double precision = 0.0;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

enum class HausdorffVariant {
  pooled,           // percentile of the union of both directed distance sets
  max_directional,  // max of the two directed percentiles
};

std::string_view to_string(HausdorffVariant v);
HausdorffVariant hausdorff_variant_from_string(std::string_view s);

struct HausdorffOptions {
  HausdorffVariant variant = HausdorffVariant::pooled;
  double percentile = 95.0;
  /// Returned when exactly one mask is empty; defaults to the grid diagonal.
  std::optional<double> empty_penalty_mm;
};

/// 2|A and B| / (|A| + |B|); 1 when both are empty.
double dice(const Mask& pred, const Mask& gt);

/// TP / (TP + FP); for an empty prediction 1 if gt is empty else 0.
double precision(const Mask& pred, const Mask& gt);

/// Foreground voxels with a background face neighbour or on the volume border.
Mask boundary(const Mask& m);

/// Squared Euclidean distance (mm^2) from every voxel to the nearest true
/// voxel of `m`, honouring anisotropic spacing. Infinity if `m` is empty.
std::vector<double> squared_distance_transform(const Mask& m);

/// Percentile (default 95th) Hausdorff distance between mask surfaces in mm.
double hd95(const Mask& pred, const Mask& gt, const HausdorffOptions& options = {});

MetricSet evaluate(const Mask& pred, const Mask& gt, const HausdorffOptions& options = {});

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  // sample (N - 1)
};

struct CohortStats {
  SummaryStat dice, hd95_mm, precision;
  std::size_t n = 0;
  bool single_case = false;  // std reported as 0 because N == 1
};

CohortStats aggregate(std::span<const MetricSet> sets);

enum class Alternative {
  greater,  // paired differences tend to be positive
  less,     // paired differences tend to be negative
};

struct WilcoxonResult {
  double p_value = 1.0;
  double p_adjusted = 1.0;  // filled by wilcoxon_holm; equals p_value otherwise
  double w_plus = 0.0;      // sum of ranks of positive differences
  std::size_t n_nonzero = 0;
  bool exact = false;
  bool degenerate = false;    // every difference was zero
  bool underpowered = false;  // fewer than 6 nonzero differences
};

/// Exact one-sided tail probability of the signed-rank statistic by dynamic
/// programming over the null distribution of (tie-averaged) ranks.
double wilcoxon_exact_p(std::span<const double> diffs, Alternative alt);

/// Normal approximation with tie and continuity correction.
double wilcoxon_normal_p(std::span<const double> diffs, Alternative alt);

/// One-sided paired signed-rank test: zeros dropped, ties get average ranks,
/// exact for up to `exact_max_n` nonzero differences, normal beyond.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs, Alternative alt,
                                    std::size_t exact_max_n = 25);

/// Holm-Bonferroni step-down adjusted p-values, in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

/// Runs one test per metric family member and Holm-adjusts across them.
std::vector<WilcoxonResult> wilcoxon_holm(const std::vector<std::vector<double>>& diffs,
                                          const std::vector<Alternative>& directions);

}  // namespace hdtta
