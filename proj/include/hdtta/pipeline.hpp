#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdtta/gatekeeper.hpp"
#include "hdtta/losses.hpp"
#include "hdtta/optimizer.hpp"
#include "hdtta/selector.hpp"
#include "hdtta/volume.hpp"

namespace hdtta {

enum class Mode { full, no_gatekeeper, no_edge_map, only_compact, only_diffuse };

inline constexpr Mode kAllModes[] = {Mode::full, Mode::no_gatekeeper, Mode::no_edge_map,
                                     Mode::only_compact, Mode::only_diffuse};

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct PipelineConfig {
  GateThresholds gate;
  CompactConfig compact;
  DiffuseConfig diffuse;
  OptimizerProtocol protocol;
  EdgeMapParams edge;
  SelectorParams selector;
  Mode mode = Mode::full;
  /// Run the two hypothesis refinements of a case on separate threads.
  bool parallel_hypotheses = false;

  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

enum class MaskSource { baseline, compact, diffuse };

std::string_view to_string(MaskSource s);
MaskSource mask_source_from_string(std::string_view s);

struct TraceSummary {
  Hypothesis hypothesis = Hypothesis::compact;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t steps = 0;
  std::vector<double> loss_values;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

struct StageTimings {
  double gate_s = 0.0;
  double refine_s = 0.0;
  double select_s = 0.0;
  double total_s = 0.0;

  friend bool operator==(const StageTimings&, const StageTimings&) = default;
};

struct RunReport {
  std::string case_id;
  PipelineConfig config;
  GateVerdict gate;
  std::optional<TraceSummary> compact_trace;
  std::optional<TraceSummary> diffuse_trace;
  std::optional<SelectionResult> selection;
  MaskSource source = MaskSource::baseline;
  Mask final_mask;
  std::size_t final_volume_voxels = 0;
  StageTimings timings;

  // Refined logits, kept in memory for analysis; not serialized.
  std::optional<Volume> compact_z;
  std::optional<Volume> diffuse_z;
};

/// Gatekeeper, then (if flagged) both hypothesis refinements, then selection.
/// NumericalFailure from the optimizer is rethrown naming case and hypothesis.
RunReport run_case(const Case& c, const PipelineConfig& cfg = {});

struct CohortEntry {
  std::string case_id;
  std::optional<RunReport> report;
  std::string error;  // set when report is absent
};

/// Order-preserving run_case over a cohort; `workers` bounds case-level
/// concurrency. Per-case failures are recorded and do not stop the cohort.
std::vector<CohortEntry> run_cohort(const std::vector<Case>& cases, const PipelineConfig& cfg,
                                    std::size_t workers = 1);

}  // namespace hdtta
