#include "hdtta/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <thread>

#include "hdtta/errors.hpp"

namespace hdtta {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::no_gatekeeper: return "no_gatekeeper";
    case Mode::no_edge_map: return "no_edge_map";
    case Mode::only_compact: return "only_compact";
    case Mode::only_diffuse: return "only_diffuse";
  }
  return "full";
}

Mode mode_from_string(std::string_view s) {
  for (Mode m : kAllModes)
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(MaskSource s) {
  switch (s) {
    case MaskSource::baseline: return "baseline";
    case MaskSource::compact: return "compact";
    case MaskSource::diffuse: return "diffuse";
  }
  return "baseline";
}

MaskSource mask_source_from_string(std::string_view s) {
  if (s == "baseline") return MaskSource::baseline;
  if (s == "compact") return MaskSource::compact;
  if (s == "diffuse") return MaskSource::diffuse;
  throw InvalidArgument("unknown mask source '" + std::string(s) + "'");
}

void PipelineConfig::validate() const {
  gate.validate();
  compact.validate();
  diffuse.validate();
  protocol.validate();
  selector.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TraceSummary summarize(Hypothesis h, const RefinementTrace& t) {
  TraceSummary s;
  s.hypothesis = h;
  s.loss_values = t.loss_values;
  s.initial_loss = t.loss_values.front();
  s.final_loss = t.loss_values.back();
  s.steps = t.loss_values.size() - 1;
  return s;
}

template <typename Fn>
RefinementTrace guarded(const Case& c, Hypothesis h, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalFailure& e) {
    throw NumericalFailure("case '" + c.id + "', hypothesis " + std::string(to_string(h)) + ": " +
                               e.what(),
                           e.step());
  }
}

}  // namespace

RunReport run_case(const Case& c, const PipelineConfig& cfg) {
  c.validate();
  cfg.validate();
  const auto t_start = Clock::now();

  RunReport report;
  report.case_id = c.id;
  report.config = cfg;

  const Volume p0 = sigmoid(c.logits0);
  report.gate = gate(p0, cfg.gate);
  report.timings.gate_s = seconds_since(t_start);

  const double cut = cfg.selector.mask_threshold;
  if (cfg.mode != Mode::no_gatekeeper && !report.gate.flagged) {
    report.source = MaskSource::baseline;
    report.final_mask = threshold(p0, cut);
    report.final_volume_voxels = report.final_mask.count();
    report.timings.total_s = seconds_since(t_start);
    return report;
  }

  const bool want_compact = cfg.mode != Mode::only_diffuse;
  const bool want_diffuse = cfg.mode != Mode::only_compact;

  const auto t_refine = Clock::now();
  auto run_compact = [&] {
    return guarded(c, Hypothesis::compact,
                   [&] { return refine_compact(c, cfg.compact, cfg.protocol); });
  };
  auto run_diffuse = [&] {
    return guarded(c, Hypothesis::diffuse, [&] {
      const Volume g =
          cfg.mode == Mode::no_edge_map ? Volume(c.grid(), 1.0) : edge_map(c.image, cfg.edge);
      return refine_diffuse(c, g, cfg.diffuse, cfg.protocol);
    });
  };

  std::optional<RefinementTrace> compact, diffuse;
  if (want_compact && want_diffuse && cfg.parallel_hypotheses) {
    auto pending = std::async(std::launch::async, run_diffuse);
    compact = run_compact();
    diffuse = pending.get();
  } else {
    if (want_compact) compact = run_compact();
    if (want_diffuse) diffuse = run_diffuse();
  }
  report.timings.refine_s = seconds_since(t_refine);

  if (compact) {
    report.compact_trace = summarize(Hypothesis::compact, *compact);
    report.compact_z = std::move(compact->final_z);
  }
  if (diffuse) {
    report.diffuse_trace = summarize(Hypothesis::diffuse, *diffuse);
    report.diffuse_z = std::move(diffuse->final_z);
  }

  const auto t_select = Clock::now();
  if (cfg.mode == Mode::only_compact) {
    report.source = MaskSource::compact;
  } else if (cfg.mode == Mode::only_diffuse) {
    report.source = MaskSource::diffuse;
  } else {
    report.selection = select(c, *report.compact_z, *report.diffuse_z, cfg.selector);
    report.source = report.selection->chosen == Hypothesis::diffuse ? MaskSource::diffuse
                                                                    : MaskSource::compact;
  }
  const Volume& chosen =
      report.source == MaskSource::diffuse ? *report.diffuse_z : *report.compact_z;
  report.final_mask = threshold(sigmoid(chosen), cut);
  report.final_volume_voxels = report.final_mask.count();
  report.timings.select_s = seconds_since(t_select);
  report.timings.total_s = seconds_since(t_start);
  return report;
}

std::vector<CohortEntry> run_cohort(const std::vector<Case>& cases, const PipelineConfig& cfg,
                                    std::size_t workers) {
  std::vector<CohortEntry> out(cases.size());
  auto run_one = [&](std::size_t i) {
    out[i].case_id = cases[i].id;
    try {
      out[i].report = run_case(cases[i], cfg);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, cases.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cases.size(); i = next++) run_one(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace hdtta
