// hdtta: command line front end for the refinement pipeline.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hdtta/errors.hpp"
#include "hdtta/gatekeeper.hpp"
#include "hdtta/gradcheck.hpp"
#include "hdtta/io.hpp"
#include "hdtta/metrics.hpp"
#include "hdtta/phantom.hpp"
#include "hdtta/pipeline.hpp"
#include "hdtta/selector.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hdtta;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

// Thrown for a failed check that is not an input problem (gradcheck).
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    io::write_text(path, text);
}

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return io::pipeline_config_from_json(json::parse(io::read_text(path)));
}

Case load_case(const std::vector<std::string>& images, const std::string& logits, const std::string& id) {
  Case c;
  c.id = id.empty() ? fs::path(logits).stem().string() : id;
  c.logits0 = io::read_volume(logits);
  for (const auto& p : images) c.image.push_back(io::read_volume(p));
  c.validate();
  return c;
}

struct RunArgs {
  std::vector<std::string> images;
  std::string logits, gt, out_mask, report, mode, config, case_id;
  std::size_t threads = 1;
  bool no_timing = false;
};

int cmd_run(const RunArgs& a) {
  PipelineConfig cfg = load_config(a.config);
  if (!a.mode.empty()) cfg.mode = mode_from_string(a.mode);
  cfg.parallel_hypotheses = a.threads > 1;
  Mask gt;
  if (!a.gt.empty()) gt = io::read_mask(a.gt);
  const Case c = load_case(a.images, a.logits, a.case_id);

  const RunReport r = run_case(c, cfg);
  if (!a.out_mask.empty()) io::write_mask(a.out_mask, r.final_mask);
  json rep = io::to_json(r, !a.no_timing);
  if (!a.gt.empty()) {
    require_same_grid(gt.grid(), r.final_mask.grid(), "ground truth");
    rep["metrics"] = io::to_json(evaluate(r.final_mask, gt));
  }
  if (!a.report.empty()) io::write_text(a.report, dump(rep));
  std::cout << "case " << r.case_id << ": flagged=" << (r.gate.flagged ? "true" : "false")
            << " source=" << to_string(r.source) << " voxels=" << r.final_volume_voxels << "\n";
  if (a.report.empty()) std::cout << dump(rep);
  return kExitOk;
}

int cmd_gatekeep(const std::string& logits, const std::string& config, const std::string& out) {
  const PipelineConfig cfg = load_config(config);
  const Volume z = io::read_volume(logits);
  emit(dump(io::to_json(gate(sigmoid(z), cfg.gate))), out);
  return kExitOk;
}

int cmd_select(const std::vector<std::string>& images, const std::string& logits, const std::string& compact,
               const std::string& diffuse, const std::string& config, const std::string& out) {
  const PipelineConfig cfg = load_config(config);
  const Case c = load_case(images, logits, "");
  const Volume zc = io::read_volume(compact);
  const Volume zd = io::read_volume(diffuse);
  require_same_grid(zc.grid(), c.grid(), "compact logits");
  require_same_grid(zd.grid(), c.grid(), "diffuse logits");
  emit(dump(io::to_json(select(c, zc, zd, cfg.selector))), out);
  return kExitOk;
}

int cmd_metrics(const std::string& pred_path, const std::string& gt_path, const std::string& format,
                const std::string& out) {
  const Mask pred = io::read_mask(pred_path);
  const Mask gt = io::read_mask(gt_path);
  require_same_grid(pred.grid(), gt.grid(), "metrics: prediction vs ground truth");
  const MetricSet m = evaluate(pred, gt);
  if (format == "json") {
    emit(dump(io::to_json(m)), out);
  } else {
    io::CaseMetricsRow row{fs::path(pred_path).stem().string(), m, false, MaskSource::baseline};
    emit("case_id,dice,hd95_mm,precision\n" + row.case_id + "," + io::format_double(m.dice) + "," +
             io::format_double(m.hd95_mm) + "," + io::format_double(m.precision) + "\n",
         out);
  }
  return kExitOk;
}

PhantomSpec load_spec(const std::string& path) {
  if (path.empty()) return {};
  const json j = json::parse(io::read_text(path));
  // A phantom.json written by this tool nests the spec next to annotations.
  if (j.is_object() && j.contains("spec") && j.contains("case_id")) return io::phantom_spec_from_json(j.at("spec"));
  return io::phantom_spec_from_json(j);
}

void write_phantom(const Phantom& ph, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t ch = 0; ch < ph.case_data.image.size(); ++ch)
    io::write_volume(dir / ("image_" + std::to_string(ch) + ".hdtv"), ph.case_data.image[ch]);
  io::write_volume(dir / "logits.hdtv", ph.case_data.logits0);
  io::write_mask(dir / "gt.hdtv", ph.gt);
  json meta{{"case_id", ph.case_data.id},
            {"spec", io::to_json(ph.spec)},
            {"expected_flagged", ph.annotations.expected_flagged},
            {"gt_voxels", ph.gt.count()},
            {"island_voxels", ph.annotations.island_voxels.size()},
            {"rim_voxels", ph.annotations.rim_voxels.size()},
            {"shell_voxels", ph.annotations.shell_voxels.size()}};
  io::write_text(dir / "phantom.json", dump(meta));
}

int cmd_phantom(const std::string& spec_path, const std::string& scenario, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  PhantomSpec spec = load_spec(spec_path);
  if (!scenario.empty()) spec.scenario = scenario_from_string(scenario);
  if (seed) spec.seed = *seed;
  const Phantom ph = generate(spec);
  write_phantom(ph, out_dir);
  std::cout << "phantom " << ph.case_data.id << " -> " << out_dir << " (gt " << ph.gt.count() << " voxels)\n";
  return kExitOk;
}

CohortTemplate load_cohort(const std::string& path, std::size_t per_scenario, std::uint64_t seed) {
  CohortTemplate t;
  t.first_seed = seed;
  if (!path.empty()) {
    const json j = json::parse(io::read_text(path));
    if (auto it = j.find("base"); it != j.end()) t.base = io::phantom_spec_from_json(*it);
    if (auto it = j.find("first_seed"); it != j.end()) t.first_seed = it->get<std::uint64_t>();
    for (const auto& entry : j.at("mix"))
      t.mix.emplace_back(scenario_from_string(entry.at(0).get<std::string>()), entry.at(1).get<std::size_t>());
    return t;
  }
  for (Scenario s : kAllScenarios) t.mix.emplace_back(s, per_scenario);
  return t;
}

std::string table_label(Mode m) {
  switch (m) {
    case Mode::full: return "HD-TTA (full)";
    case Mode::no_gatekeeper: return "w/o gatekeeper";
    case Mode::no_edge_map: return "w/o edge map";
    case Mode::only_compact: return "only compact";
    case Mode::only_diffuse: return "only diffuse";
  }
  return "";
}

std::string pm(const SummaryStat& s, double scale, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f +/- %.*f", prec, s.mean * scale, prec, s.std * scale);
  return buf;
}

struct AblateArgs {
  std::string cohort, out_dir, config;
  std::size_t per_scenario = 2;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool no_timing = false;
};

int cmd_ablate(const AblateArgs& a) {
  const PipelineConfig base_cfg = load_config(a.config);
  const CohortTemplate tmpl = load_cohort(a.cohort, a.per_scenario, a.seed);
  const std::vector<Phantom> phantoms = cohort(tmpl);
  if (phantoms.empty()) throw InvalidArgument("ablation cohort is empty");
  std::vector<Case> cases;
  for (const auto& p : phantoms) cases.push_back(p.case_data);

  std::vector<MetricSet> baseline;
  for (const auto& p : phantoms) baseline.push_back(evaluate(threshold(sigmoid(p.case_data.logits0), 0.5), p.gt));

  fs::create_directories(a.out_dir);
  std::ostringstream csv;
  csv << "mode," << io::metrics_csv_header() << "\n";
  for (std::size_t i = 0; i < phantoms.size(); ++i)
    csv << "baseline,"
        << io::metrics_csv_row({cases[i].id, baseline[i], false, MaskSource::baseline}) << "\n";

  json summary{{"cohort_size", cases.size()}, {"config", io::to_json(base_cfg)}};
  summary["modes"]["baseline"] = io::to_json(aggregate(baseline));
  std::vector<std::vector<MetricSet>> per_mode;
  double seconds = 0.0;
  for (Mode m : kAllModes) {
    PipelineConfig cfg = base_cfg;
    cfg.mode = m;
    const auto entries = run_cohort(cases, cfg, a.threads);
    std::vector<MetricSet> sets;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!entries[i].report) throw NumericalFailure(entries[i].error, 0);
      const RunReport& r = *entries[i].report;
      seconds += r.timings.total_s;
      sets.push_back(evaluate(r.final_mask, phantoms[i].gt));
      csv << to_string(m) << "," << io::metrics_csv_row({r.case_id, sets.back(), r.gate.flagged, r.source}) << "\n";
    }
    summary["modes"][std::string(to_string(m))] = io::to_json(aggregate(sets));
    per_mode.push_back(std::move(sets));
  }

  // Paired tests of the full pipeline against each ablation, Holm-adjusted
  // over the three metrics.
  const std::vector<Alternative> dirs{Alternative::greater, Alternative::less, Alternative::greater};
  for (std::size_t k = 1; k < per_mode.size(); ++k) {
    std::vector<std::vector<double>> diffs(3);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      diffs[0].push_back(per_mode[0][i].dice - per_mode[k][i].dice);
      diffs[1].push_back(per_mode[0][i].hd95_mm - per_mode[k][i].hd95_mm);
      diffs[2].push_back(per_mode[0][i].precision - per_mode[k][i].precision);
    }
    const auto tests = wilcoxon_holm(diffs, dirs);
    summary["full_vs"][std::string(to_string(kAllModes[k]))] = {
        {"dice", io::to_json(tests[0])}, {"hd95_mm", io::to_json(tests[1])}, {"precision", io::to_json(tests[2])}};
  }
  if (!a.no_timing) summary["total_refinement_s"] = seconds;

  io::write_text(fs::path(a.out_dir) / "cases.csv", csv.str());
  io::write_text(fs::path(a.out_dir) / "summary.json", dump(summary));

  std::ostringstream table;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s | %-18s | %-16s | %-18s\n", "Method", "Dice (%)", "HD95 (mm)",
                "Precision (%)");
  table << line << std::string(76, '-') << "\n";
  auto row = [&](const std::string& label, const CohortStats& s) {
    std::snprintf(line, sizeof line, "%-16s | %-18s | %-16s | %-18s\n", label.c_str(), pm(s.dice, 100, 2).c_str(),
                  pm(s.hd95_mm, 1, 2).c_str(), pm(s.precision, 100, 2).c_str());
    table << line;
  };
  row("baseline", aggregate(baseline));
  for (std::size_t k = 0; k < per_mode.size(); ++k) row(table_label(kAllModes[k]), aggregate(per_mode[k]));
  io::write_text(fs::path(a.out_dir) / "table.txt", table.str());
  std::cout << table.str();
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t volumes) {
  GradcheckOptions opt;
  opt.seed = seed;
  opt.volumes = volumes;
  const auto checks = run_gradcheck(opt);
  bool ok = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-14s %-8s %-9s %s\n", "term", "max_rel_err", "checked", "excluded", "status");
  std::cout << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-10s %-14.3e %-8zu %-9zu %s\n", c.term.c_str(), c.max_rel_error, c.checked,
                  c.excluded, c.passed ? "ok" : "FAIL");
    std::cout << line;
    ok = ok && c.passed;
  }
  std::cout << "tolerance " << io::format_double(opt.tolerance) << ", step " << io::format_double(opt.step) << "\n";
  if (!ok) throw CheckFailed("gradient check failed");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypothesis-driven logit refinement for 3D segmentation"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Gate, refine and select on one case");
  run_cmd->add_option("--image", run.images, "Image channel volume (repeat per channel)")->required();
  run_cmd->add_option("--logits", run.logits, "Baseline logits volume")->required();
  run_cmd->add_option("--gt", run.gt, "Optional ground-truth mask; adds metrics to the report");
  run_cmd->add_option("--out-mask", run.out_mask, "Final mask output");
  run_cmd->add_option("--report", run.report, "Report JSON output (stdout if omitted)");
  run_cmd->add_option("--mode", run.mode, "full|no_gatekeeper|no_edge_map|only_compact|only_diffuse");
  run_cmd->add_option("--config", run.config, "Pipeline config JSON");
  run_cmd->add_option("--case-id", run.case_id, "Case identifier (default: logits file stem)");
  run_cmd->add_option("--threads", run.threads, "Threads; >1 refines both hypotheses concurrently")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-timing", run.no_timing, "Omit timings so reports are byte-reproducible");

  std::string g_logits, g_config, g_out;
  auto* gate_cmd = app.add_subcommand("gatekeep", "Print the gate verdict for baseline logits");
  gate_cmd->add_option("--logits", g_logits, "Baseline logits volume")->required();
  gate_cmd->add_option("--config", g_config, "Pipeline config JSON");
  gate_cmd->add_option("--report", g_out, "Output JSON (stdout if omitted)");

  std::vector<std::string> s_images;
  std::string s_logits, s_compact, s_diffuse, s_config, s_out;
  auto* sel_cmd = app.add_subcommand("select", "Choose between refined compact and diffuse logits");
  sel_cmd->add_option("--image", s_images, "Image channel volume (repeat per channel)")->required();
  sel_cmd->add_option("--logits", s_logits, "Baseline logits volume")->required();
  sel_cmd->add_option("--compact", s_compact, "Refined compact logits")->required();
  sel_cmd->add_option("--diffuse", s_diffuse, "Refined diffuse logits")->required();
  sel_cmd->add_option("--config", s_config, "Pipeline config JSON");
  sel_cmd->add_option("--report", s_out, "Output JSON (stdout if omitted)");

  std::string m_pred, m_gt, m_format = "csv", m_out;
  auto* met_cmd = app.add_subcommand("metrics", "Dice, HD95 and precision of a mask against ground truth");
  met_cmd->add_option("--pred", m_pred, "Predicted mask")->required();
  met_cmd->add_option("--gt", m_gt, "Ground-truth mask")->required();
  met_cmd->add_option("--format", m_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  met_cmd->add_option("--out", m_out, "Output file (stdout if omitted)");

  std::string p_spec, p_scenario, p_out;
  std::optional<std::uint64_t> p_seed;
  auto* ph_cmd = app.add_subcommand("phantom", "Generate a synthetic case");
  ph_cmd->add_option("--spec", p_spec, "Phantom spec JSON (missing keys keep defaults)");
  ph_cmd->add_option("--scenario", p_scenario, "Scenario name, overrides the spec");
  ph_cmd->add_option("--seed", p_seed, "Seed, overrides the spec");
  ph_cmd->add_option("--out-dir", p_out, "Output directory")->required();

  AblateArgs ab;
  auto* ab_cmd = app.add_subcommand("ablate", "Run a phantom cohort under all five modes");
  ab_cmd->add_option("--cohort", ab.cohort, "Cohort template JSON {base, first_seed, mix}");
  ab_cmd->add_option("--per-scenario", ab.per_scenario, "Cases per scenario when no template is given");
  ab_cmd->add_option("--seed", ab.seed, "First seed when no template is given");
  ab_cmd->add_option("--config", ab.config, "Pipeline config JSON");
  ab_cmd->add_option("--threads", ab.threads, "Cases run concurrently")->check(CLI::PositiveNumber);
  ab_cmd->add_option("--out-dir", ab.out_dir, "Output directory")->required();
  ab_cmd->add_flag("--no-timing", ab.no_timing, "Omit timings from the summary");

  std::uint64_t gc_seed = 0;
  std::size_t gc_volumes = 20;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every loss gradient");
  gc_cmd->add_option("--seed", gc_seed, "Seed of the random inputs");
  gc_cmd->add_option("--volumes", gc_volumes, "Random volumes per term")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gate_cmd) return cmd_gatekeep(g_logits, g_config, g_out);
    if (*sel_cmd) return cmd_select(s_images, s_logits, s_compact, s_diffuse, s_config, s_out);
    if (*met_cmd) return cmd_metrics(m_pred, m_gt, m_format, m_out);
    if (*ph_cmd) return cmd_phantom(p_spec, p_scenario, p_seed, p_out);
    if (*ab_cmd) return cmd_ablate(ab);
    if (*gc_cmd) return cmd_gradcheck(gc_seed, gc_volumes);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CheckFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
