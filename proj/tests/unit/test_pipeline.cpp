#include <gtest/gtest.h>

#include "hdtta/errors.hpp"
#include "hdtta/phantom.hpp"
#include "hdtta/pipeline.hpp"

using namespace hdtta;

namespace {

PipelineConfig quick(Mode m = Mode::full) {
  PipelineConfig c;
  c.protocol.steps = 30;
  c.mode = m;
  return c;
}

Phantom make(Scenario s, std::uint64_t seed = 1) {
  PhantomSpec spec;
  spec.scenario = s;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(RunCase, UnflaggedCaseKeepsTheBaseline) {
  const auto ph = make(Scenario::clean_confident);
  const auto r = run_case(ph.case_data, quick());
  EXPECT_FALSE(r.gate.flagged);
  EXPECT_EQ(r.source, MaskSource::baseline);
  EXPECT_EQ(r.final_mask, threshold(sigmoid(ph.case_data.logits0), 0.5));
  EXPECT_EQ(r.final_volume_voxels, r.final_mask.count());
  EXPECT_FALSE(r.compact_trace || r.diffuse_trace || r.selection);
}

TEST(RunCase, NoGatekeeperRefinesEverything) {
  const auto ph = make(Scenario::clean_confident);
  const auto r = run_case(ph.case_data, quick(Mode::no_gatekeeper));
  EXPECT_FALSE(r.gate.flagged);
  ASSERT_TRUE(r.compact_trace && r.diffuse_trace && r.selection);
  EXPECT_NE(r.source, MaskSource::baseline);
}

TEST(RunCase, FlaggedCaseRunsBothHypotheses) {
  const auto ph = make(Scenario::under_segmented_matched);
  const auto r = run_case(ph.case_data, quick());
  EXPECT_TRUE(r.gate.flagged);
  ASSERT_TRUE(r.compact_trace && r.diffuse_trace && r.selection);
  EXPECT_EQ(r.compact_trace->loss_values.size(), 31u);
  EXPECT_EQ(r.compact_trace->steps, 30u);
  EXPECT_EQ(r.compact_trace->initial_loss, r.compact_trace->loss_values.front());
  EXPECT_EQ(r.diffuse_trace->final_loss, r.diffuse_trace->loss_values.back());
  const Volume& z = r.source == MaskSource::diffuse ? *r.diffuse_z : *r.compact_z;
  EXPECT_EQ(r.final_mask, threshold(sigmoid(z), 0.5));
}

TEST(RunCase, OnlyModesSkipSelection) {
  const auto ph = make(Scenario::noise_island);
  const auto c = run_case(ph.case_data, quick(Mode::only_compact));
  EXPECT_EQ(c.source, MaskSource::compact);
  EXPECT_FALSE(c.selection || c.diffuse_trace);
  const auto d = run_case(ph.case_data, quick(Mode::only_diffuse));
  EXPECT_EQ(d.source, MaskSource::diffuse);
  EXPECT_FALSE(d.selection || d.compact_trace);
}

TEST(RunCase, ParallelHypothesesMatchSerial) {
  const auto ph = make(Scenario::fragmented_small, 4);
  PipelineConfig a = quick(), b = quick();
  b.parallel_hypotheses = true;
  const auto ra = run_case(ph.case_data, a), rb = run_case(ph.case_data, b);
  EXPECT_EQ(ra.final_mask, rb.final_mask);
  EXPECT_EQ(ra.compact_z, rb.compact_z);
  EXPECT_EQ(ra.diffuse_z, rb.diffuse_z);
  EXPECT_EQ(ra.selection, rb.selection);
}

TEST(RunCase, NoEdgeMapChangesOnlyTheDiffuseHypothesis) {
  const auto ph = make(Scenario::under_segmented_matched, 2);
  const auto full = run_case(ph.case_data, quick());
  const auto flat = run_case(ph.case_data, quick(Mode::no_edge_map));
  EXPECT_EQ(full.compact_z, flat.compact_z);
  EXPECT_NE(full.diffuse_z, flat.diffuse_z);
}

TEST(RunCase, InvalidInputsThrow) {
  auto ph = make(Scenario::clean_confident);
  ph.case_data.image.clear();
  EXPECT_THROW(run_case(ph.case_data, quick()), InvalidArgument);
  PipelineConfig bad = quick();
  bad.protocol.lr = -1.0;
  EXPECT_THROW(run_case(make(Scenario::clean_confident).case_data, bad), InvalidArgument);
}

TEST(RunCohort, FlagRateAndOrder) {
  CohortTemplate t;
  t.first_seed = 100;
  t.mix = {{Scenario::clean_confident, 15}, {Scenario::under_segmented_matched, 5}};
  std::vector<Case> cases;
  for (auto& p : cohort(t)) cases.push_back(std::move(p.case_data));
  PipelineConfig cfg = quick();
  cfg.protocol.steps = 3;
  const auto out = run_cohort(cases, cfg, 2);
  ASSERT_EQ(out.size(), 20u);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].case_id, cases[i].id);
    ASSERT_TRUE(out[i].report);
    flagged += out[i].report->gate.flagged;
  }
  EXPECT_EQ(flagged, 5u);
}

TEST(RunCohort, FailuresAreRecordedPerCase) {
  std::vector<Case> cases{make(Scenario::clean_confident, 1).case_data, make(Scenario::clean_confident, 2).case_data};
  cases[0].image.push_back(Volume(Grid({3, 3, 3})));
  const auto out = run_cohort(cases, quick(), 1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_FALSE(out[0].report);
  EXPECT_FALSE(out[0].error.empty());
  EXPECT_TRUE(out[1].report);
}

TEST(Modes, NamesRoundTrip) {
  for (Mode m : kAllModes) EXPECT_EQ(mode_from_string(to_string(m)), m);
  EXPECT_THROW(mode_from_string("partial"), InvalidArgument);
  for (auto s : {MaskSource::baseline, MaskSource::compact, MaskSource::diffuse})
    EXPECT_EQ(mask_source_from_string(to_string(s)), s);
}
