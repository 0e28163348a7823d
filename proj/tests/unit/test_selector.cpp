#include <gtest/gtest.h>

#include <cmath>

#include "hdtta/errors.hpp"
#include "hdtta/selector.hpp"

using namespace hdtta;

TEST(ConsistencyScore, KnownValues) {
  EXPECT_EQ(consistency_score(2.0, 2.0, 0.3, 1.5, 1e-6), 1.0);
  EXPECT_NEAR(consistency_score(1.0 + 1.5 * 0.2, 1.0, 0.2, 1.5, 0.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(consistency_score(1.0 - 3.0 * 0.2, 1.0, 0.2, 1.5, 0.0), std::exp(-2.0), 1e-14);
  // eps keeps a zero-spread core finite
  EXPECT_EQ(consistency_score(1.0, 1.0, 0.0, 1.5, 1e-6), 1.0);
  EXPECT_LT(consistency_score(1.1, 1.0, 0.0, 1.5, 1e-6), 1e-100);
}

namespace {

// Four voxels in a row: two core, two candidate expansion voxels.
struct Line {
  Grid g{{4, 1, 1}};
  Mask core{g, {1, 1, 0, 0}};
  Mask delta{g, {0, 0, 1, 1}};
};

}  // namespace

TEST(SRep, MinimumOverChannels) {
  Line l;
  const Volume good(l.g, {0.9, 1.1, 1.0, 1.0});
  const Volume off(l.g, {0.9, 1.1, 1.15, 1.15});
  const std::vector<Volume> both{good, off};
  const auto d = s_rep_detail(both, l.core, l.delta);
  EXPECT_EQ(d.channel, 1u);
  EXPECT_NEAR(d.mu_core, 1.0, 1e-15);
  EXPECT_NEAR(d.sigma_core, 0.1, 1e-15);
  EXPECT_NEAR(d.mu_delta, 1.15, 1e-15);
  EXPECT_NEAR(d.score, std::exp(-0.5), 1e-5);
  const std::vector<Volume> just_good{good};
  EXPECT_EQ(s_rep(just_good, l.core, l.delta), 1.0);
}

TEST(SRep, EmptyRegionsThrow) {
  Line l;
  const std::vector<Volume> ch{Volume(l.g, 1.0)};
  EXPECT_THROW(s_rep(ch, Mask(l.g), l.delta), EmptyRegion);
  EXPECT_THROW(s_rep(ch, l.core, Mask(l.g)), EmptyRegion);
}

TEST(ExpansionRegion, CoreAndDelta) {
  const Grid g({5, 1, 1});
  const Volume p0(g, {0.9, 0.81, 0.8, 0.3, 0.1});
  const Mask diffuse(g, {1, 1, 1, 1, 0});
  const auto r = expansion_region(p0, diffuse);
  EXPECT_EQ(r.core, Mask(g, {1, 1, 0, 0, 0}));
  EXPECT_EQ(r.delta, Mask(g, {0, 0, 1, 1, 0}));
}

namespace {

Case line_case(double delta_intensity) {
  Case c;
  c.id = "line";
  const Grid g({6, 1, 1});
  c.logits0 = Volume(g, {5.0, 5.0, 5.0, -5.0, -5.0, -5.0});
  c.image = {Volume(g, {1.0, 1.2, 1.1, delta_intensity, delta_intensity, 0.0})};
  return c;
}

const Volume kCompactZ(Grid({6, 1, 1}), {5.0, 5.0, 5.0, -5.0, -5.0, -5.0});
const Volume kDiffuseZ(Grid({6, 1, 1}), {5.0, 5.0, 5.0, 1.0, 1.0, -5.0});

}  // namespace

TEST(Select, MatchingTextureChoosesDiffuse) {
  const auto r = select(line_case(1.1), kCompactZ, kDiffuseZ);
  EXPECT_EQ(r.chosen, Hypothesis::diffuse);
  ASSERT_TRUE(r.s_rep.has_value());
  EXPECT_NEAR(*r.s_rep, 1.0, 1e-12);
  EXPECT_EQ(r.core_voxels, 3u);
  EXPECT_EQ(r.delta_voxels, 2u);
}

TEST(Select, MismatchedTextureChoosesCompact) {
  const auto r = select(line_case(0.5), kCompactZ, kDiffuseZ);
  EXPECT_EQ(r.chosen, Hypothesis::compact);
  ASSERT_TRUE(r.s_rep.has_value());
  EXPECT_LT(*r.s_rep, 0.95);
}

TEST(Select, NoExpansionFallsBackToCompact) {
  const auto r = select(line_case(1.1), kCompactZ, kCompactZ);
  EXPECT_EQ(r.chosen, Hypothesis::compact);
  EXPECT_FALSE(r.s_rep.has_value());
  EXPECT_EQ(r.delta_voxels, 0u);
}

TEST(Select, NoCoreFallsBackToCompact) {
  Case c = line_case(1.1);
  c.logits0 = Volume(c.grid(), 0.5);
  const auto r = select(c, kCompactZ, kDiffuseZ);
  EXPECT_EQ(r.chosen, Hypothesis::compact);
  EXPECT_EQ(r.core_voxels, 0u);
  EXPECT_FALSE(r.s_rep.has_value());
}

TEST(Select, AcceptanceIsStrict) {
  const Case c = line_case(1.15);
  SelectorParams p;
  const auto first = select(c, kCompactZ, kDiffuseZ, p);
  ASSERT_TRUE(first.s_rep.has_value());
  p.accept = *first.s_rep;
  EXPECT_EQ(select(c, kCompactZ, kDiffuseZ, p).chosen, Hypothesis::compact);
  p.accept = std::nextafter(*first.s_rep, 0.0);
  EXPECT_EQ(select(c, kCompactZ, kDiffuseZ, p).chosen, Hypothesis::diffuse);
}

TEST(Select, GridMismatchThrows) {
  EXPECT_THROW(select(line_case(1.1), Volume(Grid({5, 1, 1})), kDiffuseZ), DimensionMismatch);
}
