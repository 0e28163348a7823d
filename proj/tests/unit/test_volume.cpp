#include <gtest/gtest.h>

#include <cmath>

#include "hdtta/errors.hpp"
#include "hdtta/volume.hpp"

using namespace hdtta;

namespace {

Volume line(std::vector<double> v) {
  const Grid g({v.size(), 1, 1});
  return Volume(g, std::move(v));
}

}  // namespace

TEST(Grid, RejectsZeroDimsAndBadSpacing) {
  EXPECT_THROW(Grid({0, 2, 2}), InvalidArgument);
  EXPECT_THROW(Grid({2, 2, 2}, {1.0, 0.0, 1.0}), InvalidArgument);
  EXPECT_THROW(Grid({2, 2, 2}, {1.0, NAN, 1.0}), InvalidArgument);
}

TEST(Grid, IndexIsXFastest) {
  const Grid g({3, 4, 5});
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 3u);
  EXPECT_EQ(g.index(0, 0, 1), 12u);
  EXPECT_EQ(g.size(), 60u);
}

TEST(Grid, DiagonalUsesPhysicalExtent) {
  const Grid g({3, 4, 12}, {1.0, 1.0, 0.5});
  EXPECT_DOUBLE_EQ(g.diagonal_mm(), std::sqrt(9.0 + 16.0 + 36.0));
}

TEST(Volume, MismatchedDataSizeThrows) {
  EXPECT_THROW(Volume(Grid({2, 2, 2}), std::vector<double>(7)), DimensionMismatch);
}

TEST(Sigmoid, ZeroGivesHalf) {
  const Volume p = sigmoid(Volume(Grid({2, 2, 2}), 0.0));
  for (double v : p.values()) EXPECT_EQ(v, 0.5);
}

TEST(Sigmoid, SaturatesAtTwenty) {
  const Volume p = sigmoid(Volume(Grid({2, 2, 2}), 20.0));
  for (double v : p.values()) EXPECT_NEAR(v, 1.0, 1e-8);
}

TEST(Sigmoid, KnownValues) {
  const Volume p = sigmoid(line({-1.0, 0.0, 1.0}));
  EXPECT_NEAR(p[0], 0.26894, 1e-5);
  EXPECT_NEAR(p[1], 0.5, 1e-5);
  EXPECT_NEAR(p[2], 0.73106, 1e-5);
}

TEST(Sigmoid, StableForHugeMagnitudes) {
  const Volume p = sigmoid(line({-800.0, 800.0}));
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
}

TEST(Logit, InvertsSigmoid) {
  const Volume z = line({-5.0, -0.3, 0.0, 2.5, 9.0});
  const Volume back = logit(sigmoid(z));
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(back[i], z[i], 1e-9);
  EXPECT_THROW(logit(line({0.0, 0.5})), InvalidArgument);
  EXPECT_THROW(logit(line({1.0})), InvalidArgument);
}

TEST(ForwardDiff, ConstantIsZero) {
  const Volume v(Grid({3, 3, 3}), 4.2);
  for (int a = 0; a < 3; ++a) {
    const Volume d = forward_diff(v, a);
    for (double x : d.values()) EXPECT_EQ(x, 0.0);
  }
}

TEST(ForwardDiff, Ramp) {
  const Volume d = forward_diff(line({0, 1, 2, 3}), 0);
  EXPECT_EQ(d.storage(), (std::vector<double>{1, 1, 1, 0}));
}

TEST(ForwardDiff, HandExample) {
  const Volume d = forward_diff(line({0, 5, 1}), 0);
  EXPECT_EQ(d.storage(), (std::vector<double>{5, -4, 0}));
}

TEST(ForwardDiff, OtherAxesAndBadAxis) {
  Volume v(Grid({1, 2, 2}));
  v.at(0, 1, 0) = 3.0;
  v.at(0, 0, 1) = 2.0;
  const Volume dy = forward_diff(v, 1), dz = forward_diff(v, 2);
  EXPECT_EQ(dy.at(0, 0, 0), 3.0);
  EXPECT_EQ(dy.at(0, 1, 0), 0.0);
  EXPECT_EQ(dz.at(0, 0, 0), 2.0);
  EXPECT_EQ(dz.at(0, 1, 0), -3.0);
  EXPECT_THROW(forward_diff(v, 3), InvalidArgument);
}

TEST(Threshold, IsStrict) {
  EXPECT_EQ(threshold(Volume(Grid({2, 2, 2}), 0.8), 0.8).count(), 0u);
  EXPECT_EQ(threshold(Volume(Grid({2, 2, 2}), 0.81), 0.8).count(), 8u);
  const Mask m = threshold(line({0.79, 0.80, 0.81}), 0.8);
  EXPECT_FALSE(m[0]);
  EXPECT_FALSE(m[1]);
  EXPECT_TRUE(m[2]);
}

TEST(MaskStats, ConstantField) {
  const Grid g({3, 3, 1});
  const Mask m(g, true);
  const RegionStats s = mask_stats(Volume(g, 7.0), m);
  EXPECT_EQ(s.mean, 7.0);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.count, 9u);
}

TEST(MaskStats, PopulationStd) {
  const Grid g({3, 1, 1});
  const RegionStats s = mask_stats(Volume(g, {1.0, 3.0, 100.0}), Mask(g, {1, 1, 0}));
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.std, 1.0);
  EXPECT_EQ(s.count, 2u);
}

TEST(MaskStats, EmptyMaskThrows) {
  const Grid g({2, 2, 2});
  EXPECT_THROW(mask_stats(Volume(g), Mask(g)), EmptyRegion);
}

TEST(MaskStats, GridMismatchThrows) {
  EXPECT_THROW(mask_stats(Volume(Grid({2, 2, 2})), Mask(Grid({2, 2, 3}), true)), DimensionMismatch);
}

TEST(MaskAlgebra, SetOperations) {
  const Grid g({4, 1, 1});
  const Mask a(g, {1, 1, 0, 0}), b(g, {0, 1, 1, 0});
  EXPECT_EQ(mask_difference(a, b), Mask(g, {1, 0, 0, 0}));
  EXPECT_EQ(mask_intersection(a, b), Mask(g, {0, 1, 0, 0}));
  EXPECT_EQ(mask_union(a, b), Mask(g, {1, 1, 1, 0}));
  EXPECT_EQ(count_intersection(a, b), 1u);
  EXPECT_THROW(mask_union(a, Mask(Grid({4, 1, 1}, {2, 1, 1}))), DimensionMismatch);
}

TEST(Case, ValidateChecksChannels) {
  const Grid g({2, 2, 2});
  Case c;
  c.id = "x";
  c.logits0 = Volume(g);
  EXPECT_THROW(c.validate(), InvalidArgument);  // no channels
  c.image.push_back(Volume(Grid({2, 2, 3})));
  EXPECT_THROW(c.validate(), DimensionMismatch);
  c.image[0] = Volume(g);
  EXPECT_NO_THROW(c.validate());
  c.logits0[3] = NAN;
  EXPECT_THROW(c.validate(), InvalidArgument);
}
