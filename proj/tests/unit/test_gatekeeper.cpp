#include <gtest/gtest.h>

#include "hdtta/errors.hpp"
#include "hdtta/gatekeeper.hpp"

using namespace hdtta;

namespace {

Volume confident_block(std::size_t on, double p_on = 0.95) {
  Volume p(Grid({10, 10, 10}), 0.01);
  for (std::size_t i = 0; i < on; ++i) p[i] = p_on;
  return p;
}

}  // namespace

TEST(Gate, SmallVolumeFlags) {
  const auto v = gate(confident_block(299));
  EXPECT_TRUE(v.flagged);
  EXPECT_EQ(v.trigger, GateTrigger::small_volume);
  EXPECT_EQ(v.predicted_volume_voxels, 299u);
  EXPECT_EQ(v.uncertainty_ratio, 0.0);
}

TEST(Gate, VolumeAtTheLimitPasses) {
  const auto v = gate(confident_block(300));
  EXPECT_FALSE(v.flagged);
  EXPECT_EQ(v.trigger, GateTrigger::none);
}

TEST(Gate, UniformlyUncertainPredictionFlags) {
  const auto v = gate(Volume(Grid({10, 10, 10}), 0.6));
  EXPECT_TRUE(v.flagged);
  EXPECT_EQ(v.trigger, GateTrigger::high_uncertainty);
  EXPECT_EQ(v.uncertainty_ratio, 1.0);
}

TEST(Gate, LowUncertaintyRatioPasses) {
  Volume p = confident_block(1000);
  for (std::size_t i = 0; i < 40; ++i) p[i] = 0.6;
  const auto v = gate(p);
  EXPECT_NEAR(v.uncertainty_ratio, 0.04, 1e-15);
  EXPECT_FALSE(v.flagged);
  for (std::size_t i = 40; i < 60; ++i) p[i] = 0.6;
  EXPECT_EQ(gate(p).trigger, GateTrigger::high_uncertainty);
}

TEST(Gate, BothTriggers) {
  const auto v = gate(confident_block(100, 0.6));
  EXPECT_EQ(v.trigger, GateTrigger::both);
}

TEST(Gate, EmptyPredictionIsSmall) {
  const auto v = gate(Volume(Grid({4, 4, 4}), 0.0));
  EXPECT_TRUE(v.flagged);
  EXPECT_EQ(v.predicted_volume_voxels, 0u);
  EXPECT_EQ(v.uncertainty_ratio, 0.0);
  EXPECT_EQ(v.trigger, GateTrigger::small_volume);
}

TEST(Gate, ThresholdIsStrict) {
  Volume p = confident_block(400);
  for (std::size_t i = 400; i < 600; ++i) p[i] = 0.5;
  EXPECT_EQ(gate(p).predicted_volume_voxels, 400u);
}

TEST(Gate, BandIsOpen) {
  Volume p = confident_block(1000);
  for (std::size_t i = 0; i < 500; ++i) p[i] = 0.7;
  EXPECT_FALSE(gate(p).flagged);
}

TEST(Gate, ValidationAndNames) {
  GateThresholds t;
  t.uncertain_low = 0.8;
  EXPECT_THROW(gate(Volume(Grid({2, 2, 2})), t), InvalidArgument);
  for (auto tr : {GateTrigger::none, GateTrigger::small_volume, GateTrigger::high_uncertainty, GateTrigger::both})
    EXPECT_EQ(gate_trigger_from_string(to_string(tr)), tr);
  EXPECT_THROW(gate_trigger_from_string("sometimes"), InvalidArgument);
}
