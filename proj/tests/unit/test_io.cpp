#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "hdtta/errors.hpp"
#include "hdtta/io.hpp"
#include "hdtta/phantom.hpp"

using namespace hdtta;
namespace fs = std::filesystem;

namespace {

Volume sample() {
  Volume v(Grid({3, 2, 2}, {0.5, 1.0, 2.5}));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 0.37;
  return v;
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hdtta_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(VolumeFile, RoundTripF64IsExact) {
  const Volume v = sample();
  EXPECT_EQ(io::decode_volume(io::encode_volume(v)), v);
  const auto bytes = io::encode_volume(v);
  EXPECT_EQ(bytes.size(), io::kVolumeHeaderBytes + 12 * 8 + 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "HDTV");
}

TEST(VolumeFile, RoundTripF32IsClose) {
  const Volume v = sample();
  const Volume w = io::decode_volume(io::encode_volume(v, io::DType::f32));
  ASSERT_EQ(w.grid(), v.grid());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(w[i], v[i], 1e-7);
}

TEST(VolumeFile, MaskRoundTrip) {
  const Mask m(Grid({4, 1, 1}), {1, 0, 1, 1});
  EXPECT_EQ(io::decode_mask(io::encode_mask(m)), m);
  EXPECT_THROW(io::decode_mask(io::encode_volume(sample())), FormatError);
}

TEST(VolumeFile, DistinctErrors) {
  const auto good = io::encode_volume(sample());
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_volume(bad), BadMagic);
  bad = good;
  bad[4] = 9;
  EXPECT_THROW(io::decode_volume(bad), UnsupportedVersion);
  bad = good;
  bad[io::kVolumeHeaderBytes + 3] ^= 0x10;
  EXPECT_THROW(io::decode_volume(bad), CrcMismatch);
  bad.assign(good.begin(), good.end() - 5);
  EXPECT_THROW(io::decode_volume(bad), Truncated);
  bad.assign(good.begin(), good.begin() + 20);
  EXPECT_THROW(io::decode_volume(bad), Truncated);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(io::decode_volume(bad), FormatError);
  bad = good;
  bad[6] = 7;
  EXPECT_THROW(io::decode_volume(bad), FormatError);
}

TEST(VolumeFile, NonFiniteRejected) {
  Volume v = sample();
  v[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(io::decode_volume(io::encode_volume(v)), FormatError);
}

TEST(VolumeFile, DiskRoundTripAndMissingFile) {
  const auto p = temp_path("v.hdtv");
  io::write_volume(p, sample());
  EXPECT_EQ(io::read_volume(p), sample());
  EXPECT_THROW(io::read_volume(temp_path("absent.hdtv")), InvalidArgument);
}

TEST(Crc32, KnownCheckValue) {
  const std::string s = "123456789";
  const std::vector<std::uint8_t> b(s.begin(), s.end());
  EXPECT_EQ(io::crc32(b), 0xCBF43926u);
}

TEST(ConfigJson, RoundTripAndDefaults) {
  PipelineConfig c;
  c.mode = Mode::no_edge_map;
  c.compact.lambda_tv = 0.75;
  c.protocol.steps = 12;
  c.gate.min_volume_voxels = 10;
  c.selector.gamma = 2.0;
  c.edge.alpha = 3.0;
  EXPECT_EQ(io::pipeline_config_from_json(io::to_json(c)), c);
  EXPECT_EQ(io::pipeline_config_from_json(nlohmann::json::object()), PipelineConfig{});
  const auto partial = io::pipeline_config_from_json(nlohmann::json::parse(R"({"optimizer": {"steps": 5}})"));
  EXPECT_EQ(partial.protocol.steps, 5u);
  EXPECT_EQ(partial.protocol.lr, 0.1);
}

TEST(ConfigJson, Rejections) {
  EXPECT_THROW(io::pipeline_config_from_json(nlohmann::json::parse(R"({"optimiser": {}})")), InvalidArgument);
  EXPECT_THROW(io::pipeline_config_from_json(nlohmann::json::parse(R"({"compact": {"lambda_x": 1}})")),
               InvalidArgument);
  EXPECT_THROW(io::pipeline_config_from_json(nlohmann::json::parse(R"({"optimizer": {"lr": -1}})")),
               InvalidArgument);
  EXPECT_THROW(io::pipeline_config_from_json(nlohmann::json::parse(R"({"mode": "most"})")), InvalidArgument);
}

TEST(ReportJson, RoundTrip) {
  PhantomSpec spec;
  spec.scenario = Scenario::under_segmented_matched;
  const auto ph = generate(spec);
  PipelineConfig cfg;
  cfg.protocol.steps = 4;
  const RunReport r = run_case(ph.case_data, cfg);
  const auto j = io::to_json(r);
  EXPECT_EQ(j["schema_version"], io::kReportSchemaVersion);
  EXPECT_EQ(j["final_mask_crc32"], io::crc32(r.final_mask.bytes()));
  const RunReport back = io::run_report_from_json(j);
  EXPECT_EQ(back.case_id, r.case_id);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.gate, r.gate);
  EXPECT_EQ(back.compact_trace, r.compact_trace);
  EXPECT_EQ(back.diffuse_trace, r.diffuse_trace);
  EXPECT_EQ(back.selection, r.selection);
  EXPECT_EQ(back.source, r.source);
  EXPECT_EQ(back.final_volume_voxels, r.final_volume_voxels);
  EXPECT_FALSE(io::to_json(r, false).contains("timings_s"));
}

TEST(PhantomJson, RoundTrip) {
  PhantomSpec s;
  s.scenario = Scenario::fragmented_small;
  s.center_mm = std::array<double, 3>{15.0, 16.0, 14.5};
  s.seed = 77;
  s.island_visible = false;
  EXPECT_EQ(io::phantom_spec_from_json(io::to_json(s)), s);
  EXPECT_THROW(io::phantom_spec_from_json(nlohmann::json::parse(R"({"radius": 3})")), InvalidArgument);
}

TEST(Csv, RowFormat) {
  EXPECT_EQ(io::metrics_csv_header(), "case_id,dice,hd95_mm,precision,flagged,source");
  const io::CaseMetricsRow row{"c1", {0.5, 1.25, 1.0}, true, MaskSource::diffuse};
  EXPECT_EQ(io::metrics_csv_row(row), "c1,0.5,1.25,1,true,diffuse");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}
