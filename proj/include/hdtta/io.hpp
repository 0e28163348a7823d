#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hdtta/gatekeeper.hpp"
#include "hdtta/metrics.hpp"
#include "hdtta/phantom.hpp"
#include "hdtta/pipeline.hpp"
#include "hdtta/volume.hpp"

namespace hdtta::io {

// Volume file layout (all integers little-endian):
//   0  magic "HDTV"
//   4  u16 version (1)
//   6  u16 dtype (1 = f32, 2 = f64, 3 = u8 mask)
//   8  u32 nx, ny, nz
//   20 f64 sx, sy, sz
//   44 payload, x fastest
//   .. u32 CRC-32 (IEEE) of the payload bytes
enum class DType : std::uint16_t { f32 = 1, f64 = 2, u8_mask = 3 };

inline constexpr std::uint16_t kVolumeFormatVersion = 1;
inline constexpr std::size_t kVolumeHeaderBytes = 44;
inline constexpr int kReportSchemaVersion = 1;

std::size_t dtype_size(DType t);

std::vector<std::uint8_t> encode_volume(const Volume& v, DType dtype = DType::f64);
std::vector<std::uint8_t> encode_mask(const Mask& m);

struct DecodedHeader {
  std::uint16_t version = 0;
  DType dtype = DType::f64;
  Grid grid;
};

DecodedHeader decode_header(std::span<const std::uint8_t> bytes);
/// Accepts any dtype; masks decode to 0/1 values.
Volume decode_volume(std::span<const std::uint8_t> bytes);
/// Accepts only the mask dtype.
Mask decode_mask(std::span<const std::uint8_t> bytes);

void write_volume(const std::filesystem::path& path, const Volume& v, DType dtype = DType::f64);
void write_mask(const std::filesystem::path& path, const Mask& m);
Volume read_volume(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Writes text to a file, throwing InvalidArgument naming the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// JSON (structured text) encodings.
nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);  // missing keys keep defaults

nlohmann::json to_json(const GateVerdict& v);
GateVerdict gate_verdict_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SelectionResult& s);
SelectionResult selection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunReport& r, bool include_timing = true);
/// The final mask itself is not part of the report; only its count and CRC.
RunReport run_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricSet& m);
nlohmann::json to_json(const CohortStats& s);
nlohmann::json to_json(const WilcoxonResult& w);

nlohmann::json to_json(const PhantomSpec& s);
PhantomSpec phantom_spec_from_json(const nlohmann::json& j);  // missing keys keep defaults

/// One CSV row per case: case_id,dice,hd95_mm,precision,flagged,source
struct CaseMetricsRow {
  std::string case_id;
  MetricSet metrics;
  bool flagged = false;
  MaskSource source = MaskSource::baseline;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const CaseMetricsRow& row);

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

}  // namespace hdtta::io
