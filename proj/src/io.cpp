#include "hdtta/io.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "hdtta/errors.hpp"

namespace hdtta::io {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  const U u = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(in[offset + b]) << (8 * b);
  return std::bit_cast<T>(u);
}

void put_header(std::vector<std::uint8_t>& out, DType dtype, const Grid& g) {
  out.insert(out.end(), {'H', 'D', 'T', 'V'});
  put_le(out, kVolumeFormatVersion);
  put_le(out, static_cast<std::uint16_t>(dtype));
  for (auto d : g.dims) {
    if (d > 0xFFFFFFFFu) throw InvalidArgument("volume dimension exceeds u32 range");
    put_le(out, static_cast<std::uint32_t>(d));
  }
  for (double s : g.spacing) put_le(out, s);
}

void put_crc(std::vector<std::uint8_t>& out) {
  const auto payload = std::span<const std::uint8_t>(out).subspan(kVolumeHeaderBytes);
  put_le(out, crc32(payload));
}

// Validates framing and CRC, returning the payload view.
std::span<const std::uint8_t> checked_payload(std::span<const std::uint8_t> bytes,
                                              const DecodedHeader& h) {
  const std::size_t payload = h.grid.size() * dtype_size(h.dtype);
  const std::size_t expected = kVolumeHeaderBytes + payload + 4;
  if (bytes.size() < expected)
    throw Truncated("volume file truncated: expected " + std::to_string(expected) + " bytes, got " +
                    std::to_string(bytes.size()));
  if (bytes.size() > expected)
    throw FormatError("volume file has " + std::to_string(bytes.size() - expected) +
                      " unexpected trailing bytes");
  const auto view = bytes.subspan(kVolumeHeaderBytes, payload);
  const std::uint32_t stored = get_le<std::uint32_t>(bytes, kVolumeHeaderBytes + payload);
  if (crc32(view) != stored) throw CrcMismatch("volume payload CRC mismatch");
  return view;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("failed writing file: " + path.string());
}

}  // namespace

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::f32: return 4;
    case DType::f64: return 8;
    case DType::u8_mask: return 1;
  }
  throw FormatError("unknown dtype");
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    c = ::crc32(c, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> encode_volume(const Volume& v, DType dtype) {
  std::vector<std::uint8_t> out;
  out.reserve(kVolumeHeaderBytes + v.size() * dtype_size(dtype) + 4);
  put_header(out, dtype, v.grid());
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (dtype) {
      case DType::f64: put_le(out, v[i]); break;
      case DType::f32: put_le(out, static_cast<float>(v[i])); break;
      case DType::u8_mask: out.push_back(v[i] != 0.0 ? 1 : 0); break;
    }
  }
  put_crc(out);
  return out;
}

std::vector<std::uint8_t> encode_mask(const Mask& m) {
  std::vector<std::uint8_t> out;
  out.reserve(kVolumeHeaderBytes + m.size() + 4);
  put_header(out, DType::u8_mask, m.grid());
  out.insert(out.end(), m.bytes().begin(), m.bytes().end());
  put_crc(out);
  return out;
}

DecodedHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "HDTV", 4) != 0) {
    if (bytes.size() < 4) throw Truncated("volume file shorter than its magic");
    throw BadMagic("not a volume file (bad magic)");
  }
  if (bytes.size() < kVolumeHeaderBytes) throw Truncated("volume file header truncated");
  DecodedHeader h;
  h.version = get_le<std::uint16_t>(bytes, 4);
  if (h.version != kVolumeFormatVersion)
    throw UnsupportedVersion("unsupported volume format version " + std::to_string(h.version));
  const auto tag = get_le<std::uint16_t>(bytes, 6);
  if (tag < 1 || tag > 3) throw FormatError("unknown dtype tag " + std::to_string(tag));
  h.dtype = static_cast<DType>(tag);
  std::array<std::size_t, 3> dims{};
  std::array<double, 3> spacing{};
  for (int a = 0; a < 3; ++a) dims[a] = get_le<std::uint32_t>(bytes, 8 + 4 * a);
  for (int a = 0; a < 3; ++a) spacing[a] = get_le<double>(bytes, 20 + 8 * a);
  try {
    h.grid = Grid(dims, spacing);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid volume geometry: ") + e.what());
  }
  return h;
}

Volume decode_volume(std::span<const std::uint8_t> bytes) {
  const DecodedHeader h = decode_header(bytes);
  const auto payload = checked_payload(bytes, h);
  Volume v(h.grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (h.dtype) {
      case DType::f64: v[i] = get_le<double>(payload, 8 * i); break;
      case DType::f32: v[i] = get_le<float>(payload, 4 * i); break;
      case DType::u8_mask: v[i] = payload[i] ? 1.0 : 0.0; break;
    }
  }
  if (!v.all_finite()) throw FormatError("volume file contains non-finite values");
  return v;
}

Mask decode_mask(std::span<const std::uint8_t> bytes) {
  const DecodedHeader h = decode_header(bytes);
  if (h.dtype != DType::u8_mask) throw FormatError("expected a mask file (u8 dtype)");
  const auto payload = checked_payload(bytes, h);
  return Mask(h.grid, std::vector<std::uint8_t>(payload.begin(), payload.end()));
}

void write_volume(const std::filesystem::path& path, const Volume& v, DType dtype) {
  write_bytes(path, encode_volume(v, dtype));
}

void write_mask(const std::filesystem::path& path, const Mask& m) { write_bytes(path, encode_mask(m)); }

Volume read_volume(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_volume(bytes);
  } catch (const FormatError& e) {
    throw;  // message already specific; callers add the path
  }
}

Mask read_mask(const std::filesystem::path& path) { return decode_mask(read_bytes(path)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open file for writing: " + path.string());
  out << text;
  if (!out) throw InvalidArgument("failed writing file: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// Reads j[key] into out when present; rejects keys outside `allowed`.
void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items())
    if (!ok.count(k)) throw InvalidArgument(std::string("unknown key '") + k + "' in " + where);
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

}  // namespace

json to_json(const PipelineConfig& c) {
  return json{
      {"mode", to_string(c.mode)},
      {"parallel_hypotheses", c.parallel_hypotheses},
      {"gate",
       {{"min_volume_voxels", c.gate.min_volume_voxels},
        {"uncertain_low", c.gate.uncertain_low},
        {"uncertain_high", c.gate.uncertain_high},
        {"max_uncertainty_ratio", c.gate.max_uncertainty_ratio},
        {"tumor_threshold", c.gate.tumor_threshold}}},
      {"compact",
       {{"lambda_ent", c.compact.lambda_ent},
        {"lambda_tv", c.compact.lambda_tv},
        {"lambda_grav", c.compact.lambda_grav},
        {"lambda_anc", c.compact.lambda_anc}}},
      {"diffuse",
       {{"lambda_ent", c.diffuse.lambda_ent},
        {"lambda_geo", c.diffuse.lambda_geo},
        {"lambda_inf", c.diffuse.lambda_inf},
        {"lambda_anc", c.diffuse.lambda_anc}}},
      {"optimizer",
       {{"lr", c.protocol.lr},
        {"steps", c.protocol.steps},
        {"beta1", c.protocol.beta1},
        {"beta2", c.protocol.beta2},
        {"eps", c.protocol.eps}}},
      {"edge_map",
       {{"sigma_mm", c.edge.sigma_mm},
        {"alpha", c.edge.alpha},
        {"norm_percentile", c.edge.norm_percentile}}},
      {"selector",
       {{"core_threshold", c.selector.core_threshold},
        {"accept", c.selector.accept},
        {"gamma", c.selector.gamma},
        {"eps", c.selector.eps},
        {"mask_threshold", c.selector.mask_threshold}}},
  };
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig c;
  reject_unknown(j, {"mode", "parallel_hypotheses", "gate", "compact", "diffuse", "optimizer", "edge_map", "selector"},
                 "config");
  if (auto it = j.find("mode"); it != j.end()) c.mode = mode_from_string(it->get<std::string>());
  read_opt(j, "parallel_hypotheses", c.parallel_hypotheses);
  if (auto it = j.find("gate"); it != j.end()) {
    const json& g = *it;
    reject_unknown(g, {"min_volume_voxels", "uncertain_low", "uncertain_high", "max_uncertainty_ratio", "tumor_threshold"},
                   "config.gate");
    read_opt(g, "min_volume_voxels", c.gate.min_volume_voxels);
    read_opt(g, "uncertain_low", c.gate.uncertain_low);
    read_opt(g, "uncertain_high", c.gate.uncertain_high);
    read_opt(g, "max_uncertainty_ratio", c.gate.max_uncertainty_ratio);
    read_opt(g, "tumor_threshold", c.gate.tumor_threshold);
  }
  if (auto it = j.find("compact"); it != j.end()) {
    reject_unknown(*it, {"lambda_ent", "lambda_tv", "lambda_grav", "lambda_anc"}, "config.compact");
    read_opt(*it, "lambda_ent", c.compact.lambda_ent);
    read_opt(*it, "lambda_tv", c.compact.lambda_tv);
    read_opt(*it, "lambda_grav", c.compact.lambda_grav);
    read_opt(*it, "lambda_anc", c.compact.lambda_anc);
  }
  if (auto it = j.find("diffuse"); it != j.end()) {
    reject_unknown(*it, {"lambda_ent", "lambda_geo", "lambda_inf", "lambda_anc"}, "config.diffuse");
    read_opt(*it, "lambda_ent", c.diffuse.lambda_ent);
    read_opt(*it, "lambda_geo", c.diffuse.lambda_geo);
    read_opt(*it, "lambda_inf", c.diffuse.lambda_inf);
    read_opt(*it, "lambda_anc", c.diffuse.lambda_anc);
  }
  if (auto it = j.find("optimizer"); it != j.end()) {
    reject_unknown(*it, {"lr", "steps", "beta1", "beta2", "eps"}, "config.optimizer");
    read_opt(*it, "lr", c.protocol.lr);
    read_opt(*it, "steps", c.protocol.steps);
    read_opt(*it, "beta1", c.protocol.beta1);
    read_opt(*it, "beta2", c.protocol.beta2);
    read_opt(*it, "eps", c.protocol.eps);
  }
  if (auto it = j.find("edge_map"); it != j.end()) {
    reject_unknown(*it, {"sigma_mm", "alpha", "norm_percentile"}, "config.edge_map");
    read_opt(*it, "sigma_mm", c.edge.sigma_mm);
    read_opt(*it, "alpha", c.edge.alpha);
    read_opt(*it, "norm_percentile", c.edge.norm_percentile);
  }
  if (auto it = j.find("selector"); it != j.end()) {
    reject_unknown(*it, {"core_threshold", "accept", "gamma", "eps", "mask_threshold"}, "config.selector");
    read_opt(*it, "core_threshold", c.selector.core_threshold);
    read_opt(*it, "accept", c.selector.accept);
    read_opt(*it, "gamma", c.selector.gamma);
    read_opt(*it, "eps", c.selector.eps);
    read_opt(*it, "mask_threshold", c.selector.mask_threshold);
  }
  c.validate();
  return c;
}

json to_json(const GateVerdict& v) {
  return json{{"flagged", v.flagged},
              {"predicted_volume_voxels", v.predicted_volume_voxels},
              {"uncertainty_ratio", v.uncertainty_ratio},
              {"trigger", to_string(v.trigger)}};
}

GateVerdict gate_verdict_from_json(const json& j) {
  GateVerdict v;
  v.flagged = j.at("flagged").get<bool>();
  v.predicted_volume_voxels = j.at("predicted_volume_voxels").get<std::size_t>();
  v.uncertainty_ratio = j.at("uncertainty_ratio").get<double>();
  v.trigger = gate_trigger_from_string(j.at("trigger").get<std::string>());
  return v;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json to_json(const TraceSummary& t) {
  return json{{"initial_loss", t.initial_loss},
              {"final_loss", t.final_loss},
              {"steps", t.steps},
              {"loss_values", t.loss_values}};
}

TraceSummary trace_from_json(Hypothesis h, const json& j) {
  TraceSummary t;
  t.hypothesis = h;
  t.initial_loss = j.at("initial_loss").get<double>();
  t.final_loss = j.at("final_loss").get<double>();
  t.steps = j.at("steps").get<std::size_t>();
  t.loss_values = j.at("loss_values").get<std::vector<double>>();
  return t;
}

}  // namespace

json to_json(const SelectionResult& s) {
  return json{{"chosen", to_string(s.chosen)},
              {"s_rep", optional_number(s.s_rep)},
              {"core_voxels", s.core_voxels},
              {"delta_voxels", s.delta_voxels},
              {"mu_core", optional_number(s.mu_core)},
              {"sigma_core", optional_number(s.sigma_core)},
              {"mu_delta", optional_number(s.mu_delta)}};
}

SelectionResult selection_from_json(const json& j) {
  SelectionResult s;
  s.chosen = hypothesis_from_string(j.at("chosen").get<std::string>());
  s.s_rep = read_optional_number(j, "s_rep");
  s.core_voxels = j.at("core_voxels").get<std::size_t>();
  s.delta_voxels = j.at("delta_voxels").get<std::size_t>();
  s.mu_core = read_optional_number(j, "mu_core");
  s.sigma_core = read_optional_number(j, "sigma_core");
  s.mu_delta = read_optional_number(j, "mu_delta");
  return s;
}

json to_json(const RunReport& r, bool include_timing) {
  json hyp = json::object();
  if (r.compact_trace) hyp["compact"] = to_json(*r.compact_trace);
  if (r.diffuse_trace) hyp["diffuse"] = to_json(*r.diffuse_trace);
  json j{{"schema_version", kReportSchemaVersion},
         {"case_id", r.case_id},
         {"config", to_json(r.config)},
         {"gate", to_json(r.gate)},
         {"hypotheses", hyp},
         {"selection", r.selection ? to_json(*r.selection) : json(nullptr)},
         {"source", to_string(r.source)},
         {"final_volume_voxels", r.final_volume_voxels},
         {"final_mask_crc32", crc32(r.final_mask.bytes())}};
  if (include_timing) {
    j["timings_s"] = {{"gate", r.timings.gate_s},
                      {"refine", r.timings.refine_s},
                      {"select", r.timings.select_s},
                      {"total", r.timings.total_s}};
  }
  return j;
}

RunReport run_report_from_json(const json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kReportSchemaVersion)
    throw InvalidArgument("unsupported report schema version " + std::to_string(version));
  RunReport r;
  r.case_id = j.at("case_id").get<std::string>();
  r.config = pipeline_config_from_json(j.at("config"));
  r.gate = gate_verdict_from_json(j.at("gate"));
  const json& hyp = j.at("hypotheses");
  if (auto it = hyp.find("compact"); it != hyp.end()) r.compact_trace = trace_from_json(Hypothesis::compact, *it);
  if (auto it = hyp.find("diffuse"); it != hyp.end()) r.diffuse_trace = trace_from_json(Hypothesis::diffuse, *it);
  if (!j.at("selection").is_null()) r.selection = selection_from_json(j.at("selection"));
  r.source = mask_source_from_string(j.at("source").get<std::string>());
  r.final_volume_voxels = j.at("final_volume_voxels").get<std::size_t>();
  if (auto it = j.find("timings_s"); it != j.end()) {
    r.timings.gate_s = it->at("gate").get<double>();
    r.timings.refine_s = it->at("refine").get<double>();
    r.timings.select_s = it->at("select").get<double>();
    r.timings.total_s = it->at("total").get<double>();
  }
  return r;
}

json to_json(const MetricSet& m) {
  return json{{"dice", m.dice}, {"hd95_mm", m.hd95_mm}, {"precision", m.precision}};
}

json to_json(const CohortStats& s) {
  auto stat = [](const SummaryStat& v) { return json{{"mean", v.mean}, {"std", v.std}}; };
  return json{{"n", s.n},
              {"single_case", s.single_case},
              {"dice", stat(s.dice)},
              {"hd95_mm", stat(s.hd95_mm)},
              {"precision", stat(s.precision)}};
}

json to_json(const WilcoxonResult& w) {
  return json{{"p_value", w.p_value},       {"p_adjusted", w.p_adjusted},
              {"w_plus", w.w_plus},         {"n_nonzero", w.n_nonzero},
              {"exact", w.exact},           {"degenerate", w.degenerate},
              {"underpowered", w.underpowered}};
}

json to_json(const PhantomSpec& s) {
  json j{{"dims", s.dims},
         {"spacing", s.spacing},
         {"seed", s.seed},
         {"scenario", to_string(s.scenario)},
         {"channels", s.channels},
         {"center_mm", s.center_mm ? json(*s.center_mm) : json(nullptr)},
         {"radii_mm", s.radii_mm},
         {"center_jitter_mm", s.center_jitter_mm},
         {"radius_jitter", s.radius_jitter},
         {"tumor_mean", s.tumor_mean},
         {"tumor_std", s.tumor_std},
         {"background_mean", s.background_mean},
         {"background_std", s.background_std},
         {"edge_contrast", s.edge_contrast},
         {"shell_gap_mm", s.shell_gap_mm},
         {"shell_thickness_mm", s.shell_thickness_mm},
         {"mismatch_sigmas", s.mismatch_sigmas},
         {"confidence_scale", s.confidence_scale},
         {"uncertain_logit", s.uncertain_logit},
         {"uncertain_band_mm", s.uncertain_band_mm},
         {"shrink_margin_mm", s.shrink_margin_mm},
         {"rim_logit", s.rim_logit},
         {"island_offset_mm", s.island_offset_mm},
         {"island_radius_mm", s.island_radius_mm},
         {"island_visible", s.island_visible},
         {"small_radii_mm", s.small_radii_mm},
         {"fragment_count", s.fragment_count},
         {"fragment_radius_mm", s.fragment_radius_mm},
         {"background_ramp_mm", s.background_ramp_mm},
         {"background_near_logit", s.background_near_logit}};
  return j;
}

PhantomSpec phantom_spec_from_json(const json& j) {
  reject_unknown(j,
                 {"dims", "spacing", "seed", "scenario", "channels", "center_mm", "radii_mm",
                  "center_jitter_mm", "radius_jitter", "tumor_mean", "tumor_std", "background_mean",
                  "background_std", "edge_contrast", "shell_gap_mm", "shell_thickness_mm",
                  "mismatch_sigmas", "confidence_scale", "uncertain_logit", "uncertain_band_mm",
                  "shrink_margin_mm", "rim_logit", "island_offset_mm", "island_radius_mm",
                  "island_visible", "small_radii_mm", "fragment_count", "fragment_radius_mm", "background_ramp_mm", "background_near_logit"},
                 "phantom spec");
  PhantomSpec s;
  read_opt(j, "dims", s.dims);
  read_opt(j, "spacing", s.spacing);
  read_opt(j, "seed", s.seed);
  if (auto it = j.find("scenario"); it != j.end()) s.scenario = scenario_from_string(it->get<std::string>());
  read_opt(j, "channels", s.channels);
  if (auto it = j.find("center_mm"); it != j.end() && !it->is_null())
    s.center_mm = it->get<std::array<double, 3>>();
  read_opt(j, "radii_mm", s.radii_mm);
  read_opt(j, "center_jitter_mm", s.center_jitter_mm);
  read_opt(j, "radius_jitter", s.radius_jitter);
  read_opt(j, "tumor_mean", s.tumor_mean);
  read_opt(j, "tumor_std", s.tumor_std);
  read_opt(j, "background_mean", s.background_mean);
  read_opt(j, "background_std", s.background_std);
  read_opt(j, "edge_contrast", s.edge_contrast);
  read_opt(j, "shell_gap_mm", s.shell_gap_mm);
  read_opt(j, "shell_thickness_mm", s.shell_thickness_mm);
  read_opt(j, "mismatch_sigmas", s.mismatch_sigmas);
  read_opt(j, "confidence_scale", s.confidence_scale);
  read_opt(j, "uncertain_logit", s.uncertain_logit);
  read_opt(j, "uncertain_band_mm", s.uncertain_band_mm);
  read_opt(j, "shrink_margin_mm", s.shrink_margin_mm);
  read_opt(j, "rim_logit", s.rim_logit);
  read_opt(j, "island_offset_mm", s.island_offset_mm);
  read_opt(j, "island_radius_mm", s.island_radius_mm);
  read_opt(j, "island_visible", s.island_visible);
  read_opt(j, "small_radii_mm", s.small_radii_mm);
  read_opt(j, "fragment_count", s.fragment_count);
  read_opt(j, "fragment_radius_mm", s.fragment_radius_mm);
  read_opt(j, "background_ramp_mm", s.background_ramp_mm);
  read_opt(j, "background_near_logit", s.background_near_logit);
  return s;
}

std::string metrics_csv_header() { return "case_id,dice,hd95_mm,precision,flagged,source"; }

std::string metrics_csv_row(const CaseMetricsRow& r) {
  return r.case_id + "," + format_double(r.metrics.dice) + "," + format_double(r.metrics.hd95_mm) + "," +
         format_double(r.metrics.precision) + "," + (r.flagged ? "true" : "false") + "," +
         std::string(to_string(r.source));
}

}  // namespace hdtta::io
