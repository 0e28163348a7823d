#include "hdtta/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hdtta/errors.hpp"

namespace hdtta {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed + kGolden * (stream + 1))) {}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix(key_ + kGolden * (counter + 1));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t i) const {
  const double u1 = uniform(2 * i);
  const double u2 = uniform(2 * i + 1);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::clean_confident: return "clean_confident";
    case Scenario::noise_island: return "noise_island";
    case Scenario::under_segmented_matched: return "under_segmented_matched";
    case Scenario::under_segmented_mismatched: return "under_segmented_mismatched";
    case Scenario::fragmented_small: return "fragmented_small";
  }
  return "clean_confident";
}

Scenario scenario_from_string(std::string_view s) {
  for (Scenario sc : kAllScenarios)
    if (to_string(sc) == s) return sc;
  throw InvalidArgument("unknown scenario '" + std::string(s) + "'");
}

namespace {

// RNG streams.
constexpr std::uint64_t kGeometryStream = 0;
constexpr std::uint64_t kFragmentStream = 1;
constexpr std::uint64_t kNoiseStreamBase = 16;  // + channel index

using Vec3 = std::array<double, 3>;

struct Ellipsoid {
  Vec3 center;
  Vec3 radii;

  // Normalized radius: <= 1 inside.
  double rho(const Vec3& p) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = (p[a] - center[a]) / radii[a];
      s += d * d;
    }
    return std::sqrt(s);
  }

  // First-order signed distance to the surface in mm (negative inside).
  double signed_distance(const Vec3& p) const {
    const double r = rho(p);
    if (r < 1e-12) return -*std::min_element(radii.begin(), radii.end());
    double g = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = (p[a] - center[a]) / (radii[a] * radii[a]);
      g += d * d;
    }
    return (r - 1.0) * r / std::sqrt(g);
  }
};

double distance(const Vec3& a, const Vec3& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

void require_fits(const Grid& grid, const Vec3& center, const Vec3& half_extent, const char* what) {
  for (int a = 0; a < 3; ++a) {
    const double margin = 2.0 * grid.spacing[a];
    const double hi = static_cast<double>(grid.dims[a] - 1) * grid.spacing[a];
    if (center[a] - half_extent[a] < margin || center[a] + half_extent[a] > hi - margin)
      throw GeometryError(std::string(what) + " does not fit inside the volume with a 2-voxel margin (axis " +
                          std::to_string(a) + ")");
  }
}

Vec3 position(const Grid& g, std::size_t x, std::size_t y, std::size_t z) {
  return {static_cast<double>(x) * g.spacing[0], static_cast<double>(y) * g.spacing[1],
          static_cast<double>(z) * g.spacing[2]};
}

bool is_under_segmented(Scenario s) {
  return s == Scenario::under_segmented_matched || s == Scenario::under_segmented_mismatched;
}

}  // namespace

Phantom generate(const PhantomSpec& spec) {
  if (spec.channels == 0) throw InvalidArgument("phantom needs at least one channel");
  const Grid grid(spec.dims, spec.spacing);
  const CounterRng geo(spec.seed, kGeometryStream);

  Vec3 center;
  if (spec.center_mm) {
    center = *spec.center_mm;
  } else {
    for (int a = 0; a < 3; ++a) center[a] = 0.5 * static_cast<double>(grid.dims[a] - 1) * grid.spacing[a];
  }
  const bool fragmented = spec.scenario == Scenario::fragmented_small;
  Vec3 radii = fragmented ? spec.small_radii_mm : spec.radii_mm;
  for (int a = 0; a < 3; ++a) {
    center[a] += spec.center_jitter_mm * (2.0 * geo.uniform(static_cast<std::uint64_t>(a)) - 1.0);
    radii[a] *= 1.0 + spec.radius_jitter * (2.0 * geo.uniform(static_cast<std::uint64_t>(3 + a)) - 1.0);
    if (!(radii[a] > 0.0)) throw GeometryError("tumour radii must be positive");
  }
  const Ellipsoid tumor{center, radii};

  const double shell_outer = spec.edge_contrast != 0.0 ? spec.shell_gap_mm + spec.shell_thickness_mm : 0.0;
  {
    Vec3 half = radii;
    for (auto& h : half) h += shell_outer;
    require_fits(grid, center, half, "tumour");
  }

  Ellipsoid eroded = tumor;
  if (is_under_segmented(spec.scenario)) {
    for (auto& r : eroded.radii) {
      r -= spec.shrink_margin_mm;
      if (!(r > 0.0)) throw GeometryError("shrink margin exceeds a tumour radius");
    }
  }

  Vec3 island_center = center;
  island_center[0] += spec.island_offset_mm / std::numbers::sqrt2;
  island_center[1] += spec.island_offset_mm / std::numbers::sqrt2;
  const double island_outer = spec.island_radius_mm + spec.uncertain_band_mm;
  if (spec.scenario == Scenario::noise_island) {
    require_fits(grid, island_center, {island_outer, island_outer, island_outer}, "island");
    if (spec.island_offset_mm - island_outer <= std::max(radii[0], radii[1]) + shell_outer)
      throw GeometryError("island overlaps the tumour");
  }

  // Fragments: small balls on a ring inside the tumour.
  std::vector<Vec3> fragments;
  if (fragmented) {
    const CounterRng frag(spec.seed, kFragmentStream);
    const double ring = 0.55 * std::min({radii[0], radii[1]});
    for (std::size_t k = 0; k < spec.fragment_count; ++k) {
      const double angle = 2.0 * std::numbers::pi *
                           (static_cast<double>(k) + 0.25 * frag.uniform(k)) /
                           static_cast<double>(spec.fragment_count);
      Vec3 fc = center;
      fc[0] += ring * std::cos(angle);
      fc[1] += ring * std::sin(angle);
      fragments.push_back(fc);
    }
  }

  const std::size_t n = grid.size();
  std::vector<std::uint8_t> gt(n, 0);
  Volume logits(grid);
  PhantomAnnotations ann;
  ann.center_mm = center;
  ann.radii_mm = radii;
  ann.expected_flagged = spec.scenario != Scenario::clean_confident;

  const double s = spec.confidence_scale;
  const double rim_value = spec.tumor_mean - spec.mismatch_sigmas * spec.tumor_std;
  std::vector<double> mean(n), sd_noise(n);

  for (std::size_t z = 0, i = 0; z < grid.nz(); ++z)
    for (std::size_t y = 0; y < grid.ny(); ++y)
      for (std::size_t x = 0; x < grid.nx(); ++x, ++i) {
        const Vec3 p = position(grid, x, y, z);
        const double sd = tumor.signed_distance(p);
        const bool inside = tumor.rho(p) <= 1.0;
        gt[i] = inside ? 1 : 0;
        const double di = distance(p, island_center);
        const bool island_scene = spec.scenario == Scenario::noise_island && !inside;

        // Image template: partial-volume profile across one voxel.
        const double h = *std::min_element(grid.spacing.begin(), grid.spacing.end());
        const double t = std::clamp(0.5 - sd / h, 0.0, 1.0);
        double tumor_value = spec.tumor_mean;
        if (spec.scenario == Scenario::under_segmented_mismatched && eroded.rho(p) > 1.0)
          tumor_value = rim_value;
        mean[i] = spec.background_mean + (tumor_value - spec.background_mean) * t;
        sd_noise[i] = inside ? spec.tumor_std : spec.background_std;
        if (island_scene && spec.island_visible) {
          const double ti = std::clamp(0.5 - (di - spec.island_radius_mm) / h, 0.0, 1.0);
          mean[i] += (spec.tumor_mean - spec.background_mean) * ti;
          if (ti > 0.5) sd_noise[i] = spec.tumor_std;
        }
        if (spec.edge_contrast != 0.0 && sd > spec.shell_gap_mm && sd <= shell_outer) {
          mean[i] += spec.edge_contrast;
          ann.shell_voxels.push_back(i);
        }

        // Logits.
        double bg = -s;
        if (spec.background_ramp_mm > 0.0 && sd > 0.0) {
          const double f = std::min(1.0, sd / spec.background_ramp_mm);
          bg = -(spec.background_near_logit + (s - spec.background_near_logit) * f);
        }
        double zv = inside ? s : bg;
        if (island_scene) {
          if (di <= spec.island_radius_mm)
            zv = s;
          else if (di <= island_outer)
            zv = spec.uncertain_logit;
        } else if (is_under_segmented(spec.scenario) && inside && eroded.rho(p) > 1.0) {
          zv = spec.rim_logit;
        } else if (fragmented && inside) {
          bool in_fragment = false;
          for (const auto& fc : fragments) in_fragment |= distance(p, fc) <= spec.fragment_radius_mm;
          if (!in_fragment) zv = spec.rim_logit;
        }
        logits[i] = zv;
        if (island_scene && zv > 0.0) ann.island_voxels.push_back(i);
        if (inside && zv <= 0.0) ann.rim_voxels.push_back(i);
      }

  Case c;
  c.id = std::string(to_string(spec.scenario)) + "-" + std::to_string(spec.seed);
  c.logits0 = std::move(logits);
  for (std::size_t ch = 0; ch < spec.channels; ++ch) {
    const CounterRng noise(spec.seed, kNoiseStreamBase + ch);
    Volume img(grid);
    for (std::size_t i = 0; i < n; ++i) img[i] = mean[i] + sd_noise[i] * noise.normal(i);
    c.image.push_back(std::move(img));
  }

  return Phantom{std::move(c), Mask(grid, std::move(gt)), std::move(ann), spec};
}

std::vector<Phantom> cohort(const CohortTemplate& t) {
  std::vector<Phantom> out;
  std::uint64_t seed = t.first_seed;
  for (const auto& [scenario, count] : t.mix)
    for (std::size_t k = 0; k < count; ++k) {
      PhantomSpec spec = t.base;
      spec.scenario = scenario;
      spec.seed = seed++;
      out.push_back(generate(spec));
    }
  return out;
}

std::vector<Phantom> cohort(std::span<const PhantomSpec> specs) {
  std::vector<Phantom> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(generate(s));
  return out;
}

}  // namespace hdtta
