#include "hdtta/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hdtta/errors.hpp"
#include "hdtta/losses.hpp"
#include "hdtta/phantom.hpp"

namespace hdtta {

namespace {

struct Inputs {
  Volume z, z0, g;
};

// A term evaluated at z, with companion volumes (z0, g) from the same draw.
using TermFn = std::function<LossTermResult(const Volume& z, const Inputs& in)>;

Inputs random_inputs(std::uint64_t seed, std::uint64_t index, bool random_spacing) {
  const CounterRng rng(seed, 1000 + index);
  std::uint64_t k = 0;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  if (random_spacing)
    for (auto& s : spacing) s = 0.5 + 1.5 * rng.uniform(k++);
  const Grid grid({4, 4, 4}, spacing);
  Inputs in{Volume(grid), Volume(grid), Volume(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    in.z[i] = -3.0 + 6.0 * rng.uniform(k++);
    // anchor offsets kept away from zero so the relative error stays meaningful
    const double off = 0.5 + rng.uniform(k++);
    in.z0[i] = in.z[i] + (rng.uniform(k++) < 0.5 ? -off : off);
    in.g[i] = 0.05 + 0.95 * rng.uniform(k++);
  }
  return in;
}

std::vector<bool> kink_voxels(const Volume& z, double kink) {
  const Grid& g = z.grid();
  const Volume p = sigmoid(z);
  std::vector<bool> out(g.size(), false);
  for (std::size_t zz = 0; zz < g.nz(); ++zz)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        const std::size_t i = g.index(x, y, zz);
        const std::array<std::size_t, 3> c{x, y, zz};
        for (int a = 0; a < 3; ++a) {
          if (c[a] + 1 >= g.dims[a]) continue;
          const std::size_t j = i + g.stride(a);
          if (std::abs(p[j] - p[i]) < kink) out[i] = out[j] = true;
        }
      }
  return out;
}

TermCheck check(const std::string& name, const TermFn& fn, bool uses_kinks, bool random_spacing,
                const GradcheckOptions& opt) {
  TermCheck tc;
  tc.term = name;
  tc.tolerance = opt.tolerance;
  for (std::size_t v = 0; v < opt.volumes; ++v) {
    Inputs in = random_inputs(opt.seed, v, random_spacing);
    const LossTermResult res = fn(in.z, in);
    std::vector<bool> skip(in.z.size(), false);
    if (uses_kinks) skip = kink_voxels(in.z, opt.kink);
    Volume zp = in.z;
    for (std::size_t i = 0; i < in.z.size(); ++i) {
      if (skip[i]) {
        ++tc.excluded;
        continue;
      }
      zp[i] = in.z[i] + opt.step;
      const double up = fn(zp, in).value;
      zp[i] = in.z[i] - opt.step;
      const double dn = fn(zp, in).value;
      zp[i] = in.z[i];
      const double numeric = (up - dn) / (2.0 * opt.step);
      const double analytic = res.grad_z[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), opt.floor});
      tc.max_rel_error = std::max(tc.max_rel_error, std::abs(analytic - numeric) / denom);
      ++tc.checked;
    }
  }
  tc.passed = tc.max_rel_error < opt.tolerance;
  return tc;
}

}  // namespace

std::vector<TermCheck> run_gradcheck(const GradcheckOptions& opt) {
  if (opt.volumes == 0) throw InvalidArgument("gradcheck needs at least one volume");
  if (!(opt.step > 0.0) || !(opt.tolerance > 0.0)) throw InvalidArgument("gradcheck step and tolerance must be positive");

  const CompactConfig cc;
  const DiffuseConfig dc;
  auto plain = [](LossTermResult (*f)(const Volume&)) {
    return [f](const Volume& z, const Inputs&) { return f(z); };
  };

  std::vector<TermCheck> out;
  out.push_back(check("entropy", plain(entropy_term), false, false, opt));
  out.push_back(check("tv", plain(tv_term), true, false, opt));
  out.push_back(check("gravity", plain(gravity_term), false, true, opt));
  out.push_back(check("geodesic", [](const Volume& z, const Inputs& in) { return geodesic_term(z, in.g); },
                      true, false, opt));
  out.push_back(check("inflation", plain(inflation_term), false, false, opt));
  out.push_back(check("anchor", [](const Volume& z, const Inputs& in) { return anchor_term(z, in.z0); },
                      false, false, opt));
  out.push_back(check("compact", [&cc](const Volume& z, const Inputs& in) { return compact_loss(z, in.z0, cc); },
                      true, true, opt));
  out.push_back(check("diffuse",
                      [&dc](const Volume& z, const Inputs& in) { return diffuse_loss(z, in.z0, in.g, dc); },
                      true, false, opt));
  return out;
}

}  // namespace hdtta
