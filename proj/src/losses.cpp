#include "hdtta/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdtta/errors.hpp"
#include "numeric.hpp"

namespace hdtta {

std::string_view to_string(Hypothesis h) {
  return h == Hypothesis::compact ? "compact" : "diffuse";
}

Hypothesis hypothesis_from_string(std::string_view s) {
  if (s == "compact") return Hypothesis::compact;
  if (s == "diffuse") return Hypothesis::diffuse;
  throw InvalidArgument("unknown hypothesis '" + std::string(s) + "'");
}

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(name) + " must be a finite nonnegative number");
}

}  // namespace

void CompactConfig::validate() const {
  require_nonnegative(lambda_ent, "compact.lambda_ent");
  require_nonnegative(lambda_tv, "compact.lambda_tv");
  require_nonnegative(lambda_grav, "compact.lambda_grav");
  require_nonnegative(lambda_anc, "compact.lambda_anc");
}

void DiffuseConfig::validate() const {
  require_nonnegative(lambda_ent, "diffuse.lambda_ent");
  require_nonnegative(lambda_geo, "diffuse.lambda_geo");
  require_nonnegative(lambda_inf, "diffuse.lambda_inf");
  require_nonnegative(lambda_anc, "diffuse.lambda_anc");
}

namespace {

// Each kernel returns the unweighted term value and adds weight * dTerm/dP
// into dldp. Chaining to z happens once, in finish_gradient().

void compute_probabilities(const Volume& z, std::vector<double>& p, std::vector<double>& q) {
  p.resize(z.size());
  q.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) detail::sigmoid_pair(z[i], p[i], q[i]);
}

double entropy_kernel(std::span<const double> p, std::span<const double> q, double weight,
                      std::span<double> dldp) {
  const double inv_n = 1.0 / static_cast<double>(p.size());
  const double scale = weight * inv_n;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lp = std::log(std::clamp(p[i], kEntropyClamp, 1.0 - kEntropyClamp));
    const double lq = std::log(std::clamp(q[i], kEntropyClamp, 1.0 - kEntropyClamp));
    sum -= p[i] * lp + q[i] * lq;
    dldp[i] += scale * (lq - lp);
  }
  return sum * inv_n;
}

// Shared by TV (g == nullptr) and geodesic terms so that g == 1 reproduces TV
// bit for bit.
double tv_kernel(const Grid& grid, std::span<const double> p, const double* g, double weight,
                 std::span<double> dldp) {
  const std::size_t nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  const double inv_n = 1.0 / static_cast<double>(p.size());
  const double scale = weight * inv_n;
  constexpr double eps2 = kTvEpsilon * kTvEpsilon;
  double sum = 0.0;

  auto face = [&](std::size_t i, std::size_t j) {
    const double d = p[j] - p[i];
    const double r = std::sqrt(d * d + eps2);
    const double w = g ? 0.5 * (g[i] + g[j]) : 1.0;
    sum += w * (r - kTvEpsilon);
    const double dd = scale * w * (d / r);
    dldp[j] += dd;
    dldp[i] -= dd;
  };

  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t row = nx * (y + ny * z);
      for (std::size_t x = 0; x + 1 < nx; ++x) face(row + x, row + x + 1);
    }
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y + 1 < ny; ++y) {
      const std::size_t row = nx * (y + ny * z);
      for (std::size_t x = 0; x < nx; ++x) face(row + x, row + x + nx);
    }
  const std::size_t slab = nx * ny;
  for (std::size_t z = 0; z + 1 < nz; ++z)
    for (std::size_t k = 0; k < slab; ++k) face(z * slab + k, z * slab + k + slab);

  return sum * inv_n;
}

double gravity_kernel(const Grid& grid, std::span<const double> p, double weight,
                      std::span<double> dldp) {
  const std::size_t nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  const double sx = grid.spacing[0], sy = grid.spacing[1], sz = grid.spacing[2];

  double mass = 0.0, bx = 0.0, by = 0.0, bz = 0.0;
  for (std::size_t z = 0, i = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x, ++i) {
        mass += p[i];
        bx += p[i] * (static_cast<double>(x) * sx);
        by += p[i] * (static_cast<double>(y) * sy);
        bz += p[i] * (static_cast<double>(z) * sz);
      }
  const double w_total = mass + kGravityEpsilon;
  const double cx = bx / w_total, cy = by / w_total, cz = bz / w_total;

  double spread = 0.0;
  for (std::size_t z = 0, i = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x, ++i) {
        const double dx = static_cast<double>(x) * sx - cx;
        const double dy = static_cast<double>(y) * sy - cy;
        const double dz = static_cast<double>(z) * sz - cz;
        spread += p[i] * (dx * dx + dy * dy + dz * dz);
      }
  const double value = spread / w_total;

  // dV/dP_u = (|x_u - c|^2 - V) / W - 2 (eps / W) c.(x_u - c) / W
  const double inv_w = 1.0 / w_total;
  const double leak = 2.0 * kGravityEpsilon * inv_w * inv_w;
  for (std::size_t z = 0, i = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x, ++i) {
        const double dx = static_cast<double>(x) * sx - cx;
        const double dy = static_cast<double>(y) * sy - cy;
        const double dz = static_cast<double>(z) * sz - cz;
        const double r2 = dx * dx + dy * dy + dz * dz;
        const double dv = (r2 - value) * inv_w - leak * (cx * dx + cy * dy + cz * dz);
        dldp[i] += weight * dv;
      }
  return value;
}

double inflation_kernel(std::span<const double> p, double weight, std::span<double> dldp) {
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += p[i];
    dldp[i] -= weight * inv_n;
  }
  return -sum * inv_n;
}

// Operates on z directly: adds weight * dTerm/dz into dldz.
double anchor_kernel(std::span<const double> z, std::span<const double> z0, double weight,
                     std::span<double> dldz) {
  const double inv_n = 1.0 / static_cast<double>(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - z0[i];
    sum += d * d;
    dldz[i] += weight * 2.0 * d * inv_n;
  }
  return sum * inv_n;
}

// grad = P (1 - P) dL/dP
void chain_to_logits(std::span<const double> p, std::span<const double> q,
                     std::span<const double> dldp, Volume& grad) {
  for (std::size_t i = 0; i < p.size(); ++i) grad[i] = p[i] * q[i] * dldp[i];
}

// Evaluates a single probability-space term through the sigmoid.
template <typename Kernel>
LossTermResult probability_term(const Volume& z, Kernel kernel) {
  std::vector<double> p, q;
  compute_probabilities(z, p, q);
  std::vector<double> dldp(z.size(), 0.0);
  LossTermResult r;
  r.value = kernel(p, q, std::span<double>(dldp));
  r.grad_z = Volume(z.grid());
  chain_to_logits(p, q, dldp, r.grad_z);
  return r;
}

}  // namespace

LossTermResult entropy_term(const Volume& z) {
  return probability_term(z, [](const auto& p, const auto& q, std::span<double> d) {
    return entropy_kernel(p, q, 1.0, d);
  });
}

LossTermResult tv_term(const Volume& z) {
  return probability_term(z, [&](const auto& p, const auto&, std::span<double> d) {
    return tv_kernel(z.grid(), p, nullptr, 1.0, d);
  });
}

LossTermResult gravity_term(const Volume& z) {
  return probability_term(z, [&](const auto& p, const auto&, std::span<double> d) {
    return gravity_kernel(z.grid(), p, 1.0, d);
  });
}

LossTermResult geodesic_term(const Volume& z, const Volume& g) {
  require_same_grid(z.grid(), g.grid(), "geodesic_term");
  return probability_term(z, [&](const auto& p, const auto&, std::span<double> d) {
    return tv_kernel(z.grid(), p, g.values().data(), 1.0, d);
  });
}

LossTermResult inflation_term(const Volume& z) {
  return probability_term(z, [](const auto& p, const auto&, std::span<double> d) {
    return inflation_kernel(p, 1.0, d);
  });
}

LossTermResult anchor_term(const Volume& z, const Volume& z0) {
  require_same_grid(z.grid(), z0.grid(), "anchor_term");
  LossTermResult r;
  r.grad_z = Volume(z.grid());
  r.value = anchor_kernel(z.values(), z0.values(), 1.0, r.grad_z.values());
  return r;
}

LossTermResult compact_loss(const Volume& z, const Volume& z0, const CompactConfig& cfg) {
  auto objective = HypothesisObjective::compact(z0, cfg);
  LossTermResult r;
  r.value = objective.evaluate(z, r.grad_z);
  return r;
}

LossTermResult diffuse_loss(const Volume& z, const Volume& z0, const Volume& g,
                            const DiffuseConfig& cfg) {
  auto objective = HypothesisObjective::diffuse(z0, g, cfg);
  LossTermResult r;
  r.value = objective.evaluate(z, r.grad_z);
  return r;
}

HypothesisObjective::HypothesisObjective(Hypothesis h, const Volume& z0)
    : hypothesis_(h), z0_(z0) {}

HypothesisObjective HypothesisObjective::compact(const Volume& z0, const CompactConfig& cfg) {
  cfg.validate();
  HypothesisObjective o(Hypothesis::compact, z0);
  o.compact_ = cfg;
  return o;
}

HypothesisObjective HypothesisObjective::diffuse(const Volume& z0, const Volume& g,
                                                 const DiffuseConfig& cfg) {
  cfg.validate();
  require_same_grid(z0.grid(), g.grid(), "diffuse objective edge map");
  HypothesisObjective o(Hypothesis::diffuse, z0);
  o.g_ = g;
  o.diffuse_ = cfg;
  return o;
}

double HypothesisObjective::evaluate(const Volume& z, Volume& grad) {
  require_same_grid(z.grid(), z0_.grid(), "objective evaluation");
  compute_probabilities(z, p_, q_);
  dldp_.assign(z.size(), 0.0);
  if (grad.grid() != z.grid() || grad.size() != z.size()) grad = Volume(z.grid());

  const Grid& grid = z.grid();
  double value = 0.0;
  double lambda_anc = 0.0;
  if (hypothesis_ == Hypothesis::compact) {
    const auto& c = compact_;
    if (c.lambda_ent != 0.0) value += c.lambda_ent * entropy_kernel(p_, q_, c.lambda_ent, dldp_);
    if (c.lambda_tv != 0.0) value += c.lambda_tv * tv_kernel(grid, p_, nullptr, c.lambda_tv, dldp_);
    if (c.lambda_grav != 0.0) value += c.lambda_grav * gravity_kernel(grid, p_, c.lambda_grav, dldp_);
    lambda_anc = c.lambda_anc;
  } else {
    const auto& d = diffuse_;
    if (d.lambda_ent != 0.0) value += d.lambda_ent * entropy_kernel(p_, q_, d.lambda_ent, dldp_);
    if (d.lambda_geo != 0.0)
      value += d.lambda_geo * tv_kernel(grid, p_, g_.values().data(), d.lambda_geo, dldp_);
    if (d.lambda_inf != 0.0) value += d.lambda_inf * inflation_kernel(p_, d.lambda_inf, dldp_);
    lambda_anc = d.lambda_anc;
  }
  chain_to_logits(p_, q_, dldp_, grad);
  if (lambda_anc != 0.0)
    value += lambda_anc * anchor_kernel(z.values(), z0_.values(), lambda_anc, grad.values());
  return value;
}

namespace {

std::vector<double> gaussian_kernel(double sigma_vox) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_vox));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma_vox * sigma_vox));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable 1D convolution along `axis` with replicate boundary.
Volume convolve_axis(const Volume& in, int axis, const std::vector<double>& kernel) {
  const Grid& g = in.grid();
  const auto n = static_cast<long>(g.dims[axis]);
  const std::size_t stride = g.stride(axis);
  const long radius = static_cast<long>(kernel.size() / 2);
  Volume out(g);
  for (std::size_t z = 0; z < g.nz(); ++z)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        const std::size_t i = g.index(x, y, z);
        const long c = static_cast<long>(axis == 0 ? x : (axis == 1 ? y : z));
        const std::size_t base = i - static_cast<std::size_t>(c) * stride;
        double acc = 0.0;
        for (long k = -radius; k <= radius; ++k) {
          const long s = std::clamp(c + k, 0L, n - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * in[base + static_cast<std::size_t>(s) * stride];
        }
        out[i] = acc;
      }
  return out;
}

Volume gaussian_smooth(const Volume& in, double sigma_mm) {
  Volume out = in;
  for (int axis = 0; axis < 3; ++axis) {
    if (in.grid().dims[axis] < 2) continue;
    const double sigma_vox = sigma_mm / in.grid().spacing[axis];
    if (sigma_vox < 1e-3) continue;
    out = convolve_axis(out, axis, gaussian_kernel(sigma_vox));
  }
  return out;
}

Volume gradient_magnitude(const Volume& v) {
  const Grid& g = v.grid();
  Volume out(g);
  for (std::size_t z = 0; z < g.nz(); ++z)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        const std::size_t c[3] = {x, y, z};
        double sq = 0.0;
        for (int a = 0; a < 3; ++a) {
          const std::size_t n = g.dims[a];
          if (n < 2) continue;
          const std::size_t lo = c[a] == 0 ? 0 : c[a] - 1;
          const std::size_t hi = c[a] + 1 >= n ? n - 1 : c[a] + 1;
          std::size_t ilo[3] = {x, y, z}, ihi[3] = {x, y, z};
          ilo[a] = lo;
          ihi[a] = hi;
          // central inside, one-sided at the border
          const double d = (v.at(ihi[0], ihi[1], ihi[2]) - v.at(ilo[0], ilo[1], ilo[2])) /
                           (static_cast<double>(hi - lo) * g.spacing[a]);
          sq += d * d;
        }
        out.at(x, y, z) = std::sqrt(sq);
      }
  return out;
}

}  // namespace

Volume edge_map(std::span<const Volume> channels, const EdgeMapParams& params) {
  if (channels.empty()) throw InvalidArgument("edge_map requires at least one channel");
  if (!(params.sigma_mm >= 0.0) || !(params.alpha >= 0.0))
    throw InvalidArgument("edge_map sigma and alpha must be nonnegative");
  const Grid& grid = channels.front().grid();
  Volume g(grid, 1.0);
  for (const auto& ch : channels) {
    require_same_grid(ch.grid(), grid, "edge_map channel");
    const Volume mag = gradient_magnitude(gaussian_smooth(ch, params.sigma_mm));
    std::vector<double> sample(mag.storage());
    double norm = detail::percentile_inplace(sample, params.norm_percentile);
    // Sparse edges can leave the percentile at zero; fall back to the maximum.
    if (!(norm > 0.0)) norm = *std::max_element(mag.storage().begin(), mag.storage().end());
    if (!(norm > 0.0)) continue;  // constant channel: no barrier
    for (std::size_t i = 0; i < mag.size(); ++i) {
      const double r = mag[i] / norm;
      g[i] = std::min(g[i], 1.0 / (1.0 + params.alpha * r * r));
    }
  }
  return g;
}

}  // namespace hdtta
