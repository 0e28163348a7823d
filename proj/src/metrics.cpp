#include "hdtta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hdtta/errors.hpp"
#include "numeric.hpp"

namespace hdtta {

std::string_view to_string(HausdorffVariant v) {
  return v == HausdorffVariant::pooled ? "pooled" : "max_directional";
}

HausdorffVariant hausdorff_variant_from_string(std::string_view s) {
  if (s == "pooled") return HausdorffVariant::pooled;
  if (s == "max_directional") return HausdorffVariant::max_directional;
  throw InvalidArgument("unknown Hausdorff variant '" + std::string(s) + "'");
}

double dice(const Mask& pred, const Mask& gt) {
  require_same_grid(pred.grid(), gt.grid(), "dice");
  const std::size_t a = pred.count(), b = gt.count();
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(count_intersection(pred, gt)) / static_cast<double>(a + b);
}

double precision(const Mask& pred, const Mask& gt) {
  require_same_grid(pred.grid(), gt.grid(), "precision");
  const std::size_t a = pred.count();
  if (a == 0) return gt.empty() ? 1.0 : 0.0;
  return static_cast<double>(count_intersection(pred, gt)) / static_cast<double>(a);
}

Mask boundary(const Mask& m) {
  const Grid& g = m.grid();
  std::vector<std::uint8_t> out(m.size(), 0);
  for (std::size_t z = 0; z < g.nz(); ++z)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        if (!m.at(x, y, z)) continue;
        const bool on_border = x == 0 || y == 0 || z == 0 || x + 1 == g.nx() ||
                               y + 1 == g.ny() || z + 1 == g.nz();
        const bool exposed = on_border || !m.at(x - 1, y, z) || !m.at(x + 1, y, z) ||
                             !m.at(x, y - 1, z) || !m.at(x, y + 1, z) || !m.at(x, y, z - 1) ||
                             !m.at(x, y, z + 1);
        if (exposed) out[g.index(x, y, z)] = 1;
      }
  return Mask(g, std::move(out));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line.
// f holds squared distances (or inf); positions are index * h.
void distance_1d(std::vector<double>& f, double h, std::vector<double>& out,
                 std::vector<std::size_t>& v, std::vector<double>& zs) {
  const std::size_t n = f.size();
  v.resize(n);
  zs.resize(n + 1);
  std::size_t k = 0;
  bool any = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double xq = static_cast<double>(q) * h;
    if (!any) {
      v[0] = q;
      zs[0] = -kInf;
      zs[1] = kInf;
      any = true;
      continue;
    }
    auto intersect = [&](std::size_t j) {
      const double xv = static_cast<double>(v[j]) * h;
      return ((f[q] + xq * xq) - (f[v[j]] + xv * xv)) / (2.0 * (xq - xv));
    };
    double s = intersect(k);
    while (s <= zs[k]) {  // zs[0] is -inf, so this stops at k == 0
      --k;
      s = intersect(k);
    }
    ++k;
    v[k] = q;
    zs[k] = s;
    zs[k + 1] = kInf;
  }
  out.assign(n, kInf);
  if (!any) return;
  k = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double xp = static_cast<double>(p) * h;
    while (zs[k + 1] < xp) ++k;
    const double d = xp - static_cast<double>(v[k]) * h;
    out[p] = d * d + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const Mask& m) {
  const Grid& g = m.grid();
  std::vector<double> dist(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) dist[i] = m[i] ? 0.0 : kInf;

  std::vector<double> line, out, zs;
  std::vector<std::size_t> v;
  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t n = g.dims[axis];
    if (n < 2) continue;
    const std::size_t stride = g.stride(axis);
    line.resize(n);
    for (std::size_t z = 0; z < g.nz(); ++z)
      for (std::size_t y = 0; y < g.ny(); ++y)
        for (std::size_t x = 0; x < g.nx(); ++x) {
          const std::size_t c = axis == 0 ? x : (axis == 1 ? y : z);
          if (c != 0) continue;  // visit each line once, from its first voxel
          const std::size_t base = g.index(x, y, z);
          for (std::size_t i = 0; i < n; ++i) line[i] = dist[base + i * stride];
          distance_1d(line, g.spacing[axis], out, v, zs);
          for (std::size_t i = 0; i < n; ++i) dist[base + i * stride] = out[i];
        }
  }
  return dist;
}

namespace {

std::vector<double> directed_distances(const Mask& from_surface, const std::vector<double>& to_sq) {
  std::vector<double> d;
  for (std::size_t i = 0; i < from_surface.size(); ++i)
    if (from_surface[i]) d.push_back(std::sqrt(to_sq[i]));
  return d;
}

}  // namespace

double hd95(const Mask& pred, const Mask& gt, const HausdorffOptions& options) {
  require_same_grid(pred.grid(), gt.grid(), "hd95");
  const bool pe = pred.empty(), ge = gt.empty();
  if (pe && ge) return 0.0;
  if (pe || ge) return options.empty_penalty_mm.value_or(pred.grid().diagonal_mm());

  const Mask bp = boundary(pred), bg = boundary(gt);
  std::vector<double> a = directed_distances(bp, squared_distance_transform(bg));
  std::vector<double> b = directed_distances(bg, squared_distance_transform(bp));
  if (options.variant == HausdorffVariant::max_directional) {
    return std::max(detail::percentile_inplace(a, options.percentile),
                    detail::percentile_inplace(b, options.percentile));
  }
  a.insert(a.end(), b.begin(), b.end());
  return detail::percentile_inplace(a, options.percentile);
}

MetricSet evaluate(const Mask& pred, const Mask& gt, const HausdorffOptions& options) {
  return {dice(pred, gt), hd95(pred, gt, options), precision(pred, gt)};
}

namespace {

SummaryStat summarize(std::span<const MetricSet> sets, double MetricSet::*field) {
  SummaryStat s;
  const double n = static_cast<double>(sets.size());
  for (const auto& m : sets) s.mean += m.*field;
  s.mean /= n;
  if (sets.size() < 2) return s;
  double ss = 0.0;
  for (const auto& m : sets) {
    const double d = m.*field - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / (n - 1.0));
  return s;
}

}  // namespace

CohortStats aggregate(std::span<const MetricSet> sets) {
  if (sets.empty()) throw InvalidArgument("aggregate requires at least one metric set");
  CohortStats c;
  c.n = sets.size();
  c.single_case = sets.size() == 1;
  c.dice = summarize(sets, &MetricSet::dice);
  c.hd95_mm = summarize(sets, &MetricSet::hd95_mm);
  c.precision = summarize(sets, &MetricSet::precision);
  return c;
}

namespace {

struct SignedRanks {
  std::vector<std::size_t> doubled;  // 2 * average rank of |d|, integer valued
  std::vector<bool> positive;
  std::vector<std::size_t> tie_sizes;
};

SignedRanks rank_nonzero(std::span<const double> diffs) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0.0) nz.push_back(d);
  std::vector<std::size_t> order(nz.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(nz[a]) < std::abs(nz[b]); });
  SignedRanks r;
  r.doubled.resize(nz.size());
  r.positive.resize(nz.size());
  for (std::size_t i = 0; i < nz.size();) {
    std::size_t j = i;
    while (j + 1 < nz.size() && std::abs(nz[order[j + 1]]) == std::abs(nz[order[i]])) ++j;
    // 1-based ranks i+1 .. j+1 share the average (i + j + 2) / 2
    for (std::size_t k = i; k <= j; ++k) r.doubled[order[k]] = i + j + 2;
    r.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  for (std::size_t i = 0; i < nz.size(); ++i) r.positive[i] = nz[i] > 0.0;
  return r;
}

std::size_t doubled_w_plus(const SignedRanks& r) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < r.doubled.size(); ++i)
    if (r.positive[i]) w += r.doubled[i];
  return w;
}

}  // namespace

double wilcoxon_exact_p(std::span<const double> diffs, Alternative alt) {
  const SignedRanks r = rank_nonzero(diffs);
  const std::size_t n = r.doubled.size();
  if (n == 0) return 1.0;
  const std::size_t total = std::accumulate(r.doubled.begin(), r.doubled.end(), std::size_t{0});
  // counts[s]: number of sign assignments whose doubled positive-rank sum is s
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t rank2 : r.doubled) {
    for (std::size_t s = reach + 1; s-- > 0;)
      if (counts[s] != 0.0) counts[s + rank2] += counts[s];
    reach += rank2;
  }
  const std::size_t w = doubled_w_plus(r);
  double tail = 0.0;
  if (alt == Alternative::greater) {
    for (std::size_t s = w; s <= total; ++s) tail += counts[s];
  } else {
    for (std::size_t s = 0; s <= w; ++s) tail += counts[s];
  }
  return std::min(1.0, tail / std::ldexp(1.0, static_cast<int>(n)));
}

double wilcoxon_normal_p(std::span<const double> diffs, Alternative alt) {
  const SignedRanks r = rank_nonzero(diffs);
  const double n = static_cast<double>(r.doubled.size());
  if (n == 0) return 1.0;
  const double w = 0.5 * static_cast<double>(doubled_w_plus(r));
  const double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (std::size_t t : r.tie_sizes) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  if (!(var > 0.0)) return 1.0;
  const double sd = std::sqrt(var);
  if (alt == Alternative::greater) {
    const double z = (w - mean - 0.5) / sd;
    return 0.5 * std::erfc(z / std::sqrt(2.0));
  }
  const double z = (w - mean + 0.5) / sd;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs, Alternative alt,
                                    std::size_t exact_max_n) {
  WilcoxonResult res;
  const SignedRanks r = rank_nonzero(diffs);
  res.n_nonzero = r.doubled.size();
  if (res.n_nonzero == 0) {
    res.degenerate = true;
    res.exact = true;
    return res;
  }
  res.underpowered = res.n_nonzero < 6;
  res.w_plus = 0.5 * static_cast<double>(doubled_w_plus(r));
  res.exact = res.n_nonzero <= exact_max_n;
  res.p_value = res.exact ? wilcoxon_exact_p(diffs, alt) : wilcoxon_normal_p(diffs, alt);
  res.p_adjusted = res.p_value;
  return res;
}

std::vector<double> holm_adjust(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adj(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double v = std::min(1.0, static_cast<double>(m - k) * p[order[k]]);
    running = std::max(running, v);
    adj[order[k]] = running;
  }
  return adj;
}

std::vector<WilcoxonResult> wilcoxon_holm(const std::vector<std::vector<double>>& diffs,
                                          const std::vector<Alternative>& directions) {
  if (diffs.size() != directions.size())
    throw InvalidArgument("wilcoxon_holm: one direction per metric is required");
  std::vector<WilcoxonResult> out;
  std::vector<double> raw;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    out.push_back(wilcoxon_signed_rank(diffs[i], directions[i]));
    raw.push_back(out.back().p_value);
  }
  const auto adj = holm_adjust(raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].p_adjusted = adj[i];
  return out;
}

}  // namespace hdtta
