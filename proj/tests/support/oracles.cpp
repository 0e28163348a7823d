#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

double central_difference(const std::function<double(const Volume&)>& f, const Volume& z, std::size_t i,
                          double step) {
  Volume zp = z, zm = z;
  zp[i] += step;
  zm[i] -= step;
  return (f(zp) - f(zm)) / (2.0 * step);
}

double rel_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

std::vector<bool> near_kink(const Volume& z, double kink) {
  const Grid& g = z.grid();
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-z[i]));
  std::vector<bool> out(z.size(), false);
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const std::size_t v = g.index(i, j, k);
        auto test = [&](bool has, std::size_t w) {
          if (has && std::abs(p[w] - p[v]) < kink) out[v] = out[w] = true;
        };
        test(i + 1 < g.nx(), g.index(i + 1, j, k));
        test(j + 1 < g.ny(), g.index(i, j + 1, k));
        test(k + 1 < g.nz(), g.index(i, j, k + 1));
      }
  return out;
}

std::vector<std::size_t> surface(const Mask& m) {
  const Grid& g = m.grid();
  std::vector<std::size_t> out;
  const long nx = static_cast<long>(g.nx()), ny = static_cast<long>(g.ny()), nz = static_cast<long>(g.nz());
  for (long k = 0; k < nz; ++k)
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i) {
        if (!m.at(i, j, k)) continue;
        const long nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k}, {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        bool exposed = false;
        for (const auto& q : nb) {
          if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= nx || q[1] >= ny || q[2] >= nz || !m.at(q[0], q[1], q[2])) {
            exposed = true;
            break;
          }
        }
        if (exposed) out.push_back(g.index(i, j, k));
      }
  return out;
}

namespace {

std::array<double, 3> coords(const Grid& g, std::size_t idx) {
  const std::size_t x = idx % g.nx(), y = (idx / g.nx()) % g.ny(), z = idx / (g.nx() * g.ny());
  return {x * g.spacing[0], y * g.spacing[1], z * g.spacing[2]};
}

std::vector<double> directed(const Grid& g, const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
  std::vector<double> out;
  for (std::size_t a : from) {
    const auto pa = coords(g, a);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b : to) {
      const auto pb = coords(g, b);
      const double d = (pa[0] - pb[0]) * (pa[0] - pb[0]) + (pa[1] - pb[1]) * (pa[1] - pb[1]) +
                       (pa[2] - pb[2]) * (pa[2] - pb[2]);
      best = std::min(best, d);
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

}  // namespace

double brute_hd(const Mask& a, const Mask& b, double pct) {
  const Grid& g = a.grid();
  const bool ea = a.count() == 0, eb = b.count() == 0;
  if (ea && eb) return 0.0;
  if (ea || eb) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::pow(g.dims[k] * g.spacing[k], 2);
    return std::sqrt(s);
  }
  const auto sa = surface(a), sb = surface(b);
  std::vector<double> all = directed(g, sa, sb);
  const auto back = directed(g, sb, sa);
  all.insert(all.end(), back.begin(), back.end());
  std::sort(all.begin(), all.end());
  const double rank = pct / 100.0 * static_cast<double>(all.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, all.size() - 1);
  return all[lo] + (rank - static_cast<double>(lo)) * (all[hi] - all[lo]);
}

double brute_dice(const Mask& a, const Mask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    both += a[i] && b[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double brute_precision(const Mask& pred, const Mask& gt) {
  std::size_t tp = 0, fp = 0, ng = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    tp += pred[i] && gt[i];
    fp += pred[i] && !gt[i];
    ng += gt[i];
  }
  if (tp + fp == 0) return ng == 0 ? 1.0 : 0.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double enumerate_wilcoxon_p(const std::vector<double>& diffs, hdtta::Alternative alt) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0.0) nz.push_back(d);
  const std::size_t n = nz.size();
  if (n == 0) return 1.0;
  // Doubled average ranks by direct counting.
  std::vector<long> r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    long less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(nz[j]) < std::abs(nz[i])) ++less;
      if (std::abs(nz[j]) == std::abs(nz[i])) ++equal;
    }
    r2[i] = 2 * less + equal + 1;
  }
  long observed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (nz[i] > 0) observed += r2[i];
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += r2[i];
    if (alt == hdtta::Alternative::greater ? w >= observed : w <= observed) ++hits;
  }
  return static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
}

Mask random_mask(std::mt19937_64& rng, const Grid& g, double density) {
  std::bernoulli_distribution on(density);
  std::vector<std::uint8_t> d(g.size());
  for (auto& b : d) b = on(rng) ? 1 : 0;
  return Mask(g, std::move(d));
}

Volume random_volume(std::mt19937_64& rng, const Grid& g, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Volume v(g);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = u(rng);
  return v;
}

}  // namespace oracle
