#include "hdtta/selector.hpp"

#include <cmath>

#include "hdtta/errors.hpp"

namespace hdtta {

void SelectorParams::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("selector gamma must be positive");
  if (!(eps >= 0.0)) throw InvalidArgument("selector eps must be nonnegative");
  if (!(accept >= 0.0 && accept <= 1.0)) throw InvalidArgument("selector accept must lie in [0, 1]");
}

ExpansionRegion expansion_region(const Volume& p0, const Mask& diffuse_mask,
                                 double core_threshold) {
  require_same_grid(p0.grid(), diffuse_mask.grid(), "expansion_region");
  ExpansionRegion r{threshold(p0, core_threshold), Mask()};
  r.delta = mask_difference(diffuse_mask, r.core);
  return r;
}

double consistency_score(double mu_delta, double mu_core, double sigma_core, double gamma,
                         double eps) {
  const double denom = gamma * (sigma_core + eps);
  const double diff = std::abs(mu_delta - mu_core);
  if (diff == 0.0) return 1.0;
  if (!(denom > 0.0)) return 0.0;
  const double r = diff / denom;
  return std::exp(-0.5 * r * r);
}

ScoreDetail s_rep_detail(std::span<const Volume> channels, const Mask& core, const Mask& delta,
                         double gamma, double eps) {
  if (channels.empty()) throw InvalidArgument("s_rep requires at least one image channel");
  if (core.empty()) throw EmptyRegion("s_rep: core region is empty");
  if (delta.empty()) throw EmptyRegion("s_rep: expansion region is empty");
  ScoreDetail best;
  best.score = 2.0;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const RegionStats sc = mask_stats(channels[c], core);
    const RegionStats sd = mask_stats(channels[c], delta);
    const double score = consistency_score(sd.mean, sc.mean, sc.std, gamma, eps);
    if (score < best.score) best = {score, c, sc.mean, sc.std, sd.mean};
  }
  return best;
}

double s_rep(std::span<const Volume> channels, const Mask& core, const Mask& delta, double gamma,
             double eps) {
  return s_rep_detail(channels, core, delta, gamma, eps).score;
}

SelectionResult select(const Case& c, const Volume& compact_z, const Volume& diffuse_z,
                       const SelectorParams& params) {
  params.validate();
  require_same_grid(compact_z.grid(), c.grid(), "select compact logits");
  require_same_grid(diffuse_z.grid(), c.grid(), "select diffuse logits");

  const Mask diffuse_mask = threshold(sigmoid(diffuse_z), params.mask_threshold);
  const ExpansionRegion region =
      expansion_region(sigmoid(c.logits0), diffuse_mask, params.core_threshold);

  SelectionResult r;
  r.core_voxels = region.core.count();
  r.delta_voxels = region.delta.count();
  if (r.core_voxels == 0 || r.delta_voxels == 0) return r;

  const ScoreDetail d = s_rep_detail(c.image, region.core, region.delta, params.gamma, params.eps);
  r.s_rep = d.score;
  r.mu_core = d.mu_core;
  r.sigma_core = d.sigma_core;
  r.mu_delta = d.mu_delta;
  r.chosen = d.score > params.accept ? Hypothesis::diffuse : Hypothesis::compact;
  return r;
}

}  // namespace hdtta
