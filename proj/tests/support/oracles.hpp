#pragma once

// Independent reference implementations used only by tests. They are
// deliberately naive (all-pairs, full enumeration) and share no code with
// the library beyond the Volume/Mask containers.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hdtta/metrics.hpp"
#include "hdtta/volume.hpp"

namespace oracle {

using hdtta::Grid;
using hdtta::Mask;
using hdtta::Volume;

/// Central difference of f at voxel i.
double central_difference(const std::function<double(const Volume&)>& f, const Volume& z, std::size_t i,
                          double step);

/// |a - n| / max(|a|, |n|, floor)
double rel_error(double analytic, double numeric, double floor);

/// Voxels whose P = sigmoid(z) differs by less than `kink` from a face neighbour.
std::vector<bool> near_kink(const Volume& z, double kink);

/// Surface voxels: foreground with a background 6-neighbour or touching the border.
std::vector<std::size_t> surface(const Mask& m);

/// Percentile Hausdorff distance from all pairwise surface distances,
/// pooling both directions. Empty-mask conventions follow the library.
double brute_hd(const Mask& a, const Mask& b, double pct = 95.0);

double brute_dice(const Mask& a, const Mask& b);
double brute_precision(const Mask& pred, const Mask& gt);

/// One-sided signed-rank p value by enumerating every sign pattern.
double enumerate_wilcoxon_p(const std::vector<double>& diffs, hdtta::Alternative alt);

Mask random_mask(std::mt19937_64& rng, const Grid& g, double density);
Volume random_volume(std::mt19937_64& rng, const Grid& g, double lo, double hi);

}  // namespace oracle
