#include "hdtta/volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hdtta/errors.hpp"
#include "numeric.hpp"

namespace hdtta {

Grid::Grid(std::array<std::size_t, 3> d, std::array<double, 3> s) : dims(d), spacing(s) {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw InvalidArgument("grid dimension must be positive: " + to_string(*this));
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw InvalidArgument("grid spacing must be positive and finite: " + to_string(*this));
  }
}

std::size_t Grid::stride(int axis) const {
  switch (axis) {
    case 0: return 1;
    case 1: return dims[0];
    case 2: return dims[0] * dims[1];
    default: throw InvalidArgument("axis must be 0, 1 or 2, got " + std::to_string(axis));
  }
}

double Grid::diagonal_mm() const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double e = static_cast<double>(dims[a]) * spacing[a];
    s += e * e;
  }
  return std::sqrt(s);
}

std::string to_string(const Grid& g) {
  std::ostringstream os;
  os << g.dims[0] << "x" << g.dims[1] << "x" << g.dims[2] << " @ (" << g.spacing[0] << ", "
     << g.spacing[1] << ", " << g.spacing[2] << ") mm";
  return os.str();
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": grid mismatch " + to_string(a) + " vs " +
                            to_string(b));
  }
}

Volume::Volume(Grid grid, double fill) : grid_(grid), data_(grid.size(), fill) {}

Volume::Volume(Grid grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size())
    throw DimensionMismatch("volume data length " + std::to_string(data_.size()) +
                            " does not match grid " + to_string(grid_));
}

bool Volume::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mask::Mask(Grid grid, bool fill) : grid_(grid), data_(grid.size(), fill ? 1 : 0) {}

Mask::Mask(Grid grid, std::vector<std::uint8_t> data) : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size())
    throw DimensionMismatch("mask data length " + std::to_string(data_.size()) +
                            " does not match grid " + to_string(grid_));
  for (auto& b : data_) b = b ? 1 : 0;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

namespace {

template <typename Op>
Mask combine(const Mask& a, const Mask& b, Op op, const char* what) {
  require_same_grid(a.grid(), b.grid(), what);
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]) ? 1 : 0;
  return Mask(a.grid(), std::move(out));
}

}  // namespace

Mask mask_difference(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; }, "mask_difference");
}

Mask mask_intersection(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; }, "mask_intersection");
}

Mask mask_union(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; }, "mask_union");
}

std::size_t count_intersection(const Mask& a, const Mask& b) {
  require_same_grid(a.grid(), b.grid(), "count_intersection");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] && b[i]) ? 1 : 0;
  return n;
}

void Case::validate() const {
  if (image.empty()) throw InvalidArgument("case '" + id + "' has no image channels");
  if (!logits0.all_finite()) throw InvalidArgument("case '" + id + "' has non-finite logits");
  for (std::size_t c = 0; c < image.size(); ++c) {
    require_same_grid(image[c].grid(), logits0.grid(), "case image channel vs logits");
    if (!image[c].all_finite())
      throw InvalidArgument("case '" + id + "' channel " + std::to_string(c) + " is non-finite");
  }
}

Volume sigmoid(const Volume& z) {
  Volume p(z.grid());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double q;
    detail::sigmoid_pair(z[i], p[i], q);
  }
  return p;
}

Volume logit(const Volume& p) {
  Volume z(p.grid());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p[i];
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("logit requires values in (0, 1)");
    z[i] = std::log(v) - std::log1p(-v);
  }
  return z;
}

Volume forward_diff(const Volume& v, int axis) {
  const Grid& g = v.grid();
  const std::size_t stride = g.stride(axis);
  const std::size_t n_axis = g.dims[axis];
  Volume out(g);
  for (std::size_t z = 0; z < g.nz(); ++z)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        const std::size_t coord = axis == 0 ? x : (axis == 1 ? y : z);
        if (coord + 1 >= n_axis) continue;
        const std::size_t i = g.index(x, y, z);
        out[i] = v[i + stride] - v[i];
      }
  return out;
}

Mask threshold(const Volume& v, double t) {
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > t ? 1 : 0;
  return Mask(v.grid(), std::move(out));
}

RegionStats mask_stats(const Volume& channel, const Mask& m) {
  require_same_grid(channel.grid(), m.grid(), "mask_stats");
  RegionStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    sum += channel[i];
    ++s.count;
  }
  if (s.count == 0) throw EmptyRegion("mask_stats over an empty mask");
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const double d = channel[i] - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / static_cast<double>(s.count));
  return s;
}

}  // namespace hdtta
