#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hdtta {

/// Voxel lattice geometry shared by volumes and masks.
///
/// Linear order is x fastest, then y, then z: index = x + nx * (y + ny * z).
struct Grid {
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm

  Grid() = default;
  Grid(std::array<std::size_t, 3> d, std::array<double, 3> s = {1.0, 1.0, 1.0});

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t nx() const { return dims[0]; }
  std::size_t ny() const { return dims[1]; }
  std::size_t nz() const { return dims[2]; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }
  std::size_t stride(int axis) const;

  /// Physical (mm) diagonal of the full extent, sqrt(sum (n_i s_i)^2).
  double diagonal_mm() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

std::string to_string(const Grid& g);

/// Throws DimensionMismatch if the two grids differ in dims or spacing.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

class Volume {
 public:
  Volume() = default;
  explicit Volume(Grid grid, double fill = 0.0);
  Volume(Grid grid, std::vector<double> data);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t x, std::size_t y, std::size_t z) { return data_[grid_.index(x, y, z)]; }
  double at(std::size_t x, std::size_t y, std::size_t z) const { return data_[grid_.index(x, y, z)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Grid grid_;
  std::vector<double> data_;
};

class Mask {
 public:
  Mask() = default;
  explicit Mask(Grid grid, bool fill = false);
  Mask(Grid grid, std::vector<std::uint8_t> data);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  bool operator[](std::size_t i) const { return data_[i] != 0; }
  void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }
  bool at(std::size_t x, std::size_t y, std::size_t z) const { return data_[grid_.index(x, y, z)] != 0; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  std::span<const std::uint8_t> bytes() const { return data_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  Grid grid_;
  std::vector<std::uint8_t> data_;
};

/// a AND NOT b
Mask mask_difference(const Mask& a, const Mask& b);
Mask mask_intersection(const Mask& a, const Mask& b);
Mask mask_union(const Mask& a, const Mask& b);
std::size_t count_intersection(const Mask& a, const Mask& b);

/// One test sample: image channels plus the backbone's initial logits.
struct Case {
  std::string id;
  std::vector<Volume> image;
  Volume logits0;

  const Grid& grid() const { return logits0.grid(); }
  /// Throws InvalidArgument / DimensionMismatch when inconsistent.
  void validate() const;
};

Volume sigmoid(const Volume& z);
/// Inverse of sigmoid; values must lie strictly inside (0, 1).
Volume logit(const Volume& p);

/// out[i] = v[i + stride] - v[i] along axis; the last slab is 0.
Volume forward_diff(const Volume& v, int axis);

/// True exactly where v > t.
Mask threshold(const Volume& v, double t);

struct RegionStats {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Mean and population std of `channel` over the true voxels of `m`.
/// Throws EmptyRegion when the mask has no true voxels.
RegionStats mask_stats(const Volume& channel, const Mask& m);

}  // namespace hdtta
