#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hdtta/volume.hpp"

namespace hdtta {

enum class Hypothesis { compact, diffuse };

std::string_view to_string(Hypothesis h);
Hypothesis hypothesis_from_string(std::string_view s);

/// Value of a loss (or loss term) and its gradient with respect to the logits.
struct LossTermResult {
  double value = 0.0;
  Volume grad_z;
};

/// Weights of the compact-denoising objective:
///   ent * H(P) + tv * TV(P) + grav * V(P) + anc * |z - z0|^2
struct CompactConfig {
  double lambda_ent = 10.0;
  double lambda_tv = 0.5;
  double lambda_grav = 50.0;
  double lambda_anc = 50.0;

  void validate() const;
  friend bool operator==(const CompactConfig&, const CompactConfig&) = default;
};

/// Weights of the diffuse-recovery objective:
///   ent * H(P) + geo * sum(g |grad P|) + inf * (-mean P) + anc * |z - z0|^2
struct DiffuseConfig {
  double lambda_ent = 2.0;
  double lambda_geo = 50.0;
  double lambda_inf = 5.0;
  double lambda_anc = 0.1;

  void validate() const;
  friend bool operator==(const DiffuseConfig&, const DiffuseConfig&) = default;
};

struct EdgeMapParams {
  double sigma_mm = 1.0;
  double alpha = 10.0;
  double norm_percentile = 99.0;

  friend bool operator==(const EdgeMapParams&, const EdgeMapParams&) = default;
};

// Smoothing constants. All terms are averaged over the voxel count except
// gravity, which is a mass-weighted variance.
inline constexpr double kEntropyClamp = 1e-7;
inline constexpr double kTvEpsilon = 1e-6;
inline constexpr double kGravityEpsilon = 1e-8;

/// Mean binary entropy of P = sigmoid(z). P is clamped to
/// [kEntropyClamp, 1 - kEntropyClamp] inside the logarithms only.
LossTermResult entropy_term(const Volume& z);

/// Anisotropic total variation of P with Charbonnier smoothing:
/// (1/N) sum_axes sum_v sqrt(d^2 + eps^2) - eps, d = forward difference.
LossTermResult tv_term(const Volume& z);

/// Probability-weighted spatial variance of voxel centres (mm^2), using
/// the grid spacing of `z` for physical coordinates.
LossTermResult gravity_term(const Volume& z);

/// Edge-weighted TV: each face difference weighted by 0.5 (g_v + g_{v+1}).
LossTermResult geodesic_term(const Volume& z, const Volume& g);

/// -mean(P).
LossTermResult inflation_term(const Volume& z);

/// mean((z - z0)^2).
LossTermResult anchor_term(const Volume& z, const Volume& z0);

LossTermResult compact_loss(const Volume& z, const Volume& z0, const CompactConfig& cfg);
LossTermResult diffuse_loss(const Volume& z, const Volume& z0, const Volume& g,
                            const DiffuseConfig& cfg);

/// Edge-stopping map: per channel, Gaussian smoothing (sigma in mm), central
/// difference gradient magnitude normalized by its percentile, then
/// 1 / (1 + alpha |grad I|^2); minimum over channels. Values in (0, 1].
Volume edge_map(std::span<const Volume> channels, const EdgeMapParams& params = {});

/// Reusable evaluator for one hypothesis objective. Holds scratch buffers so
/// repeated evaluations inside an optimizer loop do not allocate.
class HypothesisObjective {
 public:
  static HypothesisObjective compact(const Volume& z0, const CompactConfig& cfg);
  /// `g` must share the grid of `z0`.
  static HypothesisObjective diffuse(const Volume& z0, const Volume& g, const DiffuseConfig& cfg);

  Hypothesis hypothesis() const { return hypothesis_; }

  /// Returns the loss at z and writes dL/dz into `grad` (resized as needed).
  double evaluate(const Volume& z, Volume& grad);

 private:
  HypothesisObjective(Hypothesis h, const Volume& z0);

  Hypothesis hypothesis_;
  Volume z0_;
  Volume g_;  // diffuse only
  CompactConfig compact_{};
  DiffuseConfig diffuse_{};
  std::vector<double> p_, q_, dldp_;
};

}  // namespace hdtta
