#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hdtta/losses.hpp"
#include "hdtta/volume.hpp"

namespace hdtta {

/// Fixed-step Adam protocol applied to the logit volume.
struct OptimizerProtocol {
  double lr = 0.1;
  std::size_t steps = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
  friend bool operator==(const OptimizerProtocol&, const OptimizerProtocol&) = default;
};

class AdamState {
 public:
  AdamState(const Grid& grid, const OptimizerProtocol& protocol);

  const Volume& first_moment() const { return m_; }
  const Volume& second_moment() const { return v_; }
  std::size_t step_count() const { return t_; }
  const OptimizerProtocol& protocol() const { return protocol_; }

  /// One bias-corrected Adam update of z in place. Throws NumericalFailure
  /// (carrying the 1-based step index) on a non-finite gradient or update.
  void step(Volume& z, const Volume& grad);

 private:
  OptimizerProtocol protocol_;
  Volume m_, v_;
  std::size_t t_ = 0;
  double beta1_pow_ = 1.0, beta2_pow_ = 1.0;
};

struct RefinementTrace {
  std::vector<double> loss_values;  // steps + 1 entries: initial, then after each step
  Volume final_z;
};

/// Evaluates loss at z and writes dL/dz into grad.
using Objective = std::function<double(const Volume& z, Volume& grad)>;

/// Runs `protocol.steps` Adam updates starting from exactly z0.
RefinementTrace minimize(const Volume& z0, const Objective& objective,
                         const OptimizerProtocol& protocol);

RefinementTrace refine_compact(const Case& c, const CompactConfig& cfg,
                               const OptimizerProtocol& protocol);

/// `g` is the precomputed edge map (or all-ones to disable the barrier).
RefinementTrace refine_diffuse(const Case& c, const Volume& g, const DiffuseConfig& cfg,
                               const OptimizerProtocol& protocol);

/// Computes the edge map from the case image once, then refines.
RefinementTrace refine_diffuse(const Case& c, const DiffuseConfig& cfg,
                               const EdgeMapParams& edge, const OptimizerProtocol& protocol);

}  // namespace hdtta
