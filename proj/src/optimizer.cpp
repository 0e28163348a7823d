#include "hdtta/optimizer.hpp"

#include <cmath>
#include <string>

#include "hdtta/errors.hpp"

namespace hdtta {

void OptimizerProtocol::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("optimizer lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidArgument("optimizer beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidArgument("optimizer beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw InvalidArgument("optimizer eps must be positive");
}

AdamState::AdamState(const Grid& grid, const OptimizerProtocol& protocol)
    : protocol_(protocol), m_(grid, 0.0), v_(grid, 0.0) {
  protocol_.validate();
}

void AdamState::step(Volume& z, const Volume& grad) {
  require_same_grid(z.grid(), m_.grid(), "adam_step logits");
  require_same_grid(grad.grid(), m_.grid(), "adam_step gradient");
  const std::size_t next = t_ + 1;
  if (!grad.all_finite())
    throw NumericalFailure("non-finite gradient at Adam step " + std::to_string(next), next);

  const double b1 = protocol_.beta1, b2 = protocol_.beta2;
  const double bp1 = beta1_pow_ * b1, bp2 = beta2_pow_ * b2;
  const double c1 = 1.0 - bp1, c2 = 1.0 - bp2;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double g = grad[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    z[i] -= protocol_.lr * m_hat / (std::sqrt(v_hat) + protocol_.eps);
  }
  if (!z.all_finite())
    throw NumericalFailure("non-finite logits after Adam step " + std::to_string(next), next);
  beta1_pow_ = bp1;
  beta2_pow_ = bp2;
  t_ = next;
}

RefinementTrace minimize(const Volume& z0, const Objective& objective,
                         const OptimizerProtocol& protocol) {
  AdamState state(z0.grid(), protocol);
  RefinementTrace trace;
  trace.final_z = z0;
  trace.loss_values.reserve(protocol.steps + 1);

  Volume grad(z0.grid());
  auto record = [&](std::size_t step) {
    const double value = objective(trace.final_z, grad);
    if (!std::isfinite(value))
      throw NumericalFailure("non-finite loss at step " + std::to_string(step), step);
    trace.loss_values.push_back(value);
  };

  record(0);
  for (std::size_t s = 0; s < protocol.steps; ++s) {
    state.step(trace.final_z, grad);
    record(s + 1);
  }
  return trace;
}

RefinementTrace refine_compact(const Case& c, const CompactConfig& cfg,
                               const OptimizerProtocol& protocol) {
  auto objective = HypothesisObjective::compact(c.logits0, cfg);
  return minimize(
      c.logits0, [&](const Volume& z, Volume& g) { return objective.evaluate(z, g); }, protocol);
}

RefinementTrace refine_diffuse(const Case& c, const Volume& g, const DiffuseConfig& cfg,
                               const OptimizerProtocol& protocol) {
  auto objective = HypothesisObjective::diffuse(c.logits0, g, cfg);
  return minimize(
      c.logits0, [&](const Volume& z, Volume& grad) { return objective.evaluate(z, grad); },
      protocol);
}

RefinementTrace refine_diffuse(const Case& c, const DiffuseConfig& cfg, const EdgeMapParams& edge,
                               const OptimizerProtocol& protocol) {
  return refine_diffuse(c, edge_map(c.image, edge), cfg, protocol);
}

}  // namespace hdtta
