#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hdtta {

struct GradcheckOptions {
  std::uint64_t seed = 0;
  std::size_t volumes = 20;       // random inputs per term
  double step = 1e-5;             // central-difference step in logit space
  double kink = 1e-4;             // TV/geodesic voxels with a smaller |dP| are skipped
  double tolerance = 1e-3;
  double floor = 1e-6;            // denominator floor of the relative error
};

struct TermCheck {
  std::string term;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Finite-difference check of every loss term and both composites on random
/// 4x4x4 logits. Relative error is |a - n| / max(|a|, |n|, floor).
std::vector<TermCheck> run_gradcheck(const GradcheckOptions& opt = {});

}  // namespace hdtta
