#pragma once

#include <functional>

#include "drank/drloss.hpp"

namespace drank {

enum class CoordClass { Positive, Negative };

struct GradCoord {
  CoordClass cls = CoordClass::Positive;
  std::size_t index = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  GradCoord worst;
  bool passed = false;
};

using LossFn = std::function<LossResult(const ImageScores&)>;

// Central-difference verification of every analytic gradient coordinate
// against the black-box evaluator. The evaluator is only queried for loss
// values at perturbed inputs plus gradients at the center, so the check
// stays independent of how a particular loss computes its gradient.
// Relative error uses a max(|analytic|, |fd|, 1e-8) denominator. Throws
// StepOutOfRange when a perturbed score would leave (0,1).
GradCheckReport check_gradients(const LossFn& loss_fn,
                                const ImageScores& scores, double step,
                                double threshold);

}  // namespace drank
