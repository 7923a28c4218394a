#include "drank/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace drank {

namespace {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

GradCheckReport check_gradients(const LossFn& loss_fn,
                                const ImageScores& scores, double step,
                                double threshold) {
  if (!(step > 0.0) || !(threshold > 0.0))
    throw DrError(Err::BadSpec, "gradcheck: step and threshold must be > 0");

  const LossResult center = loss_fn(scores);

  GradCheckReport report;
  ImageScores probe = scores;

  auto check_side = [&](std::vector<double>& values,
                        const std::vector<double>& analytic,
                        CoordClass cls) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      if (original + step >= 1.0 || original - step <= 0.0)
        throw DrError(Err::StepOutOfRange,
                      "perturbed score would leave (0,1)");
      values[i] = original + step;
      const double up = loss_fn(probe).loss;
      values[i] = original - step;
      const double down = loss_fn(probe).loss;
      values[i] = original;

      const double fd = (up - down) / (2.0 * step);
      const double rel = relative_error(fd, analytic[i]);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = {cls, i};
      }
    }
  };

  // probe aliases the perturbed vectors; center gradients are frozen
  auto analytic_pos = center.grad_pos;
  auto analytic_neg = center.grad_neg;
  check_side(probe.positives, analytic_pos, CoordClass::Positive);
  check_side(probe.negatives, analytic_neg, CoordClass::Negative);

  report.passed = report.max_rel_error < threshold;
  return report;
}

}  // namespace drank
