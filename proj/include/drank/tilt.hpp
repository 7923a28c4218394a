#pragma once

#include <span>
#include <vector>

#include "drank/scores.hpp"

namespace drank {

// KL-tilted distribution over one class's scores. Weights are
// proportional to prior * exp(+score/lambda) for negatives and
// prior * exp(-score/lambda) for positives, so mass concentrates on the
// hard examples of each class.
struct TiltedDistribution {
  std::vector<double> weights;  // sums to 1; masked-out indices exactly 0
  double log_normalizer = 0.0;  // log Z after the max-shift
  double expectation = 0.0;     // sum(weights * scores)
};

TiltedDistribution tilt_negative(std::span<const double> scores,
                                 double lambda, const Prior& prior);

TiltedDistribution tilt_positive(std::span<const double> scores,
                                 double lambda, const Prior& prior);

}  // namespace drank
