#include "drank/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace drank {

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Resolved prior support: indices with nonzero prior weight, deduplicated.
std::vector<std::size_t> resolve_support(std::size_t n, const Prior& prior) {
  if (prior.kind == Prior::Kind::Uniform) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  if (prior.selected.empty())
    throw DrError(Err::BadPriorMask, "mask selects no candidates");
  std::vector<std::size_t> support = prior.selected;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.back() >= n)
    throw DrError(Err::BadPriorMask, "mask index out of range");
  return support;
}

// Shared core: exponent sign +1 tilts toward high scores (negatives),
// -1 toward low scores (positives). Weights are computed in the
// max-shifted form exp((sign*p - max(sign*p))/lambda), identical to the
// direct formula but immune to overflow for small lambda.
TiltedDistribution tilt(std::span<const double> scores, double lambda,
                        const Prior& prior, double sign) {
  if (scores.empty()) throw DrError(Err::EmptyInput, "tilt: no scores");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DrError(Err::BadSpec, "tilt: lambda must be positive");

  const std::vector<std::size_t> support =
      resolve_support(scores.size(), prior);

  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j : support) shift = std::max(shift, sign * scores[j]);

  TiltedDistribution out;
  out.weights.assign(scores.size(), 0.0);

  KahanSum total;
  for (std::size_t j : support) {
    const double w = std::exp((sign * scores[j] - shift) / lambda);
    out.weights[j] = w;
    total.add(w);
  }

  const double inv = 1.0 / total.sum;
  KahanSum mean;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t j : support) {
    out.weights[j] *= inv;
    mean.add(out.weights[j] * scores[j]);
    lo = std::min(lo, scores[j]);
    hi = std::max(hi, scores[j]);
  }
  // The exact expectation lies in the support hull; keep rounding inside.
  out.expectation = std::clamp(mean.sum, lo, hi);
  out.log_normalizer =
      std::log(total.sum) - std::log(static_cast<double>(support.size()));
  return out;
}

}  // namespace

TiltedDistribution tilt_negative(std::span<const double> scores,
                                 double lambda, const Prior& prior) {
  return tilt(scores, lambda, prior, 1.0);
}

TiltedDistribution tilt_positive(std::span<const double> scores,
                                 double lambda, const Prior& prior) {
  return tilt(scores, lambda, prior, -1.0);
}

}  // namespace drank
