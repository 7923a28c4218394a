#include "drank/scores.hpp"

#include <cmath>

namespace drank {

namespace {

std::optional<Err> check_values(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) return Err::NonFinite;
    if (v <= 0.0 || v >= 1.0) return Err::OutOfRange;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Err> validate(const ImageScores& scores) {
  if (scores.negatives.empty()) return Err::EmptyNegatives;
  if (auto err = check_values(scores.positives)) return err;
  if (auto err = check_values(scores.negatives)) return err;
  return std::nullopt;
}

void require_valid(const ImageScores& scores) {
  if (auto err = validate(scores)) {
    throw DrError(*err, "invalid ImageScores");
  }
}

std::optional<Err> validate(const DrParams& params) {
  if (!(params.lambda_pos > 0.0) || !std::isfinite(params.lambda_pos))
    return Err::BadSpec;
  if (!(params.lambda_neg > 0.0) || !std::isfinite(params.lambda_neg))
    return Err::BadSpec;
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) return Err::BadSpec;
  return validate(params.surrogate);
}

std::pair<double, double> tuned_lambdas(double h_pos, double h_neg) {
  if (!(h_pos > 1.0) || !std::isfinite(h_pos))
    throw DrError(Err::BadBase, "h_pos must exceed 1");
  if (!(h_neg > 1.0) || !std::isfinite(h_neg))
    throw DrError(Err::BadBase, "h_neg must exceed 1");
  return {1.0 / std::log(h_pos), 0.1 / std::log(h_neg)};
}

}  // namespace drank
