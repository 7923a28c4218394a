#pragma once

#include "drank/scores.hpp"
#include "drank/surrogate.hpp"
#include "drank/tilt.hpp"

namespace drank {

// Scalar loss plus analytic gradients w.r.t. the per-candidate scores.
struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_pos;
  std::vector<double> grad_neg;
};

// Distributional ranking loss: surrogate on the gap between the tilted
// negative and tilted positive expectations plus the margin. With no
// positives the positive expectation is fixed at 1 and grad_pos is empty.
LossResult dr_loss(const ImageScores& scores, const DrParams& params);

// Mean surrogate over all positive/negative pairs.
LossResult all_pairs_loss(const ImageScores& scores, double gamma,
                          const SurrogateSpec& surrogate);

// Surrogate on the single extreme pair (max negative vs min positive).
// On ties the first index receives the full gradient.
LossResult worst_case_loss(const ImageScores& scores, double gamma,
                           const SurrogateSpec& surrogate);

// Tilts negatives only and averages the surrogate over raw positive
// scores.
LossResult neg_only_loss(const ImageScores& scores, const DrParams& params);

// Binary cross entropy summed over candidates.
LossResult cross_entropy_loss(const ImageScores& scores);

// Focal loss: -alpha (1-p)^gamma_f log p on positives and
// -(1-alpha) p^gamma_f log(1-p) on negatives, summed.
LossResult focal_loss(const ImageScores& scores, double alpha, double gamma_f);

// Descriptive report of the classification criterion recovered from
// ranking: min positive above gamma, max negative at or below 1 - gamma.
struct MarginReport {
  double min_pos = 0.0;
  double max_neg = 0.0;
  bool satisfies = false;
};

MarginReport margin_check(const ImageScores& scores, double gamma);

}  // namespace drank
