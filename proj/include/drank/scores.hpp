#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "drank/error.hpp"
#include "drank/surrogate.hpp"

namespace drank {

// Per-image candidate scores, already split into foreground (positives)
// and background (negatives). Scores are sigmoid outputs inside the open
// interval (0,1); the boundaries are excluded so tilting and the
// closed-form gradients stay finite. An image may carry no positives but
// always has at least one negative.
struct ImageScores {
  std::vector<double> positives;
  std::vector<double> negatives;

  std::size_t n_pos() const { return positives.size(); }
  std::size_t n_neg() const { return negatives.size(); }
};

// Checks the ImageScores invariants; std::nullopt means valid.
std::optional<Err> validate(const ImageScores& scores);

// Throws DrError when validate() reports a problem.
void require_valid(const ImageScores& scores);

// Prior distribution over one class's candidates. Uniform weights every
// candidate 1/n; Mask restricts to a selected index set weighted 1/|set|
// each (the hard-negative-mining form).
struct Prior {
  enum class Kind { Uniform, Mask };

  Kind kind = Kind::Uniform;
  std::vector<std::size_t> selected;  // meaningful when kind == Mask

  static Prior uniform() { return {}; }
  static Prior mask(std::vector<std::size_t> indices) {
    Prior p;
    p.kind = Kind::Mask;
    p.selected = std::move(indices);
    return p;
  }
};

// Parameters of the distributional ranking loss.
struct DrParams {
  double lambda_pos = 1.0;
  double lambda_neg = 0.1;
  double gamma = 0.5;
  SurrogateSpec surrogate = SurrogateSpec::logistic(6.0);
  Prior prior_pos = Prior::uniform();
  Prior prior_neg = Prior::uniform();
};

std::optional<Err> validate(const DrParams& params);

// Regularizer weights from the log-base tuning rule:
// (1/ln h_pos, 0.1/ln h_neg). Both bases must exceed 1 so the logarithms
// are positive.
std::pair<double, double> tuned_lambdas(double h_pos, double h_neg);

}  // namespace drank
