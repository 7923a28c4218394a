#include "drank/drloss.hpp"

#include <algorithm>
#include <cmath>

namespace drank {

namespace {

void require_positives(const ImageScores& scores) {
  if (scores.positives.empty())
    throw DrError(Err::NoPositives, "loss undefined without positives");
}

void require_params(const DrParams& params) {
  if (auto err = validate(params)) throw DrError(*err, "invalid DrParams");
}

}  // namespace

LossResult dr_loss(const ImageScores& scores, const DrParams& params) {
  require_valid(scores);
  require_params(params);

  const TiltedDistribution neg =
      tilt_negative(scores.negatives, params.lambda_neg, params.prior_neg);

  TiltedDistribution pos;
  double p_hat_pos = 1.0;  // empty-positive convention
  if (!scores.positives.empty()) {
    pos = tilt_positive(scores.positives, params.lambda_pos, params.prior_pos);
    p_hat_pos = pos.expectation;
  }

  const double z = neg.expectation - p_hat_pos + params.gamma;
  const auto [loss, slope] = evaluate(params.surrogate, z);

  LossResult out;
  out.loss = loss;
  out.grad_neg.resize(scores.negatives.size());
  for (std::size_t j = 0; j < scores.negatives.size(); ++j) {
    out.grad_neg[j] =
        slope * neg.weights[j] *
        (1.0 + (scores.negatives[j] - neg.expectation) / params.lambda_neg);
  }
  out.grad_pos.resize(scores.positives.size());
  for (std::size_t j = 0; j < scores.positives.size(); ++j) {
    out.grad_pos[j] =
        slope * pos.weights[j] *
        (-1.0 + (scores.positives[j] - pos.expectation) / params.lambda_pos);
  }
  return out;
}

LossResult all_pairs_loss(const ImageScores& scores, double gamma,
                          const SurrogateSpec& surrogate) {
  require_valid(scores);
  require_positives(scores);

  const std::size_t np = scores.n_pos();
  const std::size_t nn = scores.n_neg();
  const double inv = 1.0 / (static_cast<double>(np) * static_cast<double>(nn));

  LossResult out;
  out.grad_pos.assign(np, 0.0);
  out.grad_neg.assign(nn, 0.0);
  for (std::size_t k = 0; k < np; ++k) {
    for (std::size_t j = 0; j < nn; ++j) {
      const double z = scores.negatives[j] - scores.positives[k] + gamma;
      const auto [loss, slope] = evaluate(surrogate, z);
      out.loss += loss * inv;
      out.grad_neg[j] += slope * inv;
      out.grad_pos[k] -= slope * inv;
    }
  }
  return out;
}

LossResult worst_case_loss(const ImageScores& scores, double gamma,
                           const SurrogateSpec& surrogate) {
  require_valid(scores);
  require_positives(scores);

  const auto max_neg = std::max_element(scores.negatives.begin(),
                                        scores.negatives.end());
  const auto min_pos = std::min_element(scores.positives.begin(),
                                        scores.positives.end());
  const double z = *max_neg - *min_pos + gamma;
  const auto [loss, slope] = evaluate(surrogate, z);

  LossResult out;
  out.loss = loss;
  out.grad_pos.assign(scores.n_pos(), 0.0);
  out.grad_neg.assign(scores.n_neg(), 0.0);
  out.grad_neg[static_cast<std::size_t>(max_neg - scores.negatives.begin())] =
      slope;
  out.grad_pos[static_cast<std::size_t>(min_pos - scores.positives.begin())] =
      -slope;
  return out;
}

LossResult neg_only_loss(const ImageScores& scores, const DrParams& params) {
  require_valid(scores);
  require_params(params);
  require_positives(scores);

  const TiltedDistribution neg =
      tilt_negative(scores.negatives, params.lambda_neg, params.prior_neg);

  const std::size_t np = scores.n_pos();
  const double inv = 1.0 / static_cast<double>(np);

  LossResult out;
  out.grad_pos.resize(np);
  double slope_sum = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    const double z = neg.expectation - scores.positives[k] + params.gamma;
    const auto [loss, slope] = evaluate(params.surrogate, z);
    out.loss += loss * inv;
    out.grad_pos[k] = -slope * inv;
    slope_sum += slope;
  }

  const double scale = slope_sum * inv;
  out.grad_neg.resize(scores.n_neg());
  for (std::size_t j = 0; j < scores.n_neg(); ++j) {
    out.grad_neg[j] =
        scale * neg.weights[j] *
        (1.0 + (scores.negatives[j] - neg.expectation) / params.lambda_neg);
  }
  return out;
}

LossResult cross_entropy_loss(const ImageScores& scores) {
  require_valid(scores);

  LossResult out;
  out.grad_pos.resize(scores.n_pos());
  for (std::size_t k = 0; k < scores.n_pos(); ++k) {
    const double p = scores.positives[k];
    out.loss -= std::log(p);
    out.grad_pos[k] = -1.0 / p;
  }
  out.grad_neg.resize(scores.n_neg());
  for (std::size_t j = 0; j < scores.n_neg(); ++j) {
    const double p = scores.negatives[j];
    out.loss -= std::log1p(-p);
    out.grad_neg[j] = 1.0 / (1.0 - p);
  }
  return out;
}

LossResult focal_loss(const ImageScores& scores, double alpha,
                      double gamma_f) {
  require_valid(scores);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DrError(Err::BadSpec, "focal alpha must be in (0,1)");
  if (!(gamma_f >= 0.0) || !std::isfinite(gamma_f))
    throw DrError(Err::BadSpec, "focal gamma must be >= 0");

  LossResult out;
  out.grad_pos.resize(scores.n_pos());
  for (std::size_t k = 0; k < scores.n_pos(); ++k) {
    const double p = scores.positives[k];
    const double w = std::pow(1.0 - p, gamma_f);
    out.loss -= alpha * w * std::log(p);
    double g = -alpha * w / p;
    if (gamma_f > 0.0)
      g += alpha * gamma_f * std::pow(1.0 - p, gamma_f - 1.0) * std::log(p);
    out.grad_pos[k] = g;
  }
  out.grad_neg.resize(scores.n_neg());
  for (std::size_t j = 0; j < scores.n_neg(); ++j) {
    const double p = scores.negatives[j];
    const double w = std::pow(p, gamma_f);
    out.loss -= (1.0 - alpha) * w * std::log1p(-p);
    double g = (1.0 - alpha) * w / (1.0 - p);
    if (gamma_f > 0.0)
      g -= (1.0 - alpha) * gamma_f * std::pow(p, gamma_f - 1.0) *
           std::log1p(-p);
    out.grad_neg[j] = g;
  }
  return out;
}

MarginReport margin_check(const ImageScores& scores, double gamma) {
  require_valid(scores);
  require_positives(scores);

  MarginReport report;
  report.min_pos =
      *std::min_element(scores.positives.begin(), scores.positives.end());
  report.max_neg =
      *std::max_element(scores.negatives.begin(), scores.negatives.end());
  report.satisfies =
      report.min_pos > gamma && report.max_neg <= 1.0 - gamma;
  return report;
}

}  // namespace drank
