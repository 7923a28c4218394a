#include "drank/trainer.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "drank/csv.hpp"

namespace drank {

namespace {

constexpr double kClampLo = 1e-7;
constexpr double kClampHi = 1.0 - 1e-7;

double clamp_prob(double p, std::size_t& clamps) {
  if (p < kClampLo) {
    ++clamps;
    return kClampLo;
  }
  if (p > kClampHi) {
    ++clamps;
    return kClampHi;
  }
  return p;
}

}  // namespace

double Model::logit(std::span<const double> features) const {
  double s = bias;
  for (std::size_t k = 0; k < weights.size(); ++k)
    s += weights[k] * features[k];
  return s;
}

double Model::score(std::span<const double> features) const {
  const double p = 1.0 / (1.0 + std::exp(-logit(features)));
  std::size_t ignored = 0;
  return clamp_prob(p, ignored);
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Dr:
      return "dr";
    case LossKind::NegOnly:
      return "neg_only";
    case LossKind::AllPairs:
      return "all_pairs";
    case LossKind::WorstCase:
      return "worst_case";
    case LossKind::CrossEntropy:
      return "cross_entropy";
    case LossKind::Focal:
      return "focal";
  }
  return "unknown";
}

bool needs_positives(LossKind kind) {
  switch (kind) {
    case LossKind::NegOnly:
    case LossKind::AllPairs:
    case LossKind::WorstCase:
      return true;
    default:
      return false;
  }
}

LossResult evaluate_loss(const LossSpec& spec, const ImageScores& scores) {
  switch (spec.kind) {
    case LossKind::Dr:
      return dr_loss(scores, spec.dr);
    case LossKind::NegOnly:
      return neg_only_loss(scores, spec.dr);
    case LossKind::AllPairs:
      return all_pairs_loss(scores, spec.dr.gamma, spec.dr.surrogate);
    case LossKind::WorstCase:
      return worst_case_loss(scores, spec.dr.gamma, spec.dr.surrogate);
    case LossKind::CrossEntropy:
      return cross_entropy_loss(scores);
    case LossKind::Focal:
      return focal_loss(scores, spec.focal_alpha, spec.focal_gamma);
  }
  throw DrError(Err::BadSpec, "unknown loss kind");
}

Model init_model(std::size_t dim, double initial_probability,
                 std::uint64_t seed) {
  if (dim == 0) throw DrError(Err::BadSpec, "init_model: dim >= 1");
  if (!(initial_probability > 0.0 && initial_probability < 1.0))
    throw DrError(Err::BadSpec, "init_model: initial probability in (0,1)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  Model m;
  m.weights.resize(dim);
  for (double& w : m.weights) w = noise(rng);
  m.bias = std::log(initial_probability / (1.0 - initial_probability));
  return m;
}

TrainerConfig scaled_config(const TrainerConfig& base, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DrError(Err::BadAlpha, "alpha must be a positive real");
  const double m = static_cast<double>(base.batch_size) / alpha;
  const auto rounded = std::llround(m);
  if (rounded < 1 || std::abs(m - static_cast<double>(rounded)) > 1e-9)
    throw DrError(Err::BadAlpha, "batch size / alpha is not a positive integer");

  TrainerConfig out = base;
  out.batch_size = static_cast<std::size_t>(rounded);
  out.iterations = static_cast<std::size_t>(
      std::llround(static_cast<double>(base.iterations) * alpha));
  out.learning_rate = base.learning_rate / alpha;
  return out;
}

BatchEval evaluate_batch(const Model& model, const GroupedDataset& data,
                         std::span<const std::size_t> image_indices,
                         const LossSpec& loss) {
  if (image_indices.empty())
    throw DrError(Err::EmptyInput, "evaluate_batch: no images");
  if (model.weights.size() != data.spec.dim)
    throw DrError(Err::BadSpec, "evaluate_batch: model/dataset dim mismatch");

  const std::size_t dim = model.weights.size();
  BatchEval ev;
  ev.grad_w.assign(dim, 0.0);

  bool finite = true;
  auto squash = [&](std::span<const double> features) {
    const double s = model.logit(features);
    if (!std::isfinite(s)) finite = false;
    return clamp_prob(1.0 / (1.0 + std::exp(-s)), ev.clamp_events);
  };

  ImageScores scores;
  for (std::size_t idx : image_indices) {
    const ImageGroup& img = data.images.at(idx);

    scores.positives.resize(img.positives.rows);
    for (std::size_t r = 0; r < img.positives.rows; ++r)
      scores.positives[r] = squash(img.positives.row(r));
    scores.negatives.resize(img.negatives.rows);
    for (std::size_t r = 0; r < img.negatives.rows; ++r)
      scores.negatives[r] = squash(img.negatives.row(r));

    // An overflowed model marks the batch as diverged rather than
    // surfacing a score-validation error downstream.
    if (!finite) {
      ev.loss = std::numeric_limits<double>::quiet_NaN();
      return ev;
    }

    if (scores.positives.empty() && needs_positives(loss.kind)) continue;

    const LossResult r = evaluate_loss(loss, scores);
    ev.loss += r.loss;

    auto back_propagate = [&](const FeatureMatrix& feats,
                              const std::vector<double>& probs,
                              const std::vector<double>& grad) {
      for (std::size_t j = 0; j < feats.rows; ++j) {
        const double p = probs[j];
        const double g = grad[j] * p * (1.0 - p);  // dp/dlogit
        const auto row = feats.row(j);
        for (std::size_t k = 0; k < dim; ++k) ev.grad_w[k] += g * row[k];
        ev.grad_b += g;
      }
    };
    back_propagate(img.positives, scores.positives, r.grad_pos);
    back_propagate(img.negatives, scores.negatives, r.grad_neg);
  }

  const double inv = 1.0 / static_cast<double>(image_indices.size());
  ev.loss *= inv;
  for (double& g : ev.grad_w) g *= inv;
  ev.grad_b *= inv;
  return ev;
}

TrainResult train(const GroupedDataset& data, const TrainerConfig& config) {
  if (data.images.empty())
    throw DrError(Err::BadSpec, "train: dataset is empty");
  if (config.batch_size == 0 || config.batch_size > data.images.size())
    throw DrError(Err::BadSpec, "train: batch size in [1, images]");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
    throw DrError(Err::BadSpec, "train: learning rate must be positive");
  if (!(config.tau >= 0.0)) throw DrError(Err::BadSpec, "train: tau >= 0");

  const std::size_t dim = data.spec.dim;
  TrainResult result;
  result.model = init_model(dim, config.init_probability, config.seed);
  result.trace.records.reserve(config.iterations);
  result.trace.clamp_events.reserve(config.iterations);

  // Separate stream from init_model so the two ops stay independently
  // reproducible.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, data.images.size() - 1);

  double lr = config.learning_rate;
  std::vector<std::size_t> batch(config.batch_size);
  std::vector<double> aux_gw;

  for (std::size_t t = 0; t < config.iterations; ++t) {
    for (const LrStep& step : config.lr_schedule)
      if (step.iteration == t) lr *= step.factor;

    for (std::size_t& b : batch) b = pick(rng);
    BatchEval ev = evaluate_batch(result.model, data, batch, config.loss);

    double total_loss = ev.loss;
    if (config.aux) {
      aux_gw.assign(dim, 0.0);
      double aux_gb = 0.0;
      total_loss += config.tau * config.aux(result.model, aux_gw, aux_gb);
      for (std::size_t k = 0; k < dim; ++k)
        ev.grad_w[k] += config.tau * aux_gw[k];
      ev.grad_b += config.tau * aux_gb;
    }

    double grad_norm_sq = ev.grad_b * ev.grad_b;
    for (double g : ev.grad_w) grad_norm_sq += g * g;

    if (!std::isfinite(total_loss) || !std::isfinite(grad_norm_sq))
      throw DivergenceError("loss became non-finite at iteration " +
                                std::to_string(t),
                            std::move(result.trace));

    result.trace.records.push_back({total_loss, grad_norm_sq, lr});
    result.trace.clamp_events.push_back(ev.clamp_events);

    for (std::size_t k = 0; k < dim; ++k)
      result.model.weights[k] -= lr * ev.grad_w[k];
    result.model.bias -= lr * ev.grad_b;
  }
  return result;
}

void write_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "iter,loss,grad_norm_sq,lr\n";
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    const TraceRecord& r = trace.records[t];
    out << t << ',' << fmt9(r.loss) << ',' << fmt9(r.grad_norm_sq) << ','
        << fmt9(r.lr) << "\n";
  }
}

EvalSummary summarize_model(const Model& model, const GroupedDataset& data,
                            double gamma) {
  EvalSummary sum;
  std::size_t scored_images = 0;
  std::size_t passed = 0;
  for (const ImageGroup& img : data.images) {
    ImageScores scores;
    scores.positives.resize(img.positives.rows);
    for (std::size_t r = 0; r < img.positives.rows; ++r)
      scores.positives[r] = model.score(img.positives.row(r));
    scores.negatives.resize(img.negatives.rows);
    for (std::size_t r = 0; r < img.negatives.rows; ++r)
      scores.negatives[r] = model.score(img.negatives.row(r));

    if (!scores.positives.empty()) {
      ++scored_images;
      if (margin_check(scores, gamma).satisfies) ++passed;
    }
    sum.pos_scores.insert(sum.pos_scores.end(), scores.positives.begin(),
                          scores.positives.end());
    sum.neg_scores.insert(sum.neg_scores.end(), scores.negatives.begin(),
                          scores.negatives.end());
  }
  if (scored_images > 0)
    sum.margin_pass_rate =
        static_cast<double>(passed) / static_cast<double>(scored_images);
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  sum.mean_pos = mean(sum.pos_scores);
  sum.mean_neg = mean(sum.neg_scores);
  return sum;
}

}  // namespace drank
