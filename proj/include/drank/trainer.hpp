#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "drank/drloss.hpp"
#include "drank/synth.hpp"

namespace drank {

// Linear scorer: sigmoid(w . x + b). Probabilities are clamped into
// [1e-7, 1-1e-7] before any loss sees them, so the loss core stays total
// on its (0,1) domain.
struct Model {
  std::vector<double> weights;
  double bias = 0.0;

  double logit(std::span<const double> features) const;
  double score(std::span<const double> features) const;
};

enum class LossKind { Dr, NegOnly, AllPairs, WorstCase, CrossEntropy, Focal };

const char* to_string(LossKind kind);

// Pairwise losses are undefined on empty-positive images; the trainer
// skips such images for them.
bool needs_positives(LossKind kind);

struct LossSpec {
  LossKind kind = LossKind::Dr;
  DrParams dr;  // lambda/gamma/surrogate for the ranking family
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
};

LossResult evaluate_loss(const LossSpec& spec, const ImageScores& scores);

struct LrStep {
  std::size_t iteration;  // lr is multiplied by factor entering this step
  double factor;
};

// Optional auxiliary objective evaluated once per iteration. Returns its
// loss and accumulates its parameter gradient. Weighted by tau.
using AuxLoss =
    std::function<double(const Model&, std::vector<double>& grad_w,
                         double& grad_b)>;

struct TrainerConfig {
  std::size_t batch_size = 4;
  std::size_t iterations = 2000;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
  LossSpec loss;
  double tau = 4.0;  // weight on the auxiliary hook
  AuxLoss aux;       // default: no auxiliary loss
  std::vector<LrStep> lr_schedule;
  double init_probability = 0.5;
};

struct TraceRecord {
  double loss;
  double grad_norm_sq;
  double lr;
};

struct TrainTrace {
  std::vector<TraceRecord> records;       // one per iteration
  std::vector<std::size_t> clamp_events;  // sigmoid clamps per iteration
};

// Header `iter,loss,grad_norm_sq,lr`, one row per iteration, LF endings.
void write_trace_csv(const TrainTrace& trace, std::ostream& out);

class DivergenceError : public DrError {
 public:
  DivergenceError(const std::string& what, TrainTrace trace)
      : DrError(Err::DivergenceDetected, what), trace_(std::move(trace)) {}

  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

// Small seeded random weights plus a bias chosen so the initial score
// sits near initial_probability.
Model init_model(std::size_t dim, double initial_probability,
                 std::uint64_t seed);

// Epoch-preserving rescaling: batch m/alpha, iterations alpha*T, rate
// eta/alpha. The rescaled batch size must land on a positive integer.
TrainerConfig scaled_config(const TrainerConfig& base, double alpha);

// Mean loss and parameter gradient over the given images. Exposed so the
// sigmoid chain rule can be finite-difference checked directly.
struct BatchEval {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
  std::size_t clamp_events = 0;
};

BatchEval evaluate_batch(const Model& model, const GroupedDataset& data,
                         std::span<const std::size_t> image_indices,
                         const LossSpec& loss);

struct TrainResult {
  Model model;
  TrainTrace trace;
};

// Deterministic mini-batch SGD: each iteration draws batch_size images
// with replacement, averages their per-image gradients and steps theta.
TrainResult train(const GroupedDataset& data, const TrainerConfig& config);

// Post-training evaluation pooled over the dataset.
struct EvalSummary {
  double margin_pass_rate = 0.0;  // over images that have positives
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
};

EvalSummary summarize_model(const Model& model, const GroupedDataset& data,
                            double gamma);

}  // namespace drank
