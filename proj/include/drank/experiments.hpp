#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drank/expconfig.hpp"
#include "drank/gradcheck.hpp"
#include "drank/trainer.hpp"

namespace drank {

// Per-command key sets with defaults. Throws BadConfig for an unknown
// command. Commands: tilt-demo, loss-curves, gradcheck, train, compare.
ExperimentConfig default_config(const std::string& command);

// Parses `drank <command> [--config FILE] [--seed N] [--out DIR]
// [key=value ...]`. Flags and key=value arguments override file values.
std::pair<std::string, ExperimentConfig> parse_cli(int argc,
                                                   const char* const* argv);

const char* usage();

// Exit codes: 0 success, 1 validation/check failure, 2 divergence.
int run_command(const std::string& command, const ExperimentConfig& config);

int run_tilt_demo(const ExperimentConfig& config);
int run_loss_curves(const ExperimentConfig& config);
int run_gradcheck(const ExperimentConfig& config);
int run_train(const ExperimentConfig& config);
int run_compare(const ExperimentConfig& config);

// Shared pieces, also used by the acceptance suite.

GeneratorSpec dataset_spec_from(const ExperimentConfig& config);
LossSpec loss_spec_from(const ExperimentConfig& config,
                        const std::string& loss_name);
TrainerConfig trainer_config_from(const ExperimentConfig& config,
                                  const LossSpec& loss);

struct GradSuiteReport {
  LossKind kind;
  double max_rel_error = 0.0;
  bool passed = false;
};

// Finite-difference sweep of all six losses over seeded random
// instances. Instances are curated so the check stays informative:
// extreme scores are kept clear of tie flips for the worst-case loss and
// tilted losses are resampled when a gradient coordinate falls below the
// resolution of central differences. `corrupt` perturbs one gradient
// entry to prove the harness detects errors.
std::vector<GradSuiteReport> gradcheck_suite(std::uint64_t seed,
                                             std::size_t instances,
                                             std::size_t max_pos,
                                             std::size_t max_neg, double step,
                                             double threshold, bool corrupt);

// Mean loss over the trailing `window` trace records.
double final_loss_average(const TrainTrace& trace, std::size_t window);

}  // namespace drank
