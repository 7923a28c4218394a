#include "drank/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "drank/csv.hpp"

namespace drank {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kDatasetKeys = {
    {"images", "100"},       {"n_pos", "2"},
    {"n_neg", "2000"},       {"hard_fraction", "0.01"},
    {"empty_fraction", "0"}, {"dim", "4"},
    {"sigma", "0.25"},       {"separation", "2"},
    {"easy_offset", "6"},
};

const std::map<std::string, std::string> kLossKeys = {
    {"loss", "dr"},          {"lambda_pos", "1"},
    {"lambda_neg", "0.1"},   {"gamma", "0.5"},
    {"surrogate", "logistic"}, {"surrogate_l", "6"},
    {"surrogate_rho", "0.5"},  {"focal_alpha", "0.25"},
    {"focal_gamma", "2"},
};

const std::map<std::string, std::string> kTrainerKeys = {
    {"batch_size", "4"},   {"iterations", "2000"},
    {"learning_rate", "0.5"}, {"tau", "4"},
    {"init_prob", "0.5"},  {"lr_schedule", ""},
};

void merge(std::map<std::string, std::string>& into,
           const std::map<std::string, std::string>& from) {
  into.insert(from.begin(), from.end());
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out)
    throw DrError(Err::BadConfig, "cannot write " + (dir / name).string());
  return out;
}

fs::path prepare_out_dir(const ExperimentConfig& config) {
  fs::path dir = config.str("out");
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const ExperimentConfig& config, const fs::path& dir,
                    const std::string& command) {
  auto out = open_out(dir, "manifest.txt");
  config.write_manifest(out, command);
}

LossKind loss_kind_from(const std::string& name) {
  if (name == "dr") return LossKind::Dr;
  if (name == "neg_only") return LossKind::NegOnly;
  if (name == "all_pairs") return LossKind::AllPairs;
  if (name == "worst_case") return LossKind::WorstCase;
  if (name == "cross_entropy") return LossKind::CrossEntropy;
  if (name == "focal") return LossKind::Focal;
  throw DrError(Err::BadConfig, "unknown loss '" + name + "'");
}

std::vector<LrStep> parse_lr_schedule(const std::string& text) {
  std::vector<LrStep> schedule;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw DrError(Err::BadConfig,
                    "lr_schedule entries are iteration:factor, got " + item);
    schedule.push_back(
        {static_cast<std::size_t>(std::stoull(item.substr(0, colon))),
         std::stod(item.substr(colon + 1))});
  }
  return schedule;
}

constexpr double kSweepThresholds[] = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_center,density\n";
  for (std::size_t b = 0; b < h.densities.size(); ++b) {
    const double center = 0.5 * (h.edges[b] + h.edges[b + 1]);
    out << fmt9(center) << ',' << fmt9(h.densities[b]) << "\n";
  }
}

double kept_fraction(const std::vector<double>& scores, double threshold) {
  if (scores.empty()) return 0.0;
  std::size_t kept = 0;
  for (double s : scores)
    if (s >= threshold) ++kept;
  return static_cast<double>(kept) / static_cast<double>(scores.size());
}

}  // namespace

ExperimentConfig default_config(const std::string& command) {
  std::map<std::string, std::string> keys = {{"seed", "1"}, {"out", "out"}};
  if (command == "tilt-demo") {
    merge(keys, {{"count", "1000000"},
                 {"mean", "0.3"},
                 {"stddevs", "0.05,0.2"},
                 {"lambdas", "1e9,10,1,0.1,0.01"},
                 {"bins", "100"}});
  } else if (command == "loss-curves") {
    merge(keys, {{"z_min", "-1"},
                 {"z_max", "1"},
                 {"z_step", "0.01"},
                 {"rhos", "0.2,0.5"},
                 {"logistic_ls", "4,6,8,10"}});
  } else if (command == "gradcheck") {
    merge(keys, {{"instances", "200"},
                 {"step", "1e-5"},
                 {"threshold", "1e-5"},
                 {"max_pos", "20"},
                 {"max_neg", "500"},
                 {"corrupt", "0"}});
  } else if (command == "train") {
    merge(keys, kDatasetKeys);
    merge(keys, kLossKeys);
    merge(keys, kTrainerKeys);
    keys["bins"] = "100";
  } else if (command == "compare") {
    merge(keys, kDatasetKeys);
    merge(keys, kLossKeys);
    merge(keys, kTrainerKeys);
    keys.erase("loss");  // compare always trains the full set
    keys["seeds"] = "5";
    keys["learning_rate_pointwise"] = "0.001";
  } else {
    throw DrError(Err::BadConfig, "unknown command '" + command + "'");
  }
  return ExperimentConfig(std::move(keys));
}

const char* usage() {
  return "usage: drank <command> [--config FILE] [--seed N] [--out DIR] "
         "[key=value ...]\n"
         "commands: tilt-demo loss-curves gradcheck train compare\n";
}

std::pair<std::string, ExperimentConfig> parse_cli(int argc,
                                                   const char* const* argv) {
  if (argc < 2) throw DrError(Err::BadConfig, usage());
  const std::string command = argv[1];
  ExperimentConfig config = default_config(command);

  // file first, then overrides in argument order
  for (int i = 2; i < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      if (i + 1 >= argc)
        throw DrError(Err::BadConfig, "--config needs a file argument");
      config.load_file(argv[i + 1]);
    }
  }
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      ++i;
    } else if (arg == "--seed") {
      if (i + 1 >= argc) throw DrError(Err::BadConfig, "--seed needs a value");
      config.set("seed", argv[++i]);
    } else if (arg == "--out") {
      if (i + 1 >= argc) throw DrError(Err::BadConfig, "--out needs a value");
      config.set("out", argv[++i]);
    } else if (arg == "--corrupt") {
      config.set("corrupt", "1");
    } else if (arg.find('=') != std::string::npos) {
      const auto eq = arg.find('=');
      config.set(arg.substr(0, eq), arg.substr(eq + 1));
    } else {
      throw DrError(Err::BadConfig, "unexpected argument '" + arg + "'");
    }
  }
  return {command, std::move(config)};
}

GeneratorSpec dataset_spec_from(const ExperimentConfig& config) {
  GeneratorSpec spec;
  spec.dim = static_cast<std::size_t>(config.integer("dim"));
  spec.images = static_cast<std::size_t>(config.integer("images"));
  spec.n_pos = static_cast<std::size_t>(config.integer("n_pos"));
  spec.n_neg = static_cast<std::size_t>(config.integer("n_neg"));
  spec.hard_fraction = config.num("hard_fraction");
  spec.empty_positive_fraction = config.num("empty_fraction");
  spec.cluster_stddev = config.num("sigma");
  spec.separation = config.num("separation");
  spec.easy_offset = config.num("easy_offset");
  spec.seed = config.u64("seed");
  return spec;
}

LossSpec loss_spec_from(const ExperimentConfig& config,
                        const std::string& loss_name) {
  LossSpec spec;
  spec.kind = loss_kind_from(loss_name);
  spec.dr.lambda_pos = config.num("lambda_pos");
  spec.dr.lambda_neg = config.num("lambda_neg");
  spec.dr.gamma = config.num("gamma");
  const std::string surrogate = config.str("surrogate");
  if (surrogate == "logistic")
    spec.dr.surrogate = SurrogateSpec::logistic(config.num("surrogate_l"));
  else if (surrogate == "quadratic")
    spec.dr.surrogate = SurrogateSpec::quadratic(config.num("surrogate_rho"));
  else if (surrogate == "hinge")
    spec.dr.surrogate = SurrogateSpec::hinge();
  else
    throw DrError(Err::BadConfig, "unknown surrogate '" + surrogate + "'");
  spec.focal_alpha = config.num("focal_alpha");
  spec.focal_gamma = config.num("focal_gamma");
  return spec;
}

TrainerConfig trainer_config_from(const ExperimentConfig& config,
                                  const LossSpec& loss) {
  TrainerConfig tc;
  tc.batch_size = static_cast<std::size_t>(config.integer("batch_size"));
  tc.iterations = static_cast<std::size_t>(config.integer("iterations"));
  tc.learning_rate = config.num("learning_rate");
  tc.seed = config.u64("seed");
  tc.loss = loss;
  tc.tau = config.num("tau");
  tc.lr_schedule = parse_lr_schedule(config.str("lr_schedule"));
  tc.init_probability = config.num("init_prob");
  return tc;
}

double final_loss_average(const TrainTrace& trace, std::size_t window) {
  if (trace.records.empty()) return 0.0;
  const std::size_t n = std::min(window, trace.records.size());
  double sum = 0.0;
  for (std::size_t i = trace.records.size() - n; i < trace.records.size(); ++i)
    sum += trace.records[i].loss;
  return sum / static_cast<double>(n);
}

std::vector<GradSuiteReport> gradcheck_suite(std::uint64_t seed,
                                             std::size_t instances,
                                             std::size_t max_pos,
                                             std::size_t max_neg, double step,
                                             double threshold, bool corrupt) {
  struct Case {
    LossKind kind;
    LossFn fn;
    bool tilted;  // needs the small-gradient resampling rule
  };
  const DrParams defaults;
  const SurrogateSpec logistic = defaults.surrogate;
  std::vector<Case> cases;
  cases.push_back({LossKind::Dr,
                   [&](const ImageScores& s) { return dr_loss(s, defaults); },
                   true});
  cases.push_back(
      {LossKind::NegOnly,
       [&](const ImageScores& s) { return neg_only_loss(s, defaults); },
       true});
  cases.push_back({LossKind::AllPairs,
                   [&](const ImageScores& s) {
                     return all_pairs_loss(s, defaults.gamma, logistic);
                   },
                   false});
  cases.push_back({LossKind::WorstCase,
                   [&](const ImageScores& s) {
                     return worst_case_loss(s, defaults.gamma, logistic);
                   },
                   false});
  cases.push_back(
      {LossKind::CrossEntropy,
       [](const ImageScores& s) { return cross_entropy_loss(s); }, false});
  cases.push_back({LossKind::Focal,
                   [](const ImageScores& s) {
                     return focal_loss(s, 0.25, 2.0);
                   },
                   false});

  std::vector<GradSuiteReport> reports;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Case& lc = cases[c];
    std::mt19937_64 rng(seed + 1000003ULL * (c + 1));
    std::uniform_int_distribution<std::size_t> pos_count(1, max_pos);
    std::uniform_int_distribution<std::size_t> neg_count(1, max_neg);
    std::uniform_real_distribution<double> score(0.02, 0.98);

    LossFn fn = lc.fn;
    if (corrupt) {
      fn = [inner = lc.fn](const ImageScores& s) {
        LossResult r = inner(s);
        r.grad_neg[0] *= 1.1;
        return r;
      };
    }

    GradSuiteReport report;
    report.kind = lc.kind;
    report.passed = true;

    for (std::size_t i = 0; i < instances; ++i) {
      ImageScores inst;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        inst.positives.resize(pos_count(rng));
        inst.negatives.resize(neg_count(rng));
        for (double& p : inst.positives) p = score(rng);
        for (double& p : inst.negatives) p = score(rng);

        // Keep the extreme pair clear of a tie flip within the FD window.
        auto extremes_separated = [&](std::vector<double> v, bool want_max) {
          if (v.size() < 2) return true;
          std::sort(v.begin(), v.end());
          return want_max ? v[v.size() - 1] - v[v.size() - 2] > 10.0 * step
                          : v[1] - v[0] > 10.0 * step;
        };
        if (!extremes_separated(inst.negatives, true) ||
            !extremes_separated(inst.positives, false))
          continue;

        if (lc.tilted) {
          // Central differences cannot resolve coordinates whose true
          // gradient sits near the rounding floor of the loss values
          // (~1e-11 here); resample the instance rather than weaken the
          // comparison.
          const LossResult g = lc.fn(inst);
          auto too_small = [](const std::vector<double>& grad) {
            for (double v : grad)
              if (std::abs(v) < 1e-5) return true;
            return false;
          };
          if (too_small(g.grad_pos) || too_small(g.grad_neg)) continue;
        }
        break;
      }

      const GradCheckReport r = check_gradients(fn, inst, step, threshold);
      if (r.max_rel_error > report.max_rel_error)
        report.max_rel_error = r.max_rel_error;
      if (!r.passed) report.passed = false;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

int run_tilt_demo(const ExperimentConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  const auto stddevs = config.num_list("stddevs");
  const auto lambdas = config.num_list("lambdas");
  const auto count = static_cast<std::size_t>(config.integer("count"));
  const auto bins = static_cast<std::size_t>(config.integer("bins"));
  const double mean = config.num("mean");
  const std::uint64_t seed = config.u64("seed");

  for (std::size_t si = 0; si < stddevs.size(); ++si) {
    const ScoreSample sample =
        sample_scores(mean, stddevs[si], count, seed + si);
    for (double lambda : lambdas) {
      const TiltedDistribution tilted =
          tilt_negative(sample.values, lambda, Prior::uniform());
      const Histogram h = empirical_pdf(sample.values, tilted.weights, bins);
      auto out = open_out(dir, "pdf_" + fmt9(stddevs[si]) + "_" +
                                   fmt9(lambda) + ".csv");
      write_histogram_csv(out, h);
    }
  }
  write_manifest(config, dir, "tilt-demo");
  return 0;
}

int run_loss_curves(const ExperimentConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  const double z_min = config.num("z_min");
  const double z_max = config.num("z_max");
  const double z_step = config.num("z_step");
  if (!(z_step > 0.0) || !(z_max > z_min))
    throw DrError(Err::BadConfig, "loss-curves: bad z grid");
  const auto rhos = config.num_list("rhos");
  const auto ls = config.num_list("logistic_ls");

  auto out = open_out(dir, "losses.csv");
  out << "z,hinge";
  for (double rho : rhos) out << ",quadratic_rho" << fmt9(rho);
  for (double l : ls) out << ",logistic_L" << fmt9(l);
  out << "\n";

  const auto steps =
      static_cast<std::size_t>(std::llround((z_max - z_min) / z_step));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double z = z_min + static_cast<double>(i) * z_step;
    out << fmt9(z) << ',' << fmt9(evaluate(SurrogateSpec::hinge(), z).loss);
    for (double rho : rhos)
      out << ',' << fmt9(evaluate(SurrogateSpec::quadratic(rho), z).loss);
    for (double l : ls)
      out << ',' << fmt9(evaluate(SurrogateSpec::logistic(l), z).loss);
    out << "\n";
  }
  write_manifest(config, dir, "loss-curves");
  return 0;
}

int run_gradcheck(const ExperimentConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  const auto reports = gradcheck_suite(
      config.u64("seed"), static_cast<std::size_t>(config.integer("instances")),
      static_cast<std::size_t>(config.integer("max_pos")),
      static_cast<std::size_t>(config.integer("max_neg")), config.num("step"),
      config.num("threshold"), config.flag("corrupt"));

  auto out = open_out(dir, "gradcheck.csv");
  out << "loss,max_rel_error,passed\n";
  bool all_passed = true;
  for (const GradSuiteReport& r : reports) {
    out << to_string(r.kind) << ',' << fmt9(r.max_rel_error) << ','
        << (r.passed ? 1 : 0) << "\n";
    std::printf("%-14s max_rel_error=%.3e %s\n", to_string(r.kind),
                r.max_rel_error, r.passed ? "ok" : "FAILED");
    all_passed = all_passed && r.passed;
  }
  write_manifest(config, dir, "gradcheck");
  return all_passed ? 0 : 1;
}

int run_train(const ExperimentConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  write_manifest(config, dir, "train");

  const GroupedDataset data = make_dataset(dataset_spec_from(config));
  const TrainerConfig tc = trainer_config_from(
      config, loss_spec_from(config, config.str("loss")));
  const auto bins = static_cast<std::size_t>(config.integer("bins"));

  TrainResult result;
  try {
    result = train(data, tc);
  } catch (const DivergenceError& e) {
    auto trace_out = open_out(dir, "trace.csv");
    write_trace_csv(e.trace(), trace_out);
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  {
    auto out = open_out(dir, "trace.csv");
    write_trace_csv(result.trace, out);
  }
  {
    auto out = open_out(dir, "model.csv");
    out << "param,value\n";
    out << "bias," << fmt9(result.model.bias) << "\n";
    for (std::size_t k = 0; k < result.model.weights.size(); ++k)
      out << 'w' << k << ',' << fmt9(result.model.weights[k]) << "\n";
  }

  const EvalSummary summary =
      summarize_model(result.model, data, config.num("gamma"));
  if (!summary.pos_scores.empty()) {
    auto out = open_out(dir, "pdf_pos.csv");
    write_histogram_csv(out, empirical_pdf(summary.pos_scores, bins));
  }
  {
    auto out = open_out(dir, "pdf_neg.csv");
    write_histogram_csv(out, empirical_pdf(summary.neg_scores, bins));
  }
  {
    auto out = open_out(dir, "thresholds.csv");
    out << "threshold,frac_pos_kept,frac_neg_kept\n";
    for (double t : kSweepThresholds)
      out << fmt9(t) << ',' << fmt9(kept_fraction(summary.pos_scores, t))
          << ',' << fmt9(kept_fraction(summary.neg_scores, t)) << "\n";
  }
  return 0;
}

int run_compare(const ExperimentConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  write_manifest(config, dir, "compare");

  const auto seeds = static_cast<std::size_t>(config.integer("seeds"));
  if (seeds == 0) throw DrError(Err::BadConfig, "compare: seeds >= 1");
  const std::uint64_t base_seed = config.u64("seed");
  const double lr_ranking = config.num("learning_rate");
  const double lr_pointwise = config.num("learning_rate_pointwise");

  const char* names[] = {"dr",         "neg_only", "all_pairs",
                         "worst_case", "focal",    "cross_entropy"};

  auto out = open_out(dir, "summary.csv");
  out << "loss,status,final_loss,margin_pass_rate,mean_pos_score,"
         "mean_neg_score\n";

  for (const char* name : names) {
    const LossSpec loss = loss_spec_from(config, name);
    double loss_sum = 0.0, pass_sum = 0.0, pos_sum = 0.0, neg_sum = 0.0;
    std::size_t completed = 0, diverged = 0;

    for (std::size_t s = 0; s < seeds; ++s) {
      GeneratorSpec gen = dataset_spec_from(config);
      gen.seed = base_seed + s;
      const GroupedDataset data = make_dataset(gen);

      const bool pointwise = loss.kind == LossKind::CrossEntropy ||
                             loss.kind == LossKind::Focal;
      TrainerConfig tc = trainer_config_from(config, loss);
      tc.seed = base_seed + s;
      tc.learning_rate = pointwise ? lr_pointwise : lr_ranking;
      try {
        const TrainResult result = train(data, tc);
        const EvalSummary summary =
            summarize_model(result.model, data, config.num("gamma"));
        loss_sum += final_loss_average(result.trace, 100);
        pass_sum += summary.margin_pass_rate;
        pos_sum += summary.mean_pos;
        neg_sum += summary.mean_neg;
        ++completed;
      } catch (const DivergenceError&) {
        ++diverged;
      }
    }

    std::string status =
        diverged == 0 ? "ok" : "diverged:" + std::to_string(diverged);
    const double inv = completed > 0 ? 1.0 / static_cast<double>(completed)
                                     : std::numeric_limits<double>::quiet_NaN();
    out << name << ',' << status << ',' << fmt9(loss_sum * inv) << ','
        << fmt9(pass_sum * inv) << ',' << fmt9(pos_sum * inv) << ','
        << fmt9(neg_sum * inv) << "\n";
  }
  return 0;
}

int run_command(const std::string& command, const ExperimentConfig& config) {
  if (command == "tilt-demo") return run_tilt_demo(config);
  if (command == "loss-curves") return run_loss_curves(config);
  if (command == "gradcheck") return run_gradcheck(config);
  if (command == "train") return run_train(config);
  if (command == "compare") return run_compare(config);
  throw DrError(Err::BadConfig, "unknown command '" + command + "'");
}

}  // namespace drank
