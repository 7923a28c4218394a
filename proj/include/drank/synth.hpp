#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "drank/error.hpp"

namespace drank {

// Gaussian score sample clamped into (0,1), used for the distribution
// drift studies.
struct ScoreSample {
  std::vector<double> values;
  double mean = 0.0;    // of the generating Gaussian, before clamping
  double stddev = 0.0;
};

ScoreSample sample_scores(double mean, double stddev, std::size_t count,
                          std::uint64_t seed);

// Row-major feature block, one row per candidate.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // rows * dim

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * dim, dim};
  }
};

struct ImageGroup {
  FeatureMatrix positives;
  FeatureMatrix negatives;
  std::size_t hard_negatives = 0;  // rows drawn from the hard cluster
};

// Cluster geometry: positives around +separation/2 on axis 0, hard
// negatives mirrored at -separation/2 (separated from positives only
// along axis 0), easy negatives shifted far down axis 1. Remaining axes
// carry pure noise. The dataset is linearly separable when the cluster
// separation comfortably exceeds the within-cluster stddev.
struct GeneratorSpec {
  std::size_t dim = 4;
  std::size_t images = 100;
  std::size_t n_pos = 2;
  std::size_t n_neg = 2000;
  double hard_fraction = 0.01;
  double empty_positive_fraction = 0.0;
  double cluster_stddev = 0.25;
  double separation = 2.0;   // positive-center to hard-center distance
  double easy_offset = 6.0;  // easy-cluster displacement along axis 1
  std::uint64_t seed = 1;
};

struct GroupedDataset {
  std::vector<ImageGroup> images;
  GeneratorSpec spec;
};

GroupedDataset make_dataset(const GeneratorSpec& spec);

// One row per candidate: image_id,label,f0..f{d-1}. Label 1 marks
// positives.
void write_csv(const GroupedDataset& data, std::ostream& out);

// Equal-width histogram over [0,1] whose densities integrate to 1.
struct Histogram {
  std::vector<double> edges;      // bins + 1
  std::vector<double> densities;  // bins
};

Histogram empirical_pdf(std::span<const double> values, std::size_t bins);

// Weighted variant; weights must be non-negative with a positive sum.
Histogram empirical_pdf(std::span<const double> values,
                        std::span<const double> weights, std::size_t bins);

}  // namespace drank
