#include "drank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "drank/csv.hpp"

namespace drank {

namespace {

constexpr double kScoreClampLo = 1e-7;
constexpr double kScoreClampHi = 1.0 - 1e-7;

void fill_cluster(FeatureMatrix& m, std::span<const double> center,
                  double stddev, std::size_t row, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, stddev);
  for (std::size_t k = 0; k < m.dim; ++k)
    m.data[row * m.dim + k] = center[k] + noise(rng);
}

}  // namespace

ScoreSample sample_scores(double mean, double stddev, std::size_t count,
                          std::uint64_t seed) {
  if (!(stddev > 0.0) || !std::isfinite(stddev))
    throw DrError(Err::BadSpec, "sample_scores: stddev must be positive");
  if (count == 0) throw DrError(Err::BadSpec, "sample_scores: count >= 1");
  if (!std::isfinite(mean))
    throw DrError(Err::BadSpec, "sample_scores: mean must be finite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(mean, stddev);
  ScoreSample out;
  out.mean = mean;
  out.stddev = stddev;
  out.values.resize(count);
  for (double& v : out.values)
    v = std::clamp(gauss(rng), kScoreClampLo, kScoreClampHi);
  return out;
}

GroupedDataset make_dataset(const GeneratorSpec& spec) {
  if (spec.dim < 2) throw DrError(Err::BadSpec, "make_dataset: dim >= 2");
  if (spec.images == 0)
    throw DrError(Err::BadSpec, "make_dataset: need at least one image");
  if (spec.n_neg < 1)
    throw DrError(Err::BadSpec, "make_dataset: every image needs negatives");
  if (!(spec.hard_fraction >= 0.0 && spec.hard_fraction <= 1.0))
    throw DrError(Err::BadSpec, "make_dataset: hard_fraction in [0,1]");
  if (!(spec.empty_positive_fraction >= 0.0 &&
        spec.empty_positive_fraction <= 1.0))
    throw DrError(Err::BadSpec, "make_dataset: empty fraction in [0,1]");
  if (!(spec.cluster_stddev > 0.0))
    throw DrError(Err::BadSpec, "make_dataset: cluster_stddev > 0");
  if (spec.empty_positive_fraction == 0.0 && spec.n_pos == 0)
    throw DrError(Err::BadSpec, "make_dataset: n_pos == 0 everywhere");

  std::vector<double> pos_center(spec.dim, 0.0);
  std::vector<double> hard_center(spec.dim, 0.0);
  std::vector<double> easy_center(spec.dim, 0.0);
  pos_center[0] = spec.separation / 2.0;
  hard_center[0] = -spec.separation / 2.0;
  easy_center[1] = -spec.easy_offset;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GroupedDataset data;
  data.spec = spec;
  data.images.resize(spec.images);
  for (ImageGroup& img : data.images) {
    const bool empty_pos = unit(rng) < spec.empty_positive_fraction;
    const std::size_t np = empty_pos ? 0 : spec.n_pos;

    img.positives.rows = np;
    img.positives.dim = spec.dim;
    img.positives.data.resize(np * spec.dim);
    for (std::size_t r = 0; r < np; ++r)
      fill_cluster(img.positives, pos_center, spec.cluster_stddev, r, rng);

    img.negatives.rows = spec.n_neg;
    img.negatives.dim = spec.dim;
    img.negatives.data.resize(spec.n_neg * spec.dim);
    for (std::size_t r = 0; r < spec.n_neg; ++r) {
      const bool hard = unit(rng) < spec.hard_fraction;
      if (hard) ++img.hard_negatives;
      fill_cluster(img.negatives, hard ? hard_center : easy_center,
                   spec.cluster_stddev, r, rng);
    }
  }
  return data;
}

void write_csv(const GroupedDataset& data, std::ostream& out) {
  const std::size_t dim = data.spec.dim;
  out << "image_id,label";
  for (std::size_t k = 0; k < dim; ++k) out << ",f" << k;
  out << "\n";
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    const ImageGroup& img = data.images[i];
    auto dump = [&](const FeatureMatrix& m, int label) {
      for (std::size_t r = 0; r < m.rows; ++r) {
        out << i << ',' << label;
        for (double v : m.row(r)) out << ',' << fmt9(v);
        out << "\n";
      }
    };
    dump(img.positives, 1);
    dump(img.negatives, 0);
  }
}

Histogram empirical_pdf(std::span<const double> values, std::size_t bins) {
  return empirical_pdf(values, std::span<const double>{}, bins);
}

Histogram empirical_pdf(std::span<const double> values,
                        std::span<const double> weights, std::size_t bins) {
  if (values.empty()) throw DrError(Err::EmptyInput, "empirical_pdf");
  if (bins < 2) throw DrError(Err::BadSpec, "empirical_pdf: bins >= 2");
  const bool weighted = !weights.empty();
  if (weighted && weights.size() != values.size())
    throw DrError(Err::BadSpec, "empirical_pdf: weight length mismatch");

  Histogram h;
  const double width = 1.0 / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    h.edges[b] = static_cast<double>(b) * width;
  h.densities.assign(bins, 0.0);

  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const double w = weighted ? weights[i] : 1.0;
    if (w < 0.0) throw DrError(Err::BadSpec, "empirical_pdf: negative weight");
    const auto bin = std::min<std::size_t>(
        bins - 1,
        static_cast<std::size_t>(std::max(v, 0.0) * static_cast<double>(bins)));
    h.densities[bin] += w;
    total += w;
  }
  if (!(total > 0.0))
    throw DrError(Err::BadSpec, "empirical_pdf: zero total weight");

  const double scale = 1.0 / (total * width);
  for (double& d : h.densities) d *= scale;
  return h;
}

}  // namespace drank
