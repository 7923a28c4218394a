#pragma once

#include <random>
#include <vector>

#include "drank/scores.hpp"

namespace drank::test {

inline std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n,
                                         double lo = 0.02, double hi = 0.98) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

inline ImageScores random_instance(std::mt19937_64& rng, std::size_t max_pos,
                                   std::size_t max_neg,
                                   std::size_t min_pos = 1) {
  std::uniform_int_distribution<std::size_t> np(min_pos, max_pos);
  std::uniform_int_distribution<std::size_t> nn(1, max_neg);
  ImageScores s;
  s.positives = random_scores(rng, np(rng));
  s.negatives = random_scores(rng, nn(rng));
  return s;
}

}  // namespace drank::test
