#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "drank/drloss.hpp"
#include "drank/gradcheck.hpp"
#include "helpers.hpp"

using namespace drank;

namespace {

// Independent brute-force oracle for the pairwise ranking objective:
// accumulates loss and per-score gradients pair by pair, never touching
// the vectorized implementation.
LossResult pairwise_oracle(const ImageScores& s, double gamma,
                           const SurrogateSpec& surrogate) {
  LossResult out;
  out.grad_pos.assign(s.n_pos(), 0.0);
  out.grad_neg.assign(s.n_neg(), 0.0);
  const double inv =
      1.0 / (static_cast<double>(s.n_pos()) * static_cast<double>(s.n_neg()));
  for (std::size_t k = 0; k < s.n_pos(); ++k) {
    for (std::size_t j = 0; j < s.n_neg(); ++j) {
      const auto [loss, slope] =
          evaluate(surrogate, s.negatives[j] - s.positives[k] + gamma);
      out.loss += inv * loss;
      out.grad_neg[j] += inv * slope;
      out.grad_pos[k] -= inv * slope;
    }
  }
  return out;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("drloss");

TEST_CASE("singleton dr loss collapses to the scalar surrogate") {
  const ImageScores s{{0.9}, {0.1}};
  for (double lambda : {1e-3, 0.1, 1.0, 1e6}) {
    DrParams params;
    params.lambda_pos = lambda;
    params.lambda_neg = lambda;
    const LossResult r = dr_loss(s, params);
    // z = 0.1 - 0.9 + 0.5 = -0.3
    CHECK(std::abs(r.loss - std::log1p(std::exp(-1.8)) / 6.0) < 1e-12);
    REQUIRE(r.grad_pos.size() == 1);
    REQUIRE(r.grad_neg.size() == 1);
    CHECK(r.grad_neg[0] > 0.0);
    CHECK(r.grad_pos[0] < 0.0);
  }
}

TEST_CASE("empty-positive images use the P+ = 1 convention") {
  const ImageScores s{{}, {0.1}};
  const DrParams params;
  const LossResult r = dr_loss(s, params);
  // z = 0.1 - 1 + 0.5 = -0.4
  CHECK(std::abs(r.loss - std::log1p(std::exp(6.0 * -0.4)) / 6.0) < 1e-12);
  CHECK(r.grad_pos.empty());
  REQUIRE(r.grad_neg.size() == 1);
  CHECK(std::isfinite(r.grad_neg[0]));
  CHECK(r.loss >= 0.0);
}

TEST_CASE("dr gradients match finite differences on a random instance") {
  std::mt19937_64 rng(2024);
  ImageScores s;
  s.positives = test::random_scores(rng, 5);
  s.negatives = test::random_scores(rng, 50);
  const DrParams params;
  const auto report = check_gradients(
      [&](const ImageScores& in) { return dr_loss(in, params); }, s, 1e-5,
      1e-5);
  CHECK(report.passed);
}

TEST_CASE("dr gradients respect the mask prior") {
  ImageScores s{{0.7, 0.8}, {0.1, 0.4, 0.6, 0.3}};
  DrParams params;
  params.prior_neg = Prior::mask({1, 2});
  const LossResult r = dr_loss(s, params);
  CHECK(r.grad_neg[0] == 0.0);
  CHECK(r.grad_neg[3] == 0.0);
  CHECK(r.grad_neg[2] != 0.0);
  const auto report = check_gradients(
      [&](const ImageScores& in) { return dr_loss(in, params); }, s, 1e-6,
      1e-4);
  CHECK(report.passed);
}

TEST_CASE("all_pairs on a singleton equals dr loss") {
  const ImageScores s{{0.9}, {0.1}};
  const DrParams params;
  const LossResult dr = dr_loss(s, params);
  const LossResult ap = all_pairs_loss(s, params.gamma, params.surrogate);
  CHECK(std::abs(dr.loss - ap.loss) < 1e-12);
  CHECK(max_abs_diff(dr.grad_pos, ap.grad_pos) < 1e-12);
  CHECK(max_abs_diff(dr.grad_neg, ap.grad_neg) < 1e-12);
}

TEST_CASE("all_pairs hinge hand example") {
  const ImageScores s{{0.6, 0.8}, {0.3, 0.5}};
  const LossResult r = all_pairs_loss(s, 0.5, SurrogateSpec::hinge());
  // pairs: [0.2, 0.4, 0.0, 0.2]+ averaged
  CHECK(std::abs(r.loss - 0.2) < 1e-15);
}

TEST_CASE("all_pairs equals the brute-force oracle") {
  std::mt19937_64 rng(515);
  for (int i = 0; i < 50; ++i) {
    ImageScores s;
    s.positives = test::random_scores(rng, 1 + rng() % 30);
    s.negatives = test::random_scores(rng, 1 + rng() % 300);
    const SurrogateSpec surrogate = (i % 2 == 0)
                                        ? SurrogateSpec::logistic(6.0)
                                        : SurrogateSpec::quadratic(0.5);
    const LossResult fast = all_pairs_loss(s, 0.5, surrogate);
    const LossResult slow = pairwise_oracle(s, 0.5, surrogate);
    CHECK(std::abs(fast.loss - slow.loss) < 1e-12);
    CHECK(max_abs_diff(fast.grad_pos, slow.grad_pos) < 1e-12);
    CHECK(max_abs_diff(fast.grad_neg, slow.grad_neg) < 1e-12);
  }
}

TEST_CASE("worst_case reads off the extreme pair") {
  const ImageScores s{{0.6, 0.9}, {0.1, 0.4}};
  const LossResult r = worst_case_loss(s, 0.5, SurrogateSpec::hinge());
  CHECK(std::abs(r.loss - 0.3) < 1e-15);  // 0.4 - 0.6 + 0.5
  CHECK(r.grad_neg[0] == 0.0);
  CHECK(r.grad_neg[1] == 1.0);
  CHECK(r.grad_pos[0] == -1.0);
  CHECK(r.grad_pos[1] == 0.0);
}

TEST_CASE("worst_case breaks ties on the first index") {
  const ImageScores s{{0.6, 0.6}, {0.4, 0.4}};
  const LossResult r = worst_case_loss(s, 0.5, SurrogateSpec::hinge());
  CHECK(r.grad_neg[0] == 1.0);
  CHECK(r.grad_neg[1] == 0.0);
  CHECK(r.grad_pos[0] == -1.0);
  CHECK(r.grad_pos[1] == 0.0);
}

TEST_CASE("worst_case on singletons equals all_pairs") {
  const ImageScores s{{0.7}, {0.45}};
  const SurrogateSpec spec = SurrogateSpec::logistic(6.0);
  const LossResult wc = worst_case_loss(s, 0.5, spec);
  const LossResult ap = all_pairs_loss(s, 0.5, spec);
  CHECK(std::abs(wc.loss - ap.loss) < 1e-15);
  CHECK(max_abs_diff(wc.grad_pos, ap.grad_pos) < 1e-15);
  CHECK(max_abs_diff(wc.grad_neg, ap.grad_neg) < 1e-15);
}

TEST_CASE("dr approaches worst_case as both lambdas vanish") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 20; ++i) {
    // score gaps of at least 0.01 keep the zero-temperature limit crisp
    std::vector<double> pool;
    for (int j = 0; j < 60; ++j) pool.push_back(0.03 + 0.015 * j);
    std::shuffle(pool.begin(), pool.end(), rng);
    ImageScores s;
    s.positives.assign(pool.begin(), pool.begin() + 8);
    s.negatives.assign(pool.begin() + 8, pool.begin() + 40);

    DrParams params;
    params.lambda_pos = 1e-6;
    params.lambda_neg = 1e-6;
    const LossResult dr = dr_loss(s, params);
    const LossResult wc = worst_case_loss(s, params.gamma, params.surrogate);
    CHECK(std::abs(dr.loss - wc.loss) < 1e-4);
  }
}

TEST_CASE("dr with huge lambdas ranks the plain means") {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 20; ++i) {
    ImageScores s;
    s.positives = test::random_scores(rng, 1 + rng() % 10);
    s.negatives = test::random_scores(rng, 1 + rng() % 100);
    DrParams params;
    params.lambda_pos = 1e9;
    params.lambda_neg = 1e9;
    const double mp =
        std::accumulate(s.positives.begin(), s.positives.end(), 0.0) /
        static_cast<double>(s.n_pos());
    const double mn =
        std::accumulate(s.negatives.begin(), s.negatives.end(), 0.0) /
        static_cast<double>(s.n_neg());
    const double expected =
        evaluate(params.surrogate, mn - mp + params.gamma).loss;
    CHECK(std::abs(dr_loss(s, params).loss - expected) < 1e-6);
  }
}

TEST_CASE("neg_only on a single positive equals dr with the same lambda_neg") {
  std::mt19937_64 rng(81);
  for (int i = 0; i < 10; ++i) {
    ImageScores s;
    s.positives = test::random_scores(rng, 1);
    s.negatives = test::random_scores(rng, 40);
    const DrParams params;
    const LossResult no = neg_only_loss(s, params);
    const LossResult dr = dr_loss(s, params);
    CHECK(std::abs(no.loss - dr.loss) < 1e-12);
    CHECK(max_abs_diff(no.grad_pos, dr.grad_pos) < 1e-12);
    CHECK(max_abs_diff(no.grad_neg, dr.grad_neg) < 1e-12);
  }
}

TEST_CASE("neg_only on equal positives equals dr in the lambda_pos limit") {
  std::mt19937_64 rng(82);
  ImageScores s;
  s.positives.assign(4, 0.62);
  s.negatives = test::random_scores(rng, 50);
  DrParams params;
  const LossResult no = neg_only_loss(s, params);
  params.lambda_pos = 1e9;
  const LossResult dr = dr_loss(s, params);
  CHECK(std::abs(no.loss - dr.loss) < 1e-9);
  CHECK(max_abs_diff(no.grad_pos, dr.grad_pos) < 1e-9);
  CHECK(max_abs_diff(no.grad_neg, dr.grad_neg) < 1e-9);
}

TEST_CASE("neg_only gradients match finite differences") {
  std::mt19937_64 rng(83);
  ImageScores s;
  s.positives = test::random_scores(rng, 5);
  s.negatives = test::random_scores(rng, 50);
  const DrParams params;
  const auto report = check_gradients(
      [&](const ImageScores& in) { return neg_only_loss(in, params); }, s,
      1e-5, 1e-5);
  CHECK(report.passed);
}

TEST_CASE("cross entropy closed-form values") {
  const LossResult both = cross_entropy_loss(ImageScores{{0.5}, {0.5}});
  CHECK(std::abs(both.loss - 2.0 * std::log(2.0)) < 1e-15);
  const LossResult neg_only_img = cross_entropy_loss(ImageScores{{}, {0.1}});
  CHECK(std::abs(neg_only_img.loss + std::log(0.9)) < 1e-15);
  CHECK(neg_only_img.grad_pos.empty());
}

TEST_CASE("cross entropy gradients match finite differences") {
  std::mt19937_64 rng(85);
  ImageScores s;
  s.positives = test::random_scores(rng, 8);
  s.negatives = test::random_scores(rng, 80);
  const auto report = check_gradients(
      [](const ImageScores& in) { return cross_entropy_loss(in); }, s, 1e-5,
      1e-5);
  CHECK(report.passed);
}

TEST_CASE("focal reduces to alpha-weighted cross entropy at gamma_f = 0") {
  std::mt19937_64 rng(86);
  ImageScores s;
  s.positives = test::random_scores(rng, 4);
  s.negatives = test::random_scores(rng, 30);
  const double alpha = 0.25;
  const LossResult f = focal_loss(s, alpha, 0.0);
  const double ce_pos = cross_entropy_loss(ImageScores{s.positives, {0.5}}).loss -
                        std::log(2.0);
  const double ce_neg = cross_entropy_loss(ImageScores{{}, s.negatives}).loss;
  CHECK(std::abs(f.loss - (alpha * ce_pos + (1.0 - alpha) * ce_neg)) < 1e-12);
}

TEST_CASE("focal positive term at p = 0.5") {
  // isolate the positive contribution by subtracting an
  // empty-positive evaluation on the same negatives
  const LossResult with_pos = focal_loss(ImageScores{{0.5}, {0.5}}, 0.25, 2.0);
  const LossResult only_neg = focal_loss(ImageScores{{}, {0.5}}, 0.25, 2.0);
  CHECK(std::abs((with_pos.loss - only_neg.loss) -
                 0.25 * 0.25 * std::log(2.0)) < 1e-15);
}

TEST_CASE("focal gradients match finite differences") {
  std::mt19937_64 rng(87);
  ImageScores s;
  s.positives = test::random_scores(rng, 6);
  s.negatives = test::random_scores(rng, 60);
  for (double gamma_f : {0.0, 0.5, 2.0}) {
    const auto report = check_gradients(
        [&](const ImageScores& in) { return focal_loss(in, 0.25, gamma_f); },
        s, 1e-5, 1e-5);
    CHECK(report.passed);
  }
}

TEST_CASE("margin_check reports raw extremes and the criterion") {
  const MarginReport good = margin_check(ImageScores{{0.7}, {0.3}}, 0.5);
  CHECK(good.satisfies);
  CHECK(good.min_pos == 0.7);
  CHECK(good.max_neg == 0.3);

  const MarginReport bad = margin_check(ImageScores{{0.55}, {0.6}}, 0.5);
  CHECK(!bad.satisfies);
  CHECK(bad.min_pos == 0.55);
  CHECK(bad.max_neg == 0.6);

  // reporting is descriptive: extremes come back even when unsatisfied
  const MarginReport edge =
      margin_check(ImageScores{{0.51, 0.8}, {0.2, 0.5}}, 0.5);
  CHECK(edge.min_pos == 0.51);
  CHECK(edge.max_neg == 0.5);
  CHECK(edge.satisfies);
}

TEST_CASE("gradient sign structure follows the tilt factors") {
  std::mt19937_64 rng(91);
  const DrParams params;
  for (int i = 0; i < 50; ++i) {
    ImageScores s;
    s.positives = test::random_scores(rng, 1 + rng() % 10);
    s.negatives = test::random_scores(rng, 2 + rng() % 100);
    const LossResult r = dr_loss(s, params);
    const auto neg =
        tilt_negative(s.negatives, params.lambda_neg, params.prior_neg);
    const auto pos =
        tilt_positive(s.positives, params.lambda_pos, params.prior_pos);
    for (std::size_t j = 0; j < s.n_neg(); ++j) {
      const double factor =
          params.lambda_neg + s.negatives[j] - neg.expectation;
      CHECK(r.grad_neg[j] * factor >= -1e-12);
    }
    for (std::size_t j = 0; j < s.n_pos(); ++j) {
      const double factor =
          -params.lambda_pos + s.positives[j] - pos.expectation;
      CHECK(r.grad_pos[j] * factor >= -1e-12);
    }
  }
}

TEST_CASE("gradients are permutation equivariant") {
  std::mt19937_64 rng(93);
  ImageScores s;
  s.positives = test::random_scores(rng, 12);
  s.negatives = test::random_scores(rng, 70);

  std::vector<std::size_t> perm(s.n_neg());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  ImageScores shuffled = s;
  for (std::size_t j = 0; j < perm.size(); ++j)
    shuffled.negatives[j] = s.negatives[perm[j]];

  const DrParams params;
  auto check_equivariance = [&](auto&& fn) {
    const LossResult base = fn(s);
    const LossResult moved = fn(shuffled);
    CHECK(std::abs(base.loss - moved.loss) < 1e-12);
    for (std::size_t j = 0; j < perm.size(); ++j)
      CHECK(std::abs(moved.grad_neg[j] - base.grad_neg[perm[j]]) < 1e-12);
  };
  check_equivariance(
      [&](const ImageScores& in) { return dr_loss(in, params); });
  check_equivariance([&](const ImageScores& in) {
    return all_pairs_loss(in, 0.5, params.surrogate);
  });
  check_equivariance(
      [&](const ImageScores& in) { return cross_entropy_loss(in); });
  check_equivariance(
      [&](const ImageScores& in) { return focal_loss(in, 0.25, 2.0); });
}

TEST_CASE("empty-positive images stay finite across supporting losses") {
  const ImageScores s{{}, {0.2, 0.8, 0.5}};
  for (const LossResult& r :
       {dr_loss(s, DrParams{}), cross_entropy_loss(s),
        focal_loss(s, 0.25, 2.0)}) {
    CHECK(std::isfinite(r.loss));
    CHECK(r.grad_pos.empty());
    for (double g : r.grad_neg) CHECK(std::isfinite(g));
  }
}

TEST_CASE("batch sums are insensitive to evaluation order") {
  std::mt19937_64 rng(95);
  std::vector<ImageScores> batch;
  for (int i = 0; i < 10; ++i) {
    ImageScores s;
    s.positives = test::random_scores(rng, 3);
    s.negatives = test::random_scores(rng, 40);
    batch.push_back(std::move(s));
  }
  const DrParams params;
  double forward = 0.0, backward = 0.0;
  for (const auto& s : batch) forward += dr_loss(s, params).loss;
  for (auto it = batch.rbegin(); it != batch.rend(); ++it)
    backward += dr_loss(*it, params).loss;
  CHECK(std::abs(forward - backward) / forward < 1e-9);
}

TEST_CASE("losses requiring positives reject empty-positive input") {
  const ImageScores s{{}, {0.5}};
  CHECK_THROWS_AS(all_pairs_loss(s, 0.5, SurrogateSpec::hinge()), DrError);
  CHECK_THROWS_AS(worst_case_loss(s, 0.5, SurrogateSpec::hinge()), DrError);
  CHECK_THROWS_AS(neg_only_loss(s, DrParams{}), DrError);
  CHECK_THROWS_AS(margin_check(s, 0.5), DrError);
  try {
    all_pairs_loss(s, 0.5, SurrogateSpec::hinge());
    FAIL("expected throw");
  } catch (const DrError& e) {
    CHECK(e.code() == Err::NoPositives);
  }
}

TEST_CASE("invalid scores and params propagate their codes") {
  CHECK_THROWS_AS(dr_loss(ImageScores{{1.2}, {0.5}}, DrParams{}), DrError);
  CHECK_THROWS_AS(cross_entropy_loss(ImageScores{{0.5}, {}}), DrError);
  DrParams bad;
  bad.lambda_neg = 0.0;
  CHECK_THROWS_AS(dr_loss(ImageScores{{0.6}, {0.4}}, bad), DrError);
  CHECK_THROWS_AS(focal_loss(ImageScores{{0.6}, {0.4}}, 1.5, 2.0), DrError);
}

TEST_SUITE_END();
