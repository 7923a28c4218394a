#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "drank/surrogate.hpp"

using namespace drank;

namespace {

std::vector<double> z_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  for (double z = lo; z <= hi + 1e-12; z += step) grid.push_back(z);
  return grid;
}

double hinge_value(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

TEST_SUITE_BEGIN("surrogate");

TEST_CASE("logistic at z = 0") {
  const auto [loss, slope] = evaluate(SurrogateSpec::logistic(6.0), 0.0);
  CHECK(std::abs(loss - std::log(2.0) / 6.0) < 1e-15);
  CHECK(slope == 0.5);
}

TEST_CASE("quadratic piecewise boundary values") {
  const SurrogateSpec quad = SurrogateSpec::quadratic(0.5);
  auto lo = evaluate(quad, -0.5);
  CHECK(lo.loss == 0.0);
  CHECK(lo.derivative == 0.0);
  auto hi = evaluate(quad, 0.5);
  CHECK(hi.loss == 0.5);
  CHECK(hi.derivative == 1.0);
  auto mid = evaluate(quad, 0.0);
  CHECK(std::abs(mid.loss - 0.125) < 1e-15);  // rho/4
  CHECK(std::abs(mid.derivative - 0.5) < 1e-15);
}

TEST_CASE("hinge values and kink subgradient") {
  const SurrogateSpec hinge = SurrogateSpec::hinge();
  auto up = evaluate(hinge, 0.3);
  CHECK(up.loss == 0.3);
  CHECK(up.derivative == 1.0);
  auto down = evaluate(hinge, -0.3);
  CHECK(down.loss == 0.0);
  CHECK(down.derivative == 0.0);
  CHECK(evaluate(hinge, 0.0).derivative == 0.0);
}

TEST_CASE("logistic-hinge gap is bounded by ln2/L with equality at 0") {
  for (double l : {4.0, 6.0, 10.0}) {
    const SurrogateSpec spec = SurrogateSpec::logistic(l);
    const double bound = std::log(2.0) / l;
    double max_gap = 0.0;
    for (double z : z_grid(-2.0, 2.0, 0.01)) {
      const double gap = std::abs(evaluate(spec, z).loss - hinge_value(z));
      CHECK(gap <= bound + 1e-12);
      max_gap = std::max(max_gap, gap);
    }
    CHECK(std::abs(evaluate(spec, 0.0).loss - bound) < 1e-12);
    CHECK(std::abs(max_gap - bound) < 1e-12);
  }
}

TEST_CASE("quadratic loss is C1 at the seam points") {
  for (double rho : {0.2, 0.5, 1.0}) {
    const SurrogateSpec spec = SurrogateSpec::quadratic(rho);
    for (double seam : {rho, -rho}) {
      const auto inside = evaluate(spec, seam - 1e-9);
      const auto outside = evaluate(spec, seam + 1e-9);
      CHECK(std::abs(inside.loss - outside.loss) < 1e-6);
      CHECK(std::abs(inside.derivative - outside.derivative) < 1e-6);
    }
  }
}

TEST_CASE("smooth losses approach hinge monotonically") {
  const auto grid = z_grid(-2.0, 2.0, 0.05);
  auto max_gap = [&](const SurrogateSpec& spec) {
    double worst = 0.0;
    for (double z : grid)
      worst = std::max(worst,
                       std::abs(evaluate(spec, z).loss - hinge_value(z)));
    return worst;
  };

  double prev = std::numeric_limits<double>::infinity();
  for (double l : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double gap = max_gap(SurrogateSpec::logistic(l));
    CHECK(gap < prev);
    prev = gap;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double rho : {1.0, 0.5, 0.25, 0.1}) {
    const double gap = max_gap(SurrogateSpec::quadratic(rho));
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("derivatives match finite differences away from kinks") {
  const double h = 1e-6;
  const SurrogateSpec specs[] = {SurrogateSpec::logistic(4.0),
                                 SurrogateSpec::logistic(6.0),
                                 SurrogateSpec::quadratic(0.5),
                                 SurrogateSpec::quadratic(0.2),
                                 SurrogateSpec::hinge()};
  for (const SurrogateSpec& spec : specs) {
    for (double z : z_grid(-1.95, 1.95, 0.1)) {
      if (spec.kind == SurrogateSpec::Kind::Hinge && std::abs(z) < 0.01)
        continue;
      if (spec.kind == SurrogateSpec::Kind::Quadratic &&
          std::abs(std::abs(z) - spec.param) < 0.01)
        continue;
      const double fd =
          (evaluate(spec, z + h).loss - evaluate(spec, z - h).loss) / (2 * h);
      const double analytic = evaluate(spec, z).derivative;
      const double rel = std::abs(fd - analytic) /
                         std::max({std::abs(fd), std::abs(analytic), 1e-8});
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("losses are non-negative and non-decreasing, slopes in [0,1]") {
  const SurrogateSpec specs[] = {SurrogateSpec::logistic(6.0),
                                 SurrogateSpec::quadratic(0.5),
                                 SurrogateSpec::hinge()};
  for (const SurrogateSpec& spec : specs) {
    double prev = -1.0;
    for (double z : z_grid(-2.0, 2.0, 0.01)) {
      const auto [loss, slope] = evaluate(spec, z);
      CHECK(loss >= 0.0);
      CHECK(loss >= prev - 1e-12);
      CHECK(slope >= 0.0);
      CHECK(slope <= 1.0);
      prev = loss;
    }
  }
}

TEST_CASE("logistic stays finite for extreme gaps") {
  const SurrogateSpec spec = SurrogateSpec::logistic(6.0);
  const auto big = evaluate(spec, 500.0);
  CHECK(std::isfinite(big.loss));
  CHECK(std::abs(big.loss - 500.0) < 1e-9);
  const auto small = evaluate(spec, -500.0);
  CHECK(small.loss == 0.0);
  CHECK(small.derivative == 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(
      evaluate(SurrogateSpec::logistic(6.0),
               std::numeric_limits<double>::quiet_NaN()),
      DrError);
  CHECK_THROWS_AS(evaluate(SurrogateSpec::logistic(0.0), 0.1), DrError);
  CHECK_THROWS_AS(evaluate(SurrogateSpec::quadratic(-0.5), 0.1), DrError);
  CHECK(validate(SurrogateSpec::hinge()) == std::nullopt);
  CHECK(validate(SurrogateSpec::logistic(-2.0)) == Err::BadSpec);
}

TEST_SUITE_END();
