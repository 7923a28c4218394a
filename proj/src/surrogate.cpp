#include "drank/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace drank {

std::optional<Err> validate(const SurrogateSpec& spec) {
  switch (spec.kind) {
    case SurrogateSpec::Kind::Hinge:
      return std::nullopt;
    case SurrogateSpec::Kind::Quadratic:
    case SurrogateSpec::Kind::Logistic:
      if (!(spec.param > 0.0) || !std::isfinite(spec.param))
        return Err::BadSpec;
      return std::nullopt;
  }
  return Err::BadSpec;
}

SurrogateResult evaluate(const SurrogateSpec& spec, double z) {
  if (!std::isfinite(z)) throw DrError(Err::NonFinite, "surrogate gap z");
  if (auto err = validate(spec)) throw DrError(*err, "invalid surrogate spec");

  switch (spec.kind) {
    case SurrogateSpec::Kind::Hinge:
      // Subgradient 0 at the kink.
      if (z > 0.0) return {z, 1.0};
      return {0.0, 0.0};

    case SurrogateSpec::Kind::Quadratic: {
      const double rho = spec.param;
      if (z >= rho) return {z, 1.0};
      if (z <= -rho) return {0.0, 0.0};
      const double t = z + rho;
      return {t * t / (4.0 * rho), t / (2.0 * rho)};
    }

    case SurrogateSpec::Kind::Logistic: {
      const double l = spec.param;
      const double lz = l * z;
      // softplus(lz)/l without overflow for large |lz|
      const double loss =
          (std::max(lz, 0.0) + std::log1p(std::exp(-std::abs(lz)))) / l;
      double derivative;
      if (lz >= 0.0) {
        derivative = 1.0 / (1.0 + std::exp(-lz));
      } else {
        const double e = std::exp(lz);
        derivative = e / (1.0 + e);
      }
      return {loss, derivative};
    }
  }
  throw DrError(Err::BadSpec, "unreachable surrogate kind");
}

}  // namespace drank
