#pragma once

#include <optional>

#include "drank/error.hpp"

namespace drank {

// Smooth stand-ins for the hinge ranking loss [z]+. Quadratic blends a
// parabola of half-width rho into the linear branch; Logistic is softplus
// scaled by 1/L. Larger L (smaller rho) hugs the hinge more tightly.
struct SurrogateSpec {
  enum class Kind { Hinge, Quadratic, Logistic };

  Kind kind = Kind::Logistic;
  double param = 6.0;  // rho for Quadratic, L for Logistic, unused for Hinge

  static SurrogateSpec hinge() { return {Kind::Hinge, 0.0}; }
  static SurrogateSpec quadratic(double rho) { return {Kind::Quadratic, rho}; }
  static SurrogateSpec logistic(double sharpness) {
    return {Kind::Logistic, sharpness};
  }
};

std::optional<Err> validate(const SurrogateSpec& spec);

struct SurrogateResult {
  double loss;        // >= 0
  double derivative;  // dloss/dz, always in [0, 1]
};

// Evaluates the surrogate and its derivative at ranking gap z. The hinge
// kink at z = 0 reports subgradient 0. Throws on non-finite z or an
// invalid spec.
SurrogateResult evaluate(const SurrogateSpec& spec, double z);

}  // namespace drank
