#pragma once

#include <string_view>

#include "wsbo/benchmarks/objective.hpp"

namespace wsbo {

enum class RosenbrockId { kRB1, kRB2, kRB3, kRB4 };

RosenbrockId rosenbrock_id_from_string(std::string_view name);
std::string_view to_string(RosenbrockId id);

struct RosenbrockVariant {
  RosenbrockId id = RosenbrockId::kRB1;
  double noise_var = 0.25;
};

/// The box [-2, 2]^2.
const Box& rosenbrock_domain();

/// Noise-free value of the (minimization) Rosenbrock variant.
double rosenbrock_value(const RosenbrockVariant& variant, const DesignPoint& x);

/// Negated value plus N(0, noise_var) noise.
Observation rosenbrock_eval(const RosenbrockVariant& variant, const DesignPoint& x, Rng& rng);

class RosenbrockObjective final : public Objective {
 public:
  explicit RosenbrockObjective(RosenbrockVariant variant) : variant_(variant) {}

  std::string name() const override;
  const Box& domain() const override { return rosenbrock_domain(); }
  Observation evaluate(const DesignPoint& x, Rng& rng) const override;
  double true_value(const DesignPoint& x) const override;

 private:
  RosenbrockVariant variant_;
};

}  // namespace wsbo
