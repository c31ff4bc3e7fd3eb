#pragma once

#include <string>

#include "wsbo/gp.hpp"
#include "wsbo/types.hpp"

namespace wsbo {

/// A current-task objective under the maximization convention.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual const Box& domain() const = 0;
  /// One noisy evaluation as a task-0 observation carrying its noise variance.
  virtual Observation evaluate(const DesignPoint& x, Rng& rng) const = 0;
  /// Noise-free (or high-accuracy) value used for reporting gains only.
  virtual double true_value(const DesignPoint& x) const = 0;
};

}  // namespace wsbo
