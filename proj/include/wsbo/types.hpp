#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace wsbo {

/// A point of the design space in problem units.
using DesignPoint = Eigen::VectorXd;

/// A (task, design) pair. Task 0 is the current task; 1..M are previous ones.
struct TaskPoint {
  int task = 0;
  DesignPoint point;
};

/// Axis-aligned box domain.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const DesignPoint& x, double slack = 1e-12) const;
  /// Throws InvalidArgument if `x` has the wrong length or lies outside.
  void check(const DesignPoint& x, std::string_view what) const;
};

using Rng = std::mt19937_64;

/// Seed for an independent, named random stream. Distinct names or
/// replication indices give unrelated streams for the same base seed.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  return Rng(stream_seed(seed, name, index));
}

/// Latin-hypercube sample of `n` points in `box`.
std::vector<DesignPoint> latin_hypercube(const Box& box, int n, Rng& rng);

}  // namespace wsbo
