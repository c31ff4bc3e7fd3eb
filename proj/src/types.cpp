#include "wsbo/types.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "wsbo/errors.hpp"

namespace wsbo {

bool Box::contains(const DesignPoint& x, double slack) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - slack && x[i] <= upper[i] + slack)) return false;
  }
  return true;
}

void Box::check(const DesignPoint& x, std::string_view what) const {
  if (x.size() != dim()) {
    throw InvalidArgument(std::string(what) + ": expected dimension " + std::to_string(dim()) +
                          ", got " + std::to_string(x.size()));
  }
  if (!contains(x)) throw InvalidArgument(std::string(what) + ": point outside the domain");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(name)) ^ index);
}

std::vector<DesignPoint> latin_hypercube(const Box& box, int n, Rng& rng) {
  if (n < 0) throw InvalidArgument("latin_hypercube: negative sample size");
  const auto d = box.dim();
  std::vector<DesignPoint> points(static_cast<std::size_t>(n), DesignPoint(d));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double width = box.upper[j] - box.lower[j];
    for (int i = 0; i < n; ++i) {
      const double u = (perm[static_cast<std::size_t>(i)] + unit(rng)) / n;
      points[static_cast<std::size_t>(i)][j] = box.lower[j] + width * u;
    }
  }
  return points;
}

}  // namespace wsbo
