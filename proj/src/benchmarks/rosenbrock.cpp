#include "wsbo/benchmarks/rosenbrock.hpp"

#include <cmath>
#include <string>

#include "wsbo/errors.hpp"

namespace wsbo {

RosenbrockId rosenbrock_id_from_string(std::string_view name) {
  if (name == "RB1") return RosenbrockId::kRB1;
  if (name == "RB2") return RosenbrockId::kRB2;
  if (name == "RB3") return RosenbrockId::kRB3;
  if (name == "RB4") return RosenbrockId::kRB4;
  throw InvalidArgument("unknown Rosenbrock variant '" + std::string(name) + "'");
}

std::string_view to_string(RosenbrockId id) {
  switch (id) {
    case RosenbrockId::kRB1: return "RB1";
    case RosenbrockId::kRB2: return "RB2";
    case RosenbrockId::kRB3: return "RB3";
    case RosenbrockId::kRB4: return "RB4";
  }
  return "?";
}

const Box& rosenbrock_domain() {
  static const Box box{Eigen::Vector2d(-2.0, -2.0), Eigen::Vector2d(2.0, 2.0)};
  return box;
}

namespace {

double rb1(double x1, double x2) {
  const double a = 1.0 - x1;
  const double b = x2 - x1 * x1;
  return a * a + 100.0 * b * b;
}

double rb2(double x1, double x2) { return rb1(x1, x2) + 0.01 * std::sin(10.0 * x1 + 5.0 * x2); }

}  // namespace

double rosenbrock_value(const RosenbrockVariant& variant, const DesignPoint& x) {
  rosenbrock_domain().check(x, "rosenbrock_value");
  const double x1 = x[0];
  const double x2 = x[1];
  switch (variant.id) {
    case RosenbrockId::kRB1: return rb1(x1, x2);
    case RosenbrockId::kRB2: return rb2(x1, x2);
    case RosenbrockId::kRB3: return rb1(x1 + 0.01, x2 - 0.005);
    case RosenbrockId::kRB4: return rb2(x1, x2) + 0.01 * x1;
  }
  throw InvalidArgument("unknown Rosenbrock variant");
}

Observation rosenbrock_eval(const RosenbrockVariant& variant, const DesignPoint& x, Rng& rng) {
  if (!(variant.noise_var >= 0.0)) throw InvalidArgument("rosenbrock_eval: negative noise variance");
  double value = -rosenbrock_value(variant, x);
  if (variant.noise_var > 0.0) {
    value += std::normal_distribution<double>(0.0, std::sqrt(variant.noise_var))(rng);
  }
  return {0, x, value, variant.noise_var};
}

std::string RosenbrockObjective::name() const { return std::string(to_string(variant_.id)); }

Observation RosenbrockObjective::evaluate(const DesignPoint& x, Rng& rng) const {
  return rosenbrock_eval(variant_, x, rng);
}

double RosenbrockObjective::true_value(const DesignPoint& x) const { return -rosenbrock_value(variant_, x); }

}  // namespace wsbo
