#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wsbo {

/// Raised for malformed inputs: dimension mismatches, non-positive kernel
/// parameters, out-of-domain points, unknown identifiers.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The covariance matrix could not be factorized even after jitter escalation.
class IllConditioned : public std::runtime_error {
 public:
  IllConditioned(const std::string& what, std::vector<double> jitter_levels)
      : std::runtime_error(what), jitter_levels_(std::move(jitter_levels)) {}

  const std::vector<double>& jitter_levels() const noexcept { return jitter_levels_; }

 private:
  std::vector<double> jitter_levels_;
};

/// A measurement whose predictive variance (posterior plus noise) vanishes.
class DegenerateMeasurement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every restart of a hyperparameter fit failed.
class EstimationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input that does not parse. `line()` is 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wsbo
