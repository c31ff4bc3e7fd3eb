#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Oracle and property suites shared by the acceptance binary and `wsbo bench`.
namespace wsbo::verify {

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Factorized posterior vs dense inverse on random joint problems.
CheckOutcome check_posterior_oracle(int problems, double tol, std::uint64_t seed);

/// expected_max_affine vs Monte Carlo, within `k_se` standard errors.
CheckOutcome check_expected_max(int cases, long draws, double k_se, std::uint64_t seed);

/// kg_factor vs nested simulation on random 2-D posteriors.
CheckOutcome check_kg_nested(int cases, long draws, double k_se, std::uint64_t seed);

/// grad_log_posterior vs central differences; the error is
/// max|analytic - fd| / max|fd| per configuration.
CheckOutcome check_gradient(int configs, double tol, std::uint64_t seed);

/// PSD grams, noiseless interpolation, KG/EI nonnegativity, incumbent
/// monotonicity, history round trip, deterministic replay.
std::vector<CheckOutcome> check_invariants(std::uint64_t seed);

}  // namespace wsbo::verify
