#pragma once

#include <filesystem>
#include <vector>

#include "wsbo/runner/replicate.hpp"

namespace wsbo {

/// CSV with header `iteration,algorithm,mean_gain,se,n`, rows sorted by
/// (algorithm, iteration).
void emit_results(const std::vector<GainCurve>& curves, const std::filesystem::path& path);
std::vector<GainCurve> read_results(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace wsbo
