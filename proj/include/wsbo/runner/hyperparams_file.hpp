#pragma once

#include <filesystem>

#include "wsbo/kernels.hpp"

namespace wsbo {

/// `name = value` text. Keys: mean_const, base.family, base.amplitude,
/// base.length_scales (comma separated), num_deltas, delta.<l>.family,
/// delta.<l>.amplitude, delta.<l>.length_scales.
JointHyperParams load_hyperparams(const std::filesystem::path& path);
void save_hyperparams(const JointHyperParams& hp, const std::filesystem::path& path);

}  // namespace wsbo
