#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "wsbo/benchmarks/objective.hpp"

namespace wsbo {

/// Builds RB1..RB4 or ATO1..ATO4. ATO instances use `ato_config` when given,
/// otherwise the built-in configuration.
std::unique_ptr<Objective> make_instance(const std::string& id,
                                         const std::optional<std::filesystem::path>& ato_config = {});

/// Default (budget, n_initial, disc_size) for an instance family.
struct InstanceDefaults {
  int budget;
  int n_initial;
  int disc_size;
};
InstanceDefaults instance_defaults(const std::string& id);

}  // namespace wsbo
