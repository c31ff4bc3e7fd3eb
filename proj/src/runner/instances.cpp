#include "wsbo/runner/instances.hpp"

#include "wsbo/benchmarks/ato.hpp"
#include "wsbo/benchmarks/rosenbrock.hpp"
#include "wsbo/errors.hpp"

namespace wsbo {

namespace {

bool is_ato(const std::string& id) { return id.rfind("ATO", 0) == 0; }

}  // namespace

std::unique_ptr<Objective> make_instance(const std::string& id,
                                         const std::optional<std::filesystem::path>& ato_config) {
  if (is_ato(id)) {
    const AtoConfig base = ato_config ? load_ato_config(*ato_config) : default_ato_config();
    return std::make_unique<AtoObjective>(id, ato_variant(base, id));
  }
  return std::make_unique<RosenbrockObjective>(RosenbrockVariant{rosenbrock_id_from_string(id), 0.25});
}

InstanceDefaults instance_defaults(const std::string& id) {
  if (is_ato(id)) return {50, 5, 2500};
  rosenbrock_id_from_string(id);
  return {25, 3, 1000};
}

}  // namespace wsbo
