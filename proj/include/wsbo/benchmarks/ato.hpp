#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "wsbo/benchmarks/objective.hpp"

namespace wsbo {

struct AtoItem {
  double profit = 0.0;
  /// Cost per unit held per day.
  double holding_cost = 0.0;
  double lead_time_mean = 0.0;
  double lead_time_sd = 0.0;
  /// Largest allowed base-stock target.
  double capacity = 20.0;
};

struct ItemUse {
  int item = 0;
  int quantity = 1;
};

struct AtoProduct {
  /// Poisson arrival rate per day.
  double arrival_rate = 0.0;
  std::vector<ItemUse> key_items;
  std::vector<ItemUse> nonkey_items;
};

/// Multipliers that turn one period's configuration into the next.
struct AtoVariantSpec {
  std::string parent;  // empty: apply to the base configuration
  std::vector<double> arrival_rate;
  std::vector<double> profit;
  std::vector<double> holding_cost;
  std::vector<double> lead_time_mean;
};

struct AtoConfig {
  std::vector<AtoItem> items;
  std::vector<AtoProduct> products;
  double horizon_days = 50.0;
  double warmup_days = 20.0;
  /// Simulation replications per optimizer evaluation.
  int eval_replications = 10;
  /// Replications behind true_value(); fixed seed for common random numbers.
  int truth_replications = 10000;
  std::uint64_t truth_seed = 20170101;
  std::map<std::string, AtoVariantSpec> variants;

  int n_items() const { return static_cast<int>(items.size()); }
  int n_products() const { return static_cast<int>(products.size()); }
  Box domain() const;
  void validate() const;
};

/// Built-in stand-in configuration (8 items, 5 products).
AtoConfig default_ato_config();

AtoConfig load_ato_config(const std::filesystem::path& path);
void save_ato_config(const AtoConfig& config, const std::filesystem::path& path);

/// Applies variant `id` ("ATO1".."ATO4" or any key of config.variants).
/// ATO1 is the configuration itself.
AtoConfig ato_variant(const AtoConfig& base, const std::string& id);

/// Base-stock levels actually used for real-valued targets.
std::vector<int> ato_stock_levels(const AtoConfig& config, const DesignPoint& targets);

struct SimResult {
  double mean_daily_profit = 0.0;
  double variance_of_mean = 0.0;
  int replications = 0;
};

/// Per-replication accounting, exposed for audits.
struct ReplicationLedger {
  double revenue = 0.0;
  double holding = 0.0;
  double daily_profit = 0.0;
  std::vector<long> initial_stock;
  std::vector<long> ordered;
  std::vector<long> consumed;
  std::vector<long> received;
  std::vector<long> on_hand_end;
  std::vector<long> on_order_end;
};

struct AtoEvent {
  enum class Kind { kSale, kLostSale, kDelivery } kind;
  double time = 0.0;
  int product = -1;  // sale / lost sale
  int item = -1;     // delivery
  /// Stock change per item caused by the event (negative for consumption).
  std::vector<std::pair<int, int>> stock_changes;
  double revenue = 0.0;
};

/// One replication of the discrete-event simulation. When `log` is non-null
/// every event is appended to it.
ReplicationLedger ato_replicate(const AtoConfig& config, const std::vector<int>& stock_levels,
                                std::uint64_t seed, std::vector<AtoEvent>* log = nullptr);

/// Recomputes revenue and holding cost over the measurement window from an
/// event log, independently of the simulation's running totals.
std::pair<double, double> ato_audit_log(const AtoConfig& config,
                                        const std::vector<int>& stock_levels,
                                        const std::vector<AtoEvent>& log);

/// Mean daily profit over `replications` independent replications; replication
/// r draws from a stream derived from (seed, r).
SimResult ato_simulate(const AtoConfig& config, const DesignPoint& targets, int replications,
                       std::uint64_t seed);

class AtoObjective final : public Objective {
 public:
  AtoObjective(std::string name, AtoConfig config);

  std::string name() const override { return name_; }
  const Box& domain() const override { return domain_; }
  Observation evaluate(const DesignPoint& x, Rng& rng) const override;
  /// truth_replications-run estimate with a fixed seed; memoized by stock levels.
  double true_value(const DesignPoint& x) const override;

  const AtoConfig& config() const { return config_; }

 private:
  std::string name_;
  AtoConfig config_;
  Box domain_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<int>, double> truth_cache_;
};

}  // namespace wsbo
