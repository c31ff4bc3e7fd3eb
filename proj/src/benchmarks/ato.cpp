#include "wsbo/benchmarks/ato.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <deque>
#include <iterator>
#include <limits>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <nlohmann/json.hpp>

#include "wsbo/errors.hpp"

namespace wsbo {

Box AtoConfig::domain() const {
  Box box{Eigen::VectorXd::Zero(n_items()), Eigen::VectorXd(n_items())};
  for (int i = 0; i < n_items(); ++i) box.upper[i] = items[static_cast<std::size_t>(i)].capacity;
  return box;
}

void AtoConfig::validate() const {
  if (items.empty() || products.empty()) throw InvalidArgument("ATO config needs items and products");
  for (const auto& item : items) {
    if (!(item.profit >= 0.0) || !(item.holding_cost >= 0.0) || !(item.lead_time_mean > 0.0) ||
        !(item.lead_time_sd > 0.0) || !(item.capacity > 0.0)) {
      throw InvalidArgument("ATO item: profit/holding must be nonnegative, lead times and capacity positive");
    }
  }
  auto check_uses = [&](const std::vector<ItemUse>& uses) {
    for (const auto& use : uses) {
      if (use.item < 0 || use.item >= n_items() || use.quantity < 1) {
        throw InvalidArgument("ATO product references an unknown item or a non-positive quantity");
      }
    }
  };
  for (const auto& product : products) {
    if (!(product.arrival_rate > 0.0)) throw InvalidArgument("ATO product arrival rates must be positive");
    if (product.key_items.empty()) throw InvalidArgument("every ATO product needs at least one key item");
    check_uses(product.key_items);
    check_uses(product.nonkey_items);
  }
  if (!(horizon_days > 0.0) || !(warmup_days >= 0.0)) throw InvalidArgument("ATO horizon must be positive");
  if (eval_replications < 2 || truth_replications < 2) {
    throw InvalidArgument("ATO replications must be at least 2");
  }
}

AtoConfig default_ato_config() {
  AtoConfig config;
  const double profit[] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 3.5, 2.5};
  const double lead[] = {0.2, 0.3, 0.4, 0.5, 0.6, 0.25, 0.35, 0.45};
  for (int i = 0; i < 8; ++i) {
    config.items.push_back({profit[i], 0.02 * profit[i], lead[i], 0.1 * lead[i], 20.0});
  }
  config.products = {
      {3.6, {{0, 1}, {1, 1}, {2, 1}}, {{5, 1}}},
      {3.0, {{0, 1}, {3, 2}}, {{6, 1}, {7, 1}}},
      {2.4, {{1, 1}, {4, 1}, {5, 1}}, {{2, 1}}},
      {1.8, {{2, 1}, {6, 1}}, {{3, 1}, {4, 1}}},
      {1.2, {{4, 1}, {7, 1}, {0, 1}}, {{1, 2}}},
  };
  // demand shifts away from the two most popular products; a few items earn more
  config.variants["ATO2"] = {"", {0.96, 0.96, 1.0, 1.05, 1.05}, {1.0, 1.015, 1.0, 1.015, 1.0, 1.015, 1.0, 1.0}, {}, {}};
  // slower deliveries, more demand everywhere, higher profits on several items
  config.variants["ATO3"] = {"ATO2",
                             {1.02, 1.02, 1.02, 1.02, 1.02},
                             {1.02, 1.0, 1.0, 1.0, 1.02, 1.0, 1.02, 1.0},
                             {},
                             std::vector<double>(8, 1.03)};
  // holding costs up, several profits down
  config.variants["ATO4"] = {"ATO3", {}, {1.0, 1.0, 0.99, 1.0, 1.0, 0.99, 1.0, 0.99}, std::vector<double>(8, 1.05), {}};
  return config;
}

namespace {

using nlohmann::json;

json uses_to_json(const std::vector<ItemUse>& uses) {
  json out = json::array();
  for (const auto& u : uses) out.push_back({{"item", u.item}, {"quantity", u.quantity}});
  return out;
}

std::vector<ItemUse> uses_from_json(const json& j) {
  std::vector<ItemUse> out;
  for (const auto& u : j) out.push_back({u.at("item").get<int>(), u.value("quantity", 1)});
  return out;
}

}  // namespace

void save_ato_config(const AtoConfig& config, const std::filesystem::path& path) {
  json j;
  for (const auto& item : config.items) {
    j["items"].push_back({{"profit", item.profit},
                          {"holding_cost", item.holding_cost},
                          {"lead_time_mean", item.lead_time_mean},
                          {"lead_time_sd", item.lead_time_sd},
                          {"capacity", item.capacity}});
  }
  for (const auto& product : config.products) {
    j["products"].push_back({{"arrival_rate", product.arrival_rate},
                             {"key_items", uses_to_json(product.key_items)},
                             {"nonkey_items", uses_to_json(product.nonkey_items)}});
  }
  j["horizon_days"] = config.horizon_days;
  j["warmup_days"] = config.warmup_days;
  j["eval_replications"] = config.eval_replications;
  j["truth_replications"] = config.truth_replications;
  j["truth_seed"] = config.truth_seed;
  j["variants"] = json::object();
  for (const auto& [name, v] : config.variants) {
    j["variants"][name] = {{"parent", v.parent},
                           {"arrival_rate", v.arrival_rate},
                           {"profit", v.profit},
                           {"holding_cost", v.holding_cost},
                           {"lead_time_mean", v.lead_time_mean}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ATO config '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

AtoConfig load_ato_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ATO config '" + path.string() + "'");
  AtoConfig config;
  try {
    const json j = json::parse(in);
    for (const auto& item : j.at("items")) {
      config.items.push_back({item.at("profit").get<double>(), item.at("holding_cost").get<double>(),
                              item.at("lead_time_mean").get<double>(), item.at("lead_time_sd").get<double>(),
                              item.value("capacity", 20.0)});
    }
    for (const auto& product : j.at("products")) {
      config.products.push_back({product.at("arrival_rate").get<double>(),
                                 uses_from_json(product.at("key_items")),
                                 uses_from_json(product.value("nonkey_items", json::array()))});
    }
    config.horizon_days = j.value("horizon_days", config.horizon_days);
    config.warmup_days = j.value("warmup_days", config.warmup_days);
    config.eval_replications = j.value("eval_replications", config.eval_replications);
    config.truth_replications = j.value("truth_replications", config.truth_replications);
    config.truth_seed = j.value("truth_seed", config.truth_seed);
    if (j.contains("variants")) {
      for (const auto& [name, v] : j.at("variants").items()) {
        config.variants[name] = {v.value("parent", std::string()),
                                 v.value("arrival_rate", std::vector<double>{}),
                                 v.value("profit", std::vector<double>{}),
                                 v.value("holding_cost", std::vector<double>{}),
                                 v.value("lead_time_mean", std::vector<double>{})};
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("ATO config '" + path.string() + "': " + e.what(), 0);
  }
  config.validate();
  return config;
}

namespace {

void scale(std::vector<double>& values, const std::vector<double>& factors, const char* what) {
  if (factors.empty()) return;
  if (factors.size() != values.size()) {
    throw InvalidArgument(std::string("ATO variant: ") + what + " multipliers have the wrong length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= factors[i];
}

AtoConfig apply_variant(const AtoConfig& base, const std::string& id, int depth) {
  if (id == "ATO1") return base;
  const auto it = base.variants.find(id);
  if (it == base.variants.end()) throw InvalidArgument("unknown ATO variant '" + id + "'");
  if (depth > 16) throw InvalidArgument("ATO variant chain is cyclic");
  const AtoVariantSpec& spec = it->second;
  AtoConfig out = spec.parent.empty() ? base : apply_variant(base, spec.parent, depth + 1);

  std::vector<double> rates, profits, holding, lead;
  for (const auto& p : out.products) rates.push_back(p.arrival_rate);
  for (const auto& item : out.items) {
    profits.push_back(item.profit);
    holding.push_back(item.holding_cost);
    lead.push_back(item.lead_time_mean);
  }
  scale(rates, spec.arrival_rate, "arrival rate");
  scale(profits, spec.profit, "profit");
  scale(holding, spec.holding_cost, "holding cost");
  scale(lead, spec.lead_time_mean, "lead time");
  for (std::size_t i = 0; i < out.products.size(); ++i) out.products[i].arrival_rate = rates[i];
  for (std::size_t i = 0; i < out.items.size(); ++i) {
    out.items[i].profit = profits[i];
    out.items[i].holding_cost = holding[i];
    out.items[i].lead_time_mean = lead[i];
  }
  return out;
}

}  // namespace

AtoConfig ato_variant(const AtoConfig& base, const std::string& id) {
  base.validate();
  AtoConfig out = apply_variant(base, id, 0);
  out.validate();
  return out;
}

std::vector<int> ato_stock_levels(const AtoConfig& config, const DesignPoint& targets) {
  config.domain().check(targets, "ATO targets");
  std::vector<int> levels(static_cast<std::size_t>(targets.size()));
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    levels[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(targets[i]));
  }
  return levels;
}

namespace {

struct Delivery {
  double time;
  int item;
  int quantity;
};

// Outstanding orders kept per item in delivery-time order. Lead times of one
// item are similar, so new orders almost always go at the back.
class OrderPipeline {
 public:
  explicit OrderPipeline(std::size_t n_items) : queues_(n_items) {}

  bool empty() const { return earliest_ < 0; }
  const Delivery& top() const { return queues_[static_cast<std::size_t>(earliest_)].front(); }

  void push(const Delivery& d) {
    auto& q = queues_[static_cast<std::size_t>(d.item)];
    auto pos = q.end();
    while (pos != q.begin() && std::prev(pos)->time > d.time) --pos;
    q.insert(pos, d);
    if (earliest_ < 0 || d.time < top().time) earliest_ = d.item;
  }

  void pop() {
    queues_[static_cast<std::size_t>(earliest_)].pop_front();
    earliest_ = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < queues_.size(); ++i) {
      if (!queues_[i].empty() && queues_[i].front().time < best) {
        best = queues_[i].front().time;
        earliest_ = static_cast<int>(i);
      }
    }
  }

 private:
  std::vector<std::deque<Delivery>> queues_;
  int earliest_ = -1;
};

}  // namespace

ReplicationLedger ato_replicate(const AtoConfig& config, const std::vector<int>& stock_levels,
                                std::uint64_t seed, std::vector<AtoEvent>* log) {
  const auto n_items = static_cast<std::size_t>(config.n_items());
  if (stock_levels.size() != n_items) throw InvalidArgument("ato_replicate: wrong number of stock levels");
  Rng rng(seed);

  ReplicationLedger ledger;
  ledger.initial_stock.assign(stock_levels.begin(), stock_levels.end());
  ledger.ordered.assign(n_items, 0);
  ledger.consumed.assign(n_items, 0);
  ledger.received.assign(n_items, 0);
  std::vector<long> on_hand = ledger.initial_stock;

  // per product: distinct items with their key and non-key quantities
  struct Need {
    std::size_t item;
    int key;
    int optional;
  };
  std::vector<std::vector<Need>> needs(config.products.size());
  std::vector<double> rates;
  double total_rate = 0.0;
  for (std::size_t p = 0; p < config.products.size(); ++p) {
    const AtoProduct& product = config.products[p];
    auto add = [&](const ItemUse& use, bool key) {
      const auto item = static_cast<std::size_t>(use.item);
      auto it = std::find_if(needs[p].begin(), needs[p].end(), [&](const Need& n) { return n.item == item; });
      if (it == needs[p].end()) it = needs[p].insert(needs[p].end(), Need{item, 0, 0});
      (key ? it->key : it->optional) += use.quantity;
    };
    for (const auto& use : product.key_items) add(use, true);
    for (const auto& use : product.nonkey_items) add(use, false);
    std::sort(needs[p].begin(), needs[p].end(), [](const Need& a, const Need& b) { return a.item < b.item; });
    total_rate += product.arrival_rate;
    rates.push_back(product.arrival_rate);
  }
  boost::random::exponential_distribution<double> interarrival(total_rate);
  std::discrete_distribution<int> which_product(rates.begin(), rates.end());
  std::vector<boost::random::normal_distribution<double>> lead_time;
  for (const auto& item : config.items) lead_time.emplace_back(item.lead_time_mean, item.lead_time_sd);

  const double start = config.warmup_days;
  const double end = config.warmup_days + config.horizon_days;
  double holding_rate = 0.0;
  for (std::size_t i = 0; i < n_items; ++i) holding_rate += config.items[i].holding_cost * static_cast<double>(on_hand[i]);
  double clock = 0.0;
  auto advance = [&](double t) {
    const double lo = std::max(clock, start);
    const double hi = std::min(t, end);
    if (hi > lo) ledger.holding += holding_rate * (hi - lo);
    clock = t;
  };

  OrderPipeline pipeline(n_items);
  double next_arrival = interarrival(rng);
  while (true) {
    const bool delivery_next = !pipeline.empty() && pipeline.top().time < next_arrival;
    const double t = delivery_next ? pipeline.top().time : next_arrival;
    if (t > end) break;
    advance(t);
    if (delivery_next) {
      const Delivery d = pipeline.top();
      pipeline.pop();
      const auto i = static_cast<std::size_t>(d.item);
      on_hand[i] += d.quantity;
      ledger.received[i] += d.quantity;
      holding_rate += config.items[i].holding_cost * d.quantity;
      if (log) log->push_back({AtoEvent::Kind::kDelivery, t, -1, d.item, {{d.item, d.quantity}}, 0.0});
      continue;
    }

    const int p = which_product(rng);
    next_arrival = t + interarrival(rng);
    const auto& product_needs = needs[static_cast<std::size_t>(p)];
    bool available = true;
    for (const Need& n : product_needs) {
      if (on_hand[n.item] < n.key) {
        available = false;
        break;
      }
    }
    if (!available) {
      if (log) log->push_back({AtoEvent::Kind::kLostSale, t, p, -1, {}, 0.0});
      continue;
    }
    double revenue = 0.0;
    AtoEvent event{AtoEvent::Kind::kSale, t, p, -1, {}, 0.0};
    for (const Need& n : product_needs) {
      const auto i = n.item;
      const long take = n.key + std::min<long>(on_hand[i] - n.key, n.optional);
      if (take == 0) continue;
      on_hand[i] -= take;
      holding_rate -= config.items[i].holding_cost * static_cast<double>(take);
      revenue += config.items[i].profit * static_cast<double>(take);
      ledger.consumed[i] += take;
      ledger.ordered[i] += take;
      double lead = lead_time[i](rng);
      while (!(lead > 0.0)) lead = lead_time[i](rng);
      pipeline.push({t + lead, static_cast<int>(i), static_cast<int>(take)});
      if (log) event.stock_changes.emplace_back(static_cast<int>(i), -static_cast<int>(take));
    }
    if (t >= start) ledger.revenue += revenue;
    if (log) {
      event.revenue = revenue;
      log->push_back(std::move(event));
    }
  }
  advance(end);

  ledger.on_hand_end = on_hand;
  ledger.on_order_end.assign(n_items, 0);
  while (!pipeline.empty()) {
    ledger.on_order_end[static_cast<std::size_t>(pipeline.top().item)] += pipeline.top().quantity;
    pipeline.pop();
  }
  ledger.daily_profit = (ledger.revenue - ledger.holding) / config.horizon_days;
  return ledger;
}

std::pair<double, double> ato_audit_log(const AtoConfig& config, const std::vector<int>& stock_levels,
                                        const std::vector<AtoEvent>& log) {
  const double start = config.warmup_days;
  const double end = config.warmup_days + config.horizon_days;
  double revenue = 0.0;
  std::vector<double> stock_time(stock_levels.size(), 0.0);
  std::vector<long> stock(stock_levels.begin(), stock_levels.end());
  double last = 0.0;
  auto integrate = [&](double t) {
    const double len = std::min(t, end) - std::max(last, start);
    if (len > 0.0) {
      for (std::size_t i = 0; i < stock.size(); ++i) stock_time[i] += static_cast<double>(stock[i]) * len;
    }
    last = t;
  };
  for (const auto& event : log) {
    integrate(event.time);
    if (event.kind == AtoEvent::Kind::kSale) {
      // revenue from the units actually taken out of stock
      double r = 0.0;
      for (const auto& [item, change] : event.stock_changes) r += config.items[static_cast<std::size_t>(item)].profit * -change;
      if (event.time >= start) revenue += r;
    }
    for (const auto& [item, change] : event.stock_changes) stock[static_cast<std::size_t>(item)] += change;
  }
  integrate(end);
  double holding = 0.0;
  for (std::size_t i = 0; i < stock.size(); ++i) holding += config.items[i].holding_cost * stock_time[i];
  return {revenue, holding};
}

SimResult ato_simulate(const AtoConfig& config, const DesignPoint& targets, int replications,
                       std::uint64_t seed) {
  if (replications < 2) throw InvalidArgument("ato_simulate: need at least 2 replications");
  const std::vector<int> levels = ato_stock_levels(config, targets);
  std::vector<double> profits(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    profits[static_cast<std::size_t>(r)] =
        ato_replicate(config, levels, stream_seed(seed, "ato-replication", static_cast<std::uint64_t>(r))).daily_profit;
  }
  double mean = 0.0;
  for (double p : profits) mean += p;
  mean /= replications;
  double var = 0.0;
  for (double p : profits) var += (p - mean) * (p - mean);
  var /= replications - 1;
  return {mean, var / replications, replications};
}

AtoObjective::AtoObjective(std::string name, AtoConfig config)
    : name_(std::move(name)), config_(std::move(config)) {
  config_.validate();
  domain_ = config_.domain();
}

Observation AtoObjective::evaluate(const DesignPoint& x, Rng& rng) const {
  const SimResult result = ato_simulate(config_, x, config_.eval_replications, rng());
  return {0, x, result.mean_daily_profit, result.variance_of_mean};
}

double AtoObjective::true_value(const DesignPoint& x) const {
  std::vector<int> key = ato_stock_levels(config_, x);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = truth_cache_.find(key); it != truth_cache_.end()) return it->second;
  }
  const double value = ato_simulate(config_, x, config_.truth_replications, config_.truth_seed).mean_daily_profit;
  std::lock_guard lock(cache_mutex_);
  truth_cache_.emplace(std::move(key), value);
  return value;
}

}  // namespace wsbo
