#pragma once

#include <cstdint>
#include <random>

#include <json.hpp>

#include "isdn/equilibrium.hpp"

namespace isdn::test {

// Random tiny instance: U <= 3, N <= 2, M = 1, T <= 4.
inline nlohmann::json tiny_doc(std::uint64_t seed) {
  using nlohmann::json;
  std::mt19937_64 g(seed);
  const int U = std::uniform_int_distribution<int>(1, 3)(g);
  const int N = std::uniform_int_distribution<int>(1, 2)(g);
  const int E = std::uniform_int_distribution<int>(0, N)(g);
  const int T = std::uniform_int_distribution<int>(2, 4)(g);
  std::uniform_real_distribution<double> xy(0, 100);
  json small = json::array(), drones = json::array();
  for (int i = 0; i < N - E; ++i) small.push_back(json::array({xy(g), xy(g), 10}));
  for (int i = 0; i < E; ++i) {
    const double hover = 0.01 * std::uniform_int_distribution<int>(1, T)(g);
    drones.push_back({{"position", {xy(g), xy(g), 60}}, {"hover_time", hover}});
  }
  const bool sat = std::bernoulli_distribution(0.5)(g);
  json doc;
  doc["nodes"]["users"] = {{"count", U}, {"region", {{"min", {0, 0, 1.5}}, {"max", {100, 100, 1.5}}}}};
  doc["nodes"]["small_cells"] = small;
  doc["nodes"]["drones"] = drones;
  doc["nodes"]["macro_cells"] = json::array({json::array({xy(g), xy(g), 30})});
  doc["nodes"]["satellite"] = {{"enabled", sat}};
  doc["time"] = {{"tau", 0.01}, {"slots", T}};
  doc["radio"] = {{"cochannel_db", -93.4646}, {"blockage_phi", -0.005}};
  doc["market"] = {{"data_demand_bits", 1e4}, {"user_rate_floor_bps", 2e6}, {"bs_rate_floor_bps", 100e6}};
  doc["seed"] = seed;
  return doc;
}

inline Scenario tiny(std::uint64_t seed) { return load_scenario(tiny_doc(seed)); }

// Uniformly random allocation; every entry independent.
inline AllocationState random_alloc(Dims d, std::mt19937_64& g, double density = 0.3) {
  AllocationState a = AllocationState::zeros(d);
  std::bernoulli_distribution on(density);
  for (auto* v : {&a.rho, &a.theta, &a.delta, &a.phi, &a.beta, &a.eps})
    for (auto& x : *v) x = on(g);
  return a;
}

// Cleared: buyer schedules copied from the seller side.
inline AllocationState random_cleared(Dims d, std::mt19937_64& g, double density = 0.3) {
  AllocationState a = random_alloc(d, g, density);
  a.theta = a.rho;
  a.phi = a.delta;
  a.eps = a.beta;
  return a;
}

inline PriceState random_prices(Dims d, std::mt19937_64& g, double scale = 1.0) {
  PriceState p = PriceState::zeros(d);
  std::uniform_real_distribution<double> x(0.0, scale);
  for (auto* v : {&p.lambda, &p.varsigma, &p.xi})
    for (auto& y : *v) y = x(g);
  return p;
}

}  // namespace isdn::test
