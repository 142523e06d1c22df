#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace isdn {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b);

double db_to_linear(double db);
double linear_to_db(double x);
double dbm_to_watt(double dbm);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeSet {
  std::vector<Vec3> users;
  std::vector<Vec3> small_cells;
  std::vector<Vec3> drones;
  std::vector<double> hover_time;  // s, one per drone
  std::vector<Vec3> macro_cells;
  bool satellite_enabled = true;
  Vec3 satellite_initial;
  double satellite_speed = 7500.0;  // m/s along +x
  // box users are drawn from by sample_scenario
  Vec3 region_min, region_max;
  bool operator==(const NodeSet&) const = default;
};

struct TimeGrid {
  double delta = 1.0;
  double tau = 0.01;
  int T = 100;
  std::vector<int> effective_slots;  // T_n per BS
  bool operator==(const TimeGrid&) const = default;
};

struct DemandAndQoS {
  std::vector<double> data_demand;      // bits, per user
  std::vector<double> user_rate_floor;  // bit/s, per user
  std::vector<double> bs_rate_floor;    // bit/s, per BS
  bool operator==(const DemandAndQoS&) const = default;
};

// All linear SI.
struct RadioParams {
  double p_bs = 0, p_mbs = 0, p_sat = 0;
  double bw_terrestrial = 0, bw_satellite = 0;
  double noise = 0;
  double cochannel = 0;
  double rician_l1 = 1.0;
  double pathloss_alpha = 0, pathloss_intercept_db = 0;
  double shadow_sigma_db = 0;
  double q_mm = 0, q_ms = 0, q_rm = 0, q_rs = 0;
  double kappa_t = 0, kappa_r = 0;  // rad
  double blockage_phi = 0;          // 1/m, <= 0
  bool operator==(const RadioParams&) const = default;
};

// Per-link shadowing (dB) and LoS indicators, frozen at construction.
// Layout: bs_user[n*U+u], mbs_user[m*U+u], bs_bs[i*N+n] (tx i, rx n),
// mbs_bs[m*N+n], sat_bs[n].
struct ChannelDraws {
  std::vector<double> chi_bs_user, chi_mbs_user, chi_bs_bs, chi_mbs_bs, chi_sat_bs;
  std::vector<std::uint8_t> los_bs_user, los_mbs_user, los_bs_bs, los_mbs_bs, los_sat_bs;
  bool operator==(const ChannelDraws&) const = default;
};

struct Scenario {
  NodeSet nodes;
  TimeGrid time;
  DemandAndQoS demand;
  RadioParams radio;
  ChannelDraws draws;
  std::uint64_t seed = 0;

  int U() const { return static_cast<int>(nodes.users.size()); }
  int S() const { return static_cast<int>(nodes.small_cells.size()); }
  int E() const { return static_cast<int>(nodes.drones.size()); }
  int N() const { return S() + E(); }
  int M() const { return static_cast<int>(nodes.macro_cells.size()); }
  int T() const { return time.T; }
  int Tn(int n) const { return time.effective_slots[n]; }
  bool is_drone(int n) const { return n >= S(); }
  const Vec3& bs_position(int n) const {
    return n < S() ? nodes.small_cells[n] : nodes.drones[n - S()];
  }
  Vec3 satellite_at(int t) const;

  bool operator==(const Scenario&) const = default;
};

// Reads sections nodes/time/radio/market. The seed drives user placement
// (when users are given as a count) and all channel draws.
Scenario load_scenario(const nlohmann::json& doc, std::optional<std::uint64_t> seed = std::nullopt);
Scenario load_scenario_file(const std::string& path, std::optional<std::uint64_t> seed = std::nullopt);

Scenario sample_scenario(const Scenario& tmpl, std::uint64_t seed);

// Throws ConfigError on any invariant violation.
void validate(const Scenario& s);

}  // namespace isdn
