#include "isdn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace isdn {

using nlohmann::json;

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

Vec3 Scenario::satellite_at(int t) const {
  Vec3 p = nodes.satellite_initial;
  p.x += nodes.satellite_speed * static_cast<double>(t) * time.tau;
  return p;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) fail(path + "." + key, "missing key");
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& path, double dflt) {
  if (!obj.is_object() || !obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double positive(const json& obj, const std::string& key, const std::string& path, double dflt) {
  double v = number(obj, key, path, dflt);
  if (!(v > 0.0) || !std::isfinite(v)) fail(path + "." + key, "must be positive");
  return v;
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected [x, y, z]");
  for (const auto& c : v)
    if (!c.is_number()) fail(path, "expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<Vec3> vec3_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of positions");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec3(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> per_entity(const json& obj, const std::string& key, const std::string& path,
                               double dflt, std::size_t count) {
  if (!obj.is_object() || !obj.contains(key)) return std::vector<double>(count, dflt);
  const json& v = obj.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(count, v.get<double>());
  } else if (v.is_array()) {
    if (v.size() != count) fail(path + "." + key, "expected " + std::to_string(count) + " entries");
    for (const auto& e : v) {
      if (!e.is_number()) fail(path + "." + key, "expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    fail(path + "." + key, "expected a number or list");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(out[i] > 0.0)) fail(path + "." + key + "[" + std::to_string(i) + "]", "must be positive");
  return out;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

void draw_users(Scenario& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vec3& a = s.nodes.region_min;
  const Vec3& b = s.nodes.region_max;
  for (auto& p : s.nodes.users) {
    p.x = uniform_in(rng, a.x, b.x);
    p.y = uniform_in(rng, a.y, b.y);
    p.z = uniform_in(rng, a.z, b.z);
  }
}

void draw_channel(Scenario& s, std::uint64_t seed) {
  const double sigma = s.radio.shadow_sigma_db;
  const double phi = s.radio.blockage_phi;
  const int U = s.U(), N = s.N(), M = s.M();
  ChannelDraws& d = s.draws;
  d = ChannelDraws{};

  // Each link gets its own stream keyed by node identity, so adding or
  // removing a node leaves every other link's draw unchanged.
  auto bs_key = [&](int n) -> std::uint32_t { return s.is_drone(n) ? 0x10000u + (n - s.S()) : n; };
  auto link = [&](std::vector<double>& chi, std::vector<std::uint8_t>& los, std::uint32_t kind, std::uint32_t ka,
                  std::uint32_t kb, const Vec3& a, const Vec3& b, bool always_los) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), kind, ka, kb};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> shadow(0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    chi.push_back(sigma * shadow(rng));
    const double p = always_los ? 1.0 : std::exp(phi * distance(a, b));
    los.push_back(coin(rng) < p ? 1 : 0);
  };

  for (int n = 0; n < N; ++n)
    for (int u = 0; u < U; ++u)
      link(d.chi_bs_user, d.los_bs_user, 1, bs_key(n), u, s.bs_position(n), s.nodes.users[u], s.is_drone(n));
  for (int m = 0; m < M; ++m)
    for (int u = 0; u < U; ++u)
      link(d.chi_mbs_user, d.los_mbs_user, 2, m, u, s.nodes.macro_cells[m], s.nodes.users[u], false);
  for (int i = 0; i < N; ++i)
    for (int n = 0; n < N; ++n) {
      if (i == n) {
        d.chi_bs_bs.push_back(0.0);
        d.los_bs_bs.push_back(0);
        continue;
      }
      link(d.chi_bs_bs, d.los_bs_bs, 3, bs_key(i), bs_key(n), s.bs_position(i), s.bs_position(n), false);
    }
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n)
      link(d.chi_mbs_bs, d.los_mbs_bs, 4, m, bs_key(n), s.nodes.macro_cells[m], s.bs_position(n), false);
  for (int n = 0; n < N; ++n)
    link(d.chi_sat_bs, d.los_sat_bs, 5, bs_key(n), 0, s.nodes.satellite_initial, s.bs_position(n), true);
}

}  // namespace

void validate(const Scenario& s) {
  if (s.U() < 1) fail("nodes.users", "need at least one user");
  if (s.N() < 1) fail("nodes", "need at least one small cell or drone");
  if (s.M() < 1 && !s.nodes.satellite_enabled) fail("nodes", "need a macro cell or an enabled satellite");
  for (int e = 0; e < s.E(); ++e) {
    const std::string p = "nodes.drones[" + std::to_string(e) + "]";
    if (!(s.nodes.drones[e].z > 0.0)) fail(p + ".position", "drone altitude must be positive");
    if (!(s.nodes.hover_time[e] > 0.0)) fail(p + ".hover_time", "must be positive");
  }
  if (s.time.T < 1) fail("time", "slot count must be at least 1");
  if (static_cast<int>(s.time.effective_slots.size()) != s.N()) fail("time", "effective slot table size mismatch");
  for (int n = 0; n < s.N(); ++n) {
    const int tn = s.time.effective_slots[n];
    const std::string p = s.is_drone(n) ? "nodes.drones[" + std::to_string(n - s.S()) + "].hover_time"
                                        : "nodes.small_cells[" + std::to_string(n) + "]";
    if (tn > s.time.T) fail(p, "effective slots " + std::to_string(tn) + " exceed T = " + std::to_string(s.time.T));
    if (tn < 1) fail(p, "hover time shorter than one slot");
  }
  const RadioParams& r = s.radio;
  const double two_pi = 2.0 * std::numbers::pi;
  if (!(r.kappa_t > 0.0 && r.kappa_t <= two_pi)) fail("radio.beamwidth_tx_deg", "must be in (0, 360]");
  if (!(r.kappa_r > 0.0 && r.kappa_r <= two_pi)) fail("radio.beamwidth_rx_deg", "must be in (0, 360]");
  if (r.q_mm < r.q_ms) fail("radio.q_ms_db", "side lobe exceeds main lobe");
  if (r.q_rm < r.q_rs) fail("radio.q_rs_db", "side lobe exceeds main lobe");
  if (r.blockage_phi > 0.0) fail("radio.blockage_phi", "must be <= 0");
  if (r.shadow_sigma_db < 0.0) fail("radio.shadow_sigma_db", "must be >= 0");
  if (static_cast<int>(s.demand.data_demand.size()) != s.U() ||
      static_cast<int>(s.demand.user_rate_floor.size()) != s.U() ||
      static_cast<int>(s.demand.bs_rate_floor.size()) != s.N())
    fail("market", "demand table size mismatch");
}

Scenario load_scenario(const json& doc, std::optional<std::uint64_t> seed) {
  if (!doc.is_object()) fail("$", "expected an object");
  Scenario s;
  s.seed = seed ? *seed : static_cast<std::uint64_t>(number(doc, "seed", "$", 1.0));

  const json& nodes = require(doc, "nodes", "$");
  const json& users = require(nodes, "users", "nodes");
  bool draw_positions = false;
  if (users.is_object() && users.contains("positions")) {
    s.nodes.users = vec3_list(users.at("positions"), "nodes.users.positions");
  } else if (users.is_object() && users.contains("count")) {
    const json& c = users.at("count");
    if (!c.is_number_integer() || c.get<long long>() < 1) fail("nodes.users.count", "must be a positive integer");
    s.nodes.users.assign(static_cast<std::size_t>(c.get<long long>()), Vec3{});
    draw_positions = true;
  } else {
    fail("nodes.users", "expected {count, region} or {positions}");
  }
  if (users.contains("region")) {
    const json& reg = users.at("region");
    s.nodes.region_min = vec3(require(reg, "min", "nodes.users.region"), "nodes.users.region.min");
    s.nodes.region_max = vec3(require(reg, "max", "nodes.users.region"), "nodes.users.region.max");
    const Vec3 &a = s.nodes.region_min, &b = s.nodes.region_max;
    if (a.x > b.x || a.y > b.y || a.z > b.z) fail("nodes.users.region", "min exceeds max");
  } else if (draw_positions) {
    fail("nodes.users.region", "missing key");
  } else if (!s.nodes.users.empty()) {
    Vec3 lo = s.nodes.users[0], hi = lo;
    for (const auto& p : s.nodes.users) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    s.nodes.region_min = lo;
    s.nodes.region_max = hi;
  }

  s.nodes.small_cells = vec3_list(require(nodes, "small_cells", "nodes"), "nodes.small_cells");
  const json& drones = require(nodes, "drones", "nodes");
  if (!drones.is_array()) fail("nodes.drones", "expected a list");
  for (std::size_t i = 0; i < drones.size(); ++i) {
    const std::string p = "nodes.drones[" + std::to_string(i) + "]";
    s.nodes.drones.push_back(vec3(require(drones[i], "position", p), p + ".position"));
    s.nodes.hover_time.push_back(number(drones[i], "hover_time", p, 0.0));
    if (!drones[i].contains("hover_time")) fail(p + ".hover_time", "missing key");
  }
  s.nodes.macro_cells = vec3_list(require(nodes, "macro_cells", "nodes"), "nodes.macro_cells");
  s.nodes.satellite_initial = {0.0, 0.0, 550e3};
  if (nodes.contains("satellite")) {
    const json& sat = nodes.at("satellite");
    if (sat.contains("enabled")) {
      if (!sat.at("enabled").is_boolean()) fail("nodes.satellite.enabled", "expected a boolean");
      s.nodes.satellite_enabled = sat.at("enabled").get<bool>();
    }
    if (sat.contains("initial")) s.nodes.satellite_initial = vec3(sat.at("initial"), "nodes.satellite.initial");
    s.nodes.satellite_speed = number(sat, "speed", "nodes.satellite", 7500.0);
    if (s.nodes.satellite_speed < 0.0) fail("nodes.satellite.speed", "must be >= 0");
  }
  if (!(s.nodes.satellite_initial.z > 0.0)) fail("nodes.satellite.initial", "altitude must be positive");

  const json time = doc.contains("time") ? doc.at("time") : json::object();
  s.time.tau = positive(time, "tau", "time", 0.01);
  if (time.contains("slots")) {
    const json& t = time.at("slots");
    if (!t.is_number_integer() || t.get<long long>() < 1) fail("time.slots", "must be a positive integer");
    s.time.T = static_cast<int>(t.get<long long>());
    s.time.delta = s.time.T * s.time.tau;
  } else {
    s.time.delta = positive(time, "delta", "time", 1.0);
    const double ratio = s.time.delta / s.time.tau;
    const double r = std::round(ratio);
    if (r < 1.0 || std::abs(r * s.time.tau - s.time.delta) > 1e-9 * s.time.delta)
      fail("time.delta", "not an integer multiple of time.tau");
    s.time.T = static_cast<int>(r);
  }
  s.time.effective_slots.assign(s.nodes.small_cells.size(), s.time.T);
  for (double h : s.nodes.hover_time) {
    // guard against 0.15/0.01 = 14.999999999999998
    s.time.effective_slots.push_back(static_cast<int>(std::floor(h / s.time.tau + 1e-9)));
  }

  const json radio = doc.contains("radio") ? doc.at("radio") : json::object();
  RadioParams& r = s.radio;
  r.p_bs = dbm_to_watt(number(radio, "bs_power_dbm", "radio", 20.0));
  r.p_mbs = dbm_to_watt(number(radio, "mbs_power_dbm", "radio", 43.0));
  r.p_sat = db_to_linear(number(radio, "sat_power_dbw", "radio", 9.23));
  r.bw_terrestrial = positive(radio, "bandwidth_terrestrial_hz", "radio", 56e6);
  r.bw_satellite = positive(radio, "bandwidth_satellite_hz", "radio", 500e6);
  r.noise = db_to_linear(number(radio, "noise_db", "radio", -104.0));
  r.cochannel = db_to_linear(number(radio, "cochannel_db", "radio", 10.5354));
  r.rician_l1 = positive(radio, "rician_l1", "radio", 1.0);
  r.pathloss_alpha = positive(radio, "pathloss_alpha", "radio", 2.0);
  r.pathloss_intercept_db = number(radio, "pathloss_intercept_db", "radio", 61.4);
  r.shadow_sigma_db = number(radio, "shadow_sigma_db", "radio", 5.8);
  r.q_mm = db_to_linear(number(radio, "q_mm_db", "radio", 18.0));
  r.q_ms = db_to_linear(number(radio, "q_ms_db", "radio", -2.0));
  r.q_rm = db_to_linear(number(radio, "q_rm_db", "radio", 18.0));
  r.q_rs = db_to_linear(number(radio, "q_rs_db", "radio", -2.0));
  r.kappa_t = number(radio, "beamwidth_tx_deg", "radio", 30.0) * std::numbers::pi / 180.0;
  r.kappa_r = number(radio, "beamwidth_rx_deg", "radio", 30.0) * std::numbers::pi / 180.0;
  r.blockage_phi = number(radio, "blockage_phi", "radio", -0.0025);

  const json market = doc.contains("market") ? doc.at("market") : json::object();
  const std::size_t U = s.nodes.users.size();
  const std::size_t N = s.nodes.small_cells.size() + s.nodes.drones.size();
  s.demand.data_demand = per_entity(market, "data_demand_bits", "market", 50e6, U);
  s.demand.user_rate_floor = per_entity(market, "user_rate_floor_bps", "market", 10e6, U);
  s.demand.bs_rate_floor = per_entity(market, "bs_rate_floor_bps", "market", 200e6, N);

  validate(s);
  if (draw_positions) draw_users(s, s.seed);
  draw_channel(s, s.seed);
  return s;
}

Scenario load_scenario_file(const std::string& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return load_scenario(doc, seed);
}

Scenario sample_scenario(const Scenario& tmpl, std::uint64_t seed) {
  validate(tmpl);
  Scenario s = tmpl;
  s.seed = seed;
  draw_users(s, seed);
  draw_channel(s, seed);
  return s;
}

}  // namespace isdn
