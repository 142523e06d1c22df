#include <doctest.h>

#include <cmath>
#include <random>

#include "isdn/scenario.hpp"
#include "support.hpp"

using namespace isdn;
using nlohmann::json;

namespace {

json desk_doc() {
  return json::parse(R"({
    "nodes": {
      "users": {"count": 12, "region": {"min": [0, 0, 1.5], "max": [200, 200, 1.5]}},
      "small_cells": [[50, 50, 10], [150, 150, 10]],
      "drones": [{"position": [50, 150, 100], "hover_time": 0.2},
                 {"position": [150, 50, 100], "hover_time": 0.15}],
      "macro_cells": [[400, 400, 30]],
      "satellite": {"enabled": true}
    },
    "time": {"tau": 0.01, "slots": 20}
  })");
}

bool throws_config(const json& doc, const std::string& needle) {
  try {
    load_scenario(doc);
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("dB conversions round-trip") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> ex(-15.0, 15.0), db(-200.0, 200.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, ex(g));
    CHECK(db_to_linear(linear_to_db(x)) == doctest::Approx(x).epsilon(1e-12));
    const double d = db(g);
    CHECK(linear_to_db(db_to_linear(d)) == doctest::Approx(d).epsilon(1e-12));
  }
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(20.0) == doctest::Approx(0.1));
}

TEST_CASE("desk layout") {
  const Scenario s = load_scenario(desk_doc());
  CHECK(s.U() == 12);
  CHECK(s.S() == 2);
  CHECK(s.E() == 2);
  CHECK(s.N() == 4);
  CHECK(s.M() == 1);
  CHECK(s.T() == 20);
  CHECK(s.Tn(0) == 20);
  CHECK(s.Tn(2) == 20);
  CHECK(s.Tn(3) == 15);
  CHECK(s.is_drone(2));
  CHECK_FALSE(s.is_drone(1));
  for (const auto& u : s.nodes.users) {
    CHECK(u.x >= 0.0);
    CHECK(u.x <= 200.0);
    CHECK(u.z == 1.5);
  }
  CHECK(s.draws.chi_bs_user.size() == 48u);
  CHECK(s.draws.chi_sat_bs.size() == 4u);
}

TEST_CASE("seed determinism") {
  const Scenario a = load_scenario(desk_doc(), 5), b = load_scenario(desk_doc(), 5), c = load_scenario(desk_doc(), 6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(sample_scenario(a, 6) == c);
}

TEST_CASE("link draws are keyed by node, not by count") {
  json more = desk_doc();
  more["nodes"]["drones"].push_back({{"position", {100, 100, 100}}, {"hover_time", 0.2}});
  const Scenario a = load_scenario(desk_doc(), 3), b = load_scenario(more, 3);
  for (int n = 0; n < a.N(); ++n) {
    CHECK(a.draws.chi_sat_bs[n] == b.draws.chi_sat_bs[n]);
    for (int u = 0; u < a.U(); ++u) {
      CHECK(a.draws.chi_bs_user[n * a.U() + u] == b.draws.chi_bs_user[n * b.U() + u]);
      CHECK(a.draws.los_bs_user[n * a.U() + u] == b.draws.los_bs_user[n * b.U() + u]);
    }
  }
  CHECK(a.nodes.users == b.nodes.users);
}

TEST_CASE("time grid") {
  json d = desk_doc();
  d["time"] = {{"tau", 0.01}, {"delta", 0.2}};
  CHECK(load_scenario(d).T() == 20);
  d["time"] = {{"tau", 0.01}, {"delta", 0.205}};
  CHECK(throws_config(d, "time.delta"));
  d["time"] = {{"tau", 0.01}, {"slots", 10}};
  CHECK(throws_config(d, "exceed T"));
  d = desk_doc();
  d["nodes"]["drones"][0]["hover_time"] = 0.001;
  CHECK(throws_config(d, "nodes.drones[0].hover_time"));
}

TEST_CASE("config errors name the offending key") {
  json d = desk_doc();
  d["nodes"].erase("macro_cells");
  CHECK(throws_config(d, "nodes.macro_cells"));
  d = desk_doc();
  d["nodes"]["small_cells"][1] = {1, 2};
  CHECK(throws_config(d, "nodes.small_cells[1]"));
  d = desk_doc();
  d["market"] = {{"user_rate_floor_bps", -1}};
  CHECK(throws_config(d, "user_rate_floor_bps"));
  d = desk_doc();
  d["market"] = {{"bs_rate_floor_bps", {1, 2}}};
  CHECK(throws_config(d, "expected 4 entries"));
  d = desk_doc();
  d["nodes"]["users"] = {{"count", 0}};
  CHECK(throws_config(d, "nodes.users.count"));
  d = desk_doc();
  d["nodes"]["drones"][1]["position"] = {1, 1, 0};
  CHECK(throws_config(d, "altitude"));
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/x.json"), ConfigError);
}

TEST_CASE("explicit user positions") {
  json d = desk_doc();
  d["nodes"]["users"] = {{"positions", {{1, 2, 1.5}, {3, 4, 1.5}}}};
  const Scenario s = load_scenario(d);
  CHECK(s.U() == 2);
  CHECK(s.nodes.users[1] == Vec3{3, 4, 1.5});
}

TEST_CASE("satellite moves along x") {
  const Scenario s = load_scenario(desk_doc());
  CHECK(s.satellite_at(0) == s.nodes.satellite_initial);
  CHECK(s.satellite_at(10).x == doctest::Approx(s.nodes.satellite_initial.x + 7500.0 * 0.1));
}
