#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isdn/channel.hpp"
#include "support.hpp"

using namespace isdn;
using nlohmann::json;

namespace {

Scenario leo(double tau, int slots) {
  json d = test::tiny_doc(11);
  d["time"] = {{"tau", tau}, {"slots", slots}};
  d["nodes"]["drones"] = json::array();
  d["nodes"]["small_cells"] = {{0, 0, 10}, {100, 0, 10}, {0, 100, 10}};
  d["nodes"]["satellite"] = {{"enabled", true}, {"initial", {0, 0, 550000}}, {"speed", 7500}};
  return load_scenario(d);
}

double worst_drift_error(const Scenario& s) {
  const RateTable r = build_rate_table(s);
  double worst = 0.0;
  for (int n = 0; n < s.N(); ++n)
    for (int t = 1; t < s.T(); ++t) {
      const double est = r.s(n, t - 1) + satellite_rate_drift(n, t, r, s);
      worst = std::max(worst, std::abs(est - r.s(n, t)) / r.s(n, t));
    }
  return worst;
}

}  // namespace

TEST_CASE("antenna pattern") {
  CHECK(antenna_gain(0.0, 0.5, 10.0, 0.1) == 10.0);
  CHECK(antenna_gain(0.24, 0.5, 10.0, 0.1) == 10.0);
  CHECK(antenna_gain(0.3, 0.5, 10.0, 0.1) == 0.1);
  const double avg = average_interferer_gain(0.5, 10.0, 0.1);
  CHECK(avg > 0.1);
  CHECK(avg < 10.0);
}

TEST_CASE("rate table shape and sanity") {
  const Scenario s = test::tiny(3);
  const RateTable r = build_rate_table(s);
  CHECK(r.access.size() == static_cast<std::size_t>(s.N() * s.U()));
  CHECK(r.backhaul.size() == static_cast<std::size_t>(s.N() * s.M()));
  CHECK(r.satellite.size() == static_cast<std::size_t>(s.N() * s.T()));
  for (double x : r.access) {
    CHECK(std::isfinite(x));
    CHECK(x >= 0.0);
  }
  for (double x : r.backhaul) CHECK(x >= 0.0);
  CHECK(build_rate_table(s).access == r.access);
}

TEST_CASE("disabled satellite carries nothing") {
  json d = test::tiny_doc(4);
  d["nodes"]["satellite"]["enabled"] = false;
  const Scenario s = load_scenario(d);
  const RateTable r = build_rate_table(s);
  for (double x : r.satellite) CHECK(x == 0.0);
}

TEST_CASE("closer user gets the better access rate") {
  json d = test::tiny_doc(5);
  d["nodes"]["users"] = {{"positions", {{10, 0, 1.5}, {90, 0, 1.5}}}};
  d["nodes"]["small_cells"] = {{0, 0, 10}};
  d["nodes"]["drones"] = json::array();
  d["radio"]["shadow_sigma_db"] = 0.0;
  d["radio"]["blockage_phi"] = -1e-9;
  const Scenario s = load_scenario(d);
  const RateTable r = build_rate_table(s);
  CHECK(r.a(0, 0) > r.a(0, 1));
}

TEST_CASE("drift estimate tracks the satellite rate") {
  const double e10 = worst_drift_error(leo(0.01, 101));
  const double e1 = worst_drift_error(leo(0.001, 101));
  const double e01 = worst_drift_error(leo(0.0001, 101));
  CHECK(e10 < 0.01);
  CHECK(e1 < e10);
  CHECK(e01 < e1);
  const Scenario s = leo(0.01, 5);
  const RateTable r = build_rate_table(s);
  CHECK(perceived_satellite_rate(0, 0, r, s, SatelliteRateMode::Drift) == r.s(0, 0));
  CHECK(perceived_satellite_rate(1, 3, r, s, SatelliteRateMode::Exact) == r.s(1, 3));
  CHECK_THROWS_AS(satellite_rate_drift(0, 0, r, s), std::invalid_argument);
}

TEST_CASE("rate csv") {
  const Scenario s = test::tiny(6);
  std::ostringstream out;
  write_rates_csv(out, build_rate_table(s));
  const std::string text = out.str();
  CHECK(text.rfind("kind,from,to,slot,rate_bps,sinr_db\n", 0) == 0);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 1 + s.N() * s.U() + s.N() * s.M() + s.N() * s.T());
}
