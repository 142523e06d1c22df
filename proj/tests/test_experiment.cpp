#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isdn/experiment.hpp"
#include "support.hpp"

using namespace isdn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json six_drones() {
  json d = test::tiny_doc(3);
  d["nodes"]["drones"] = json::array();
  for (int i = 0; i < 6; ++i) d["nodes"]["drones"].push_back({{"position", {10.0 + 15 * i, 50, 60}}, {"hover_time", 0.02}});
  d["nodes"]["small_cells"] = {{20, 20, 10}};
  d["time"] = {{"tau", 0.01}, {"slots", 3}};
  return d;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("isdn_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentSpec spec_for(const json& doc, const fs::path& out) {
  ExperimentSpec e;
  e.scenario = doc;
  e.methods = {Method::HeavyBall};
  e.seeds = {1};
  e.output_dir = out.string();
  e.solver.max_iters = 10;
  return e;
}

}  // namespace

TEST_CASE("sweep parsing") {
  const Sweep a = parse_sweep("drones=1..3");
  CHECK(a.key == "drones");
  CHECK(a.values == std::vector<std::string>{"1", "2", "3"});
  CHECK(parse_sweep("sbs=2,4").values == std::vector<std::string>{"2", "4"});
  CHECK(parse_sweep("satellite=on,off").values.size() == 2);
  CHECK_THROWS_AS(parse_sweep("drones"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("users=1..2"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("drones=3..1"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("drones=x"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("satellite=maybe"), ConfigError);
}

TEST_CASE("sweep points") {
  const json d = six_drones();
  const json two = apply_sweep_point(d, "drones", "2");
  CHECK(two["nodes"]["drones"].size() == 2);
  CHECK(two["nodes"]["drones"][1] == d["nodes"]["drones"][1]);
  CHECK(apply_sweep_point(d, "satellite", "off")["nodes"]["satellite"]["enabled"] == false);
  CHECK_THROWS_AS(apply_sweep_point(d, "drones", "7"), ConfigError);
}

TEST_CASE("single cell writes one trace, one report, one summary row") {
  const fs::path out = scratch("single");
  const auto cells = run_experiment(spec_for(six_drones(), out));
  REQUIRE(cells.size() == 1);
  CHECK(fs::exists(out / cells[0].trace_file));
  CHECK(fs::exists(out / cells[0].report_file));
  const std::string summary = slurp(out / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 2);
  fs::remove_all(out);
}

TEST_CASE("sweep grid row count and determinism") {
  const fs::path out = scratch("grid");
  ExperimentSpec e = spec_for(six_drones(), out);
  e.methods = {Method::HeavyBall, Method::Random};
  e.sweep = parse_sweep("drones=1..6");
  e.seeds = {1, 2, 3};
  e.jobs = 2;
  CHECK(run_experiment(e).size() == 36);
  const std::string first = slurp(out / "summary.csv");
  CHECK(std::count(first.begin(), first.end(), '\n') == 37);
  run_experiment(e);
  CHECK(slurp(out / "summary.csv") == first);
  fs::remove_all(out);
}

TEST_CASE("invalid specs are rejected") {
  ExperimentSpec e = spec_for(six_drones(), scratch("bad"));
  e.methods.clear();
  CHECK_THROWS_AS(run_experiment(e), ConfigError);
  e = spec_for(six_drones(), scratch("bad"));
  e.sweep = parse_sweep("drones=1..9");
  CHECK_THROWS_AS(run_experiment(e), ConfigError);
  e = spec_for(six_drones(), "/proc/forbidden/out");
  CHECK_THROWS_AS(run_experiment(e), std::runtime_error);
}

TEST_CASE("empirical cdf") {
  const Cdf one = empirical_cdf({5e6});
  CHECK(one.rate == std::vector<double>{5e6});
  CHECK(one.cdf == std::vector<double>{1.0});
  const Cdf c = empirical_cdf({3, 1, 2, 2, 5});
  CHECK(c.rate == std::vector<double>{1, 2, 3, 5});
  CHECK(c.cdf[1] == doctest::Approx(0.6));
  for (std::size_t i = 1; i < c.cdf.size(); ++i) CHECK(c.cdf[i] >= c.cdf[i - 1]);
  CHECK(c.cdf.back() == 1.0);
  std::ostringstream out;
  write_cdf_csv(out, one);
  CHECK(out.str() == "rate_bps,cdf\n5000000,1\n");
}
