#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isdn/channel.hpp"
#include "isdn/equilibrium.hpp"
#include "isdn/experiment.hpp"
#include "isdn/market.hpp"
#include "isdn/scenario.hpp"

using namespace isdn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

struct Globals {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string out;
  std::optional<int> max_iters;
  std::optional<double> step0;
  std::string sat_mode;
};

SolverConfig solver_from(const json& doc, const Globals& g) {
  SolverConfig c = load_solver_config(doc);
  if (!g.method.empty()) c.method = parse_method(g.method);
  if (g.max_iters) c.max_iters = *g.max_iters;
  if (g.step0) c.step0 = *g.step0;
  if (!g.sat_mode.empty()) c.sat_mode = parse_satellite_rate_mode(g.sat_mode);
  validate(c);
  return c;
}

std::vector<double> json_rates(const json& report, const char* key) {
  std::vector<double> v;
  if (!report.contains(key)) throw ConfigError(std::string("report lacks ") + key);
  for (const auto& x : report.at(key)) v.push_back(x.get<double>());
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Market-based resource allocation for satellite/drone/small-cell networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--scenario", g.scenario, "scenario JSON");
  app.add_option("--seed", g.seed, "scenario seed");
  app.add_option("--method", g.method, "heavy_ball | subgradient | random | brute_force");
  app.add_option("--out", g.out, "output directory or file");
  app.add_option("--max-iters", g.max_iters);
  app.add_option("--step0", g.step0);
  app.add_option("--satellite-rate-mode", g.sat_mode, "exact | drift");

  auto* run = app.add_subcommand("run", "run solver cells and write traces, reports and summary.csv");
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  std::string sweep;
  int jobs = 1;
  double acc_thr = 40e6, bh_thr = 1.6e9;
  run->add_option("--methods", methods, "one or more methods")->delimiter(',');
  run->add_option("--seeds", seeds, "one or more seeds")->delimiter(',');
  run->add_option("--sweep", sweep, "drones=1..6 | sbs=1,2,3 | satellite=on,off");
  run->add_option("--jobs", jobs, "cells run in parallel");
  run->add_option("--access-threshold", acc_thr, "bit/s");
  run->add_option("--backhaul-threshold", bh_thr, "bit/s");

  auto* cdf = app.add_subcommand("cdf", "per-link rate CDFs from report files");
  std::vector<std::string> reports;
  cdf->add_option("reports", reports, "report JSON files")->required();

  auto* dump = app.add_subcommand("dump-rates", "write the rate table as CSV");

  auto* check = app.add_subcommand("validate", "constraint-check an allocation or report file");
  std::string alloc_path;
  check->add_option("allocation", alloc_path, "allocation JSON (or a report containing one)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      if (g.scenario.empty()) throw ConfigError("--scenario is required");
      ExperimentSpec spec;
      spec.scenario = read_json(g.scenario);
      spec.solver = solver_from(spec.scenario, g);
      if (methods.empty()) methods.push_back(method_name(spec.solver.method));
      for (const auto& m : methods) spec.methods.push_back(parse_method(m));
      if (seeds.empty()) seeds.push_back(g.seed ? *g.seed : load_scenario(spec.scenario).seed);
      spec.seeds = seeds;
      if (!sweep.empty()) spec.sweep = parse_sweep(sweep);
      spec.output_dir = g.out.empty() ? "out" : g.out;
      spec.access_threshold = acc_thr;
      spec.backhaul_threshold = bh_thr;
      spec.jobs = jobs;
      const auto cells = run_experiment(spec);
      int converged = 0;
      for (const auto& c : cells) converged += c.converged;
      std::cout << cells.size() << " cells, " << converged << " converged, summary in "
                << (fs::path(spec.output_dir) / "summary.csv").string() << "\n";
      return 0;
    }
    if (*cdf) {
      std::vector<double> acc, bh;
      for (const auto& p : reports) {
        const json rep = read_json(p);
        for (double v : json_rates(rep, "access_rates_bps")) acc.push_back(v);
        for (double v : json_rates(rep, "backhaul_rates_bps")) bh.push_back(v);
      }
      if (acc.empty() && bh.empty()) throw ConfigError("reports contain no links");
      const fs::path dir = g.out.empty() ? "." : g.out;
      fs::create_directories(dir);
      std::ofstream fa(dir / "cdf_access.csv"), fb(dir / "cdf_backhaul.csv");
      write_cdf_csv(fa, empirical_cdf(acc));
      write_cdf_csv(fb, empirical_cdf(bh));
      if (!fa || !fb) throw std::runtime_error("cannot write CDF files in '" + dir.string() + "'");
      return 0;
    }
    if (*dump) {
      if (g.scenario.empty()) throw ConfigError("--scenario is required");
      const Scenario s = load_scenario_file(g.scenario, g.seed);
      const RateTable r = build_rate_table(s);
      if (g.out.empty()) {
        write_rates_csv(std::cout, r);
      } else {
        std::ofstream f(g.out);
        write_rates_csv(f, r);
        if (!f) throw std::runtime_error("cannot write '" + g.out + "'");
      }
      return 0;
    }
    if (*check) {
      if (g.scenario.empty()) throw ConfigError("--scenario is required");
      const Scenario s = load_scenario_file(g.scenario, g.seed);
      const RateTable r = build_rate_table(s);
      json doc = read_json(alloc_path);
      if (doc.contains("allocation")) doc = doc.at("allocation");
      const AllocationState a = allocation_from_json(doc);
      if (!(a.dims == Dims::of(s))) throw ConfigError("allocation dimensions do not match the scenario");
      const ConstraintReport rep = check_constraints(a, r, s);
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.all_ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
