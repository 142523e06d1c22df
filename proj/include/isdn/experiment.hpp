#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isdn/equilibrium.hpp"

namespace isdn {

// Sweep keys: "drones" and "sbs" keep the first k entries of the scenario's
// drone / small-cell lists; "satellite" takes on/off.
struct Sweep {
  std::string key;
  std::vector<std::string> values;
};

Sweep parse_sweep(const std::string& text);  // "drones=1..6", "sbs=1,2", "satellite=on,off"

// Returns a copy of the scenario document with one sweep point applied.
nlohmann::json apply_sweep_point(const nlohmann::json& doc, const std::string& key, const std::string& value);

struct ExperimentSpec {
  nlohmann::json scenario;
  std::vector<Method> methods;
  std::optional<Sweep> sweep;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  SolverConfig solver;  // method is overridden per cell
  double access_threshold = 40e6;
  double backhaul_threshold = 1.6e9;
  int jobs = 1;
};

void validate(const ExperimentSpec& spec);

struct CellResult {
  std::string method;
  std::string sweep_key, sweep_value;
  std::uint64_t seed = 0;
  bool converged = false;
  bool equilibrium = false;
  bool feasible = false;
  int iterations = 0;
  double total_payoff = 0;
  double mean_access = 0, mean_backhaul = 0;
  int access_above = 0, backhaul_above = 0;
  double delivered_access_bits = 0;
  std::string trace_file, report_file;
};

// One cell without touching the filesystem.
CellResult run_cell(const nlohmann::json& doc, Method method, std::uint64_t seed, const SolverConfig& solver,
                    double access_threshold, double backhaul_threshold, EquilibriumReport* rep_out = nullptr,
                    nlohmann::json* report_out = nullptr);

// Runs every (method, sweep point, seed) cell, writes per-cell trace and
// report files plus summary.csv. Throws std::runtime_error on I/O failure.
std::vector<CellResult> run_experiment(const ExperimentSpec& spec);

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells);

struct Cdf {
  std::vector<double> rate, cdf;
};

// Empirical CDF, one row per distinct value.
Cdf empirical_cdf(std::vector<double> values);
void write_cdf_csv(std::ostream& out, const Cdf& c);

}  // namespace isdn
