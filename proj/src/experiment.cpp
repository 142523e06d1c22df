#include "isdn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "isdn/format.hpp"

namespace isdn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int parse_int(const std::string& v, const std::string& what) {
  std::size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(what + ": expected an integer, got '" + v + "'");
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

void keep_first(json& arr, int k, const std::string& what) {
  if (!arr.is_array()) throw ConfigError(what + ": not a list");
  if (k < 0 || k > static_cast<int>(arr.size()))
    throw ConfigError(what + ": sweep value " + std::to_string(k) + " outside 0.." + std::to_string(arr.size()));
  arr.erase(arr.begin() + k, arr.end());
}

std::string cell_stem(const std::string& method, const std::string& key, const std::string& value,
                      std::uint64_t seed) {
  std::string s = method;
  if (!key.empty()) s += "_" + key + "-" + value;
  return s + "_seed" + std::to_string(seed);
}

}  // namespace

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw ConfigError("sweep '" + text + "': expected key=values");
  Sweep sw;
  sw.key = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  if (sw.key != "drones" && sw.key != "sbs" && sw.key != "satellite")
    throw ConfigError("sweep key '" + sw.key + "': expected drones, sbs or satellite");
  if (sw.key == "satellite") {
    for (const auto& v : split(rest, ',')) {
      if (v != "on" && v != "off") throw ConfigError("sweep satellite: expected on/off, got '" + v + "'");
      sw.values.push_back(v);
    }
    return sw;
  }
  const auto dots = rest.find("..");
  if (dots != std::string::npos) {
    const int lo = parse_int(rest.substr(0, dots), "sweep " + sw.key);
    const int hi = parse_int(rest.substr(dots + 2), "sweep " + sw.key);
    if (lo > hi) throw ConfigError("sweep " + sw.key + ": empty range");
    for (int k = lo; k <= hi; ++k) sw.values.push_back(std::to_string(k));
  } else {
    for (const auto& v : split(rest, ',')) sw.values.push_back(std::to_string(parse_int(v, "sweep " + sw.key)));
  }
  return sw;
}

json apply_sweep_point(const json& doc, const std::string& key, const std::string& value) {
  json d = doc;
  if (key == "drones") {
    json& nodes = d["nodes"];
    if (!nodes.contains("drones")) nodes["drones"] = json::array();
    keep_first(nodes["drones"], parse_int(value, "sweep drones"), "nodes.drones");
  } else if (key == "sbs") {
    json& nodes = d["nodes"];
    if (!nodes.contains("small_cells")) nodes["small_cells"] = json::array();
    keep_first(nodes["small_cells"], parse_int(value, "sweep sbs"), "nodes.small_cells");
  } else if (key == "satellite") {
    d["nodes"]["satellite"]["enabled"] = value == "on";
  } else {
    throw ConfigError("unknown sweep key '" + key + "'");
  }
  return d;
}

void validate(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw ConfigError("at least one method is required");
  if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
  if (spec.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!(spec.access_threshold >= 0) || !(spec.backhaul_threshold >= 0))
    throw ConfigError("thresholds must be non-negative");
  validate(spec.solver);
  // every sweep point must yield a valid scenario
  if (spec.sweep) {
    if (spec.sweep->values.empty()) throw ConfigError("sweep has no values");
    for (const auto& v : spec.sweep->values)
      load_scenario(apply_sweep_point(spec.scenario, spec.sweep->key, v), spec.seeds.front());
  } else {
    load_scenario(spec.scenario, spec.seeds.front());
  }
}

CellResult run_cell(const json& doc, Method method, std::uint64_t seed, const SolverConfig& solver,
                    double access_threshold, double backhaul_threshold, EquilibriumReport* rep_out,
                    json* report_out) {
  const Scenario s = load_scenario(doc, seed);
  const RateTable r = build_rate_table(s);
  SolverConfig c = solver;
  c.method = method;
  c.seed = seed;
  EquilibriumReport rep = run(s, r, c);
  const RateMetrics m = rate_metrics(rep.alloc, r, s, access_threshold, backhaul_threshold);

  CellResult cr;
  cr.method = method_name(method);
  cr.seed = seed;
  cr.converged = rep.converged;
  cr.equilibrium = rep.equilibrium;
  cr.feasible = rep.feasible;
  cr.iterations = rep.iterations;
  cr.total_payoff = rep.total_payoff;
  cr.mean_access = m.mean_access;
  cr.mean_backhaul = m.mean_backhaul;
  cr.access_above = m.access_above;
  cr.backhaul_above = m.backhaul_above;
  cr.delivered_access_bits = m.delivered_access_bits;
  if (report_out) *report_out = report_json(rep, r, s, access_threshold, backhaul_threshold);
  if (rep_out) *rep_out = std::move(rep);
  return cr;
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec || !fs::is_directory(spec.output_dir))
    throw std::runtime_error("cannot create output directory '" + spec.output_dir + "'");

  struct Job {
    Method method;
    std::string value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  const std::vector<std::string> points = spec.sweep ? spec.sweep->values : std::vector<std::string>{""};
  for (Method m : spec.methods)
    for (const auto& v : points)
      for (auto sd : spec.seeds) jobs.push_back({m, v, sd});

  const std::string key = spec.sweep ? spec.sweep->key : "";
  std::vector<CellResult> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      try {
        const json doc = key.empty() ? spec.scenario : apply_sweep_point(spec.scenario, key, j.value);
        EquilibriumReport rep;
        json report;
        CellResult cr = run_cell(doc, j.method, j.seed, spec.solver, spec.access_threshold,
                                 spec.backhaul_threshold, &rep, &report);
        cr.sweep_key = key;
        cr.sweep_value = j.value;
        const std::string stem = cell_stem(cr.method, key, j.value, j.seed);
        cr.trace_file = stem + "_trace.csv";
        cr.report_file = stem + "_report.json";
        std::ofstream tf(fs::path(spec.output_dir) / cr.trace_file);
        write_trace_csv(tf, rep);
        std::ofstream rf(fs::path(spec.output_dir) / cr.report_file);
        rf << report.dump(2) << "\n";
        if (!tf || !rf) throw std::runtime_error("write failed for " + stem);
        results[i] = std::move(cr);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::min<int>(spec.jobs, static_cast<int>(jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (!errors[i].empty()) throw std::runtime_error("cell " + std::to_string(i) + ": " + errors[i]);

  std::ofstream sf(fs::path(spec.output_dir) / "summary.csv");
  write_summary_csv(sf, results);
  if (!sf) throw std::runtime_error("cannot write summary.csv");
  return results;
}

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "method,sweep,sweep_value,seed,converged,equilibrium,feasible,iterations,total_payoff,"
         "mean_access_rate_bps,mean_backhaul_rate_bps,access_links_above,backhaul_links_above,"
         "delivered_access_bits\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.sweep_key << ',' << c.sweep_value << ',' << c.seed << ',' << c.converged << ','
        << c.equilibrium << ',' << c.feasible << ',' << c.iterations << ',' << fmt12(c.total_payoff) << ','
        << fmt12(c.mean_access) << ',' << fmt12(c.mean_backhaul) << ',' << c.access_above << ','
        << c.backhaul_above << ',' << fmt12(c.delivered_access_bits) << '\n';
  }
}

Cdf empirical_cdf(std::vector<double> values) {
  Cdf c;
  if (values.empty()) return c;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    c.rate.push_back(values[i]);
    c.cdf.push_back(static_cast<double>(i + 1) / n);
  }
  return c;
}

void write_cdf_csv(std::ostream& out, const Cdf& c) {
  out << "rate_bps,cdf\n";
  for (std::size_t i = 0; i < c.rate.size(); ++i) out << fmt12(c.rate[i]) << ',' << fmt12(c.cdf[i]) << '\n';
}

}  // namespace isdn
