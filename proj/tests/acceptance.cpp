// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number, e.g. `isdn_acceptance 1 5`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isdn/equilibrium.hpp"
#include "isdn/experiment.hpp"
#include "support.hpp"

using namespace isdn;
using nlohmann::json;

#ifndef ISDN_SOURCE_DIR
#define ISDN_SOURCE_DIR "."
#endif
#ifndef ISDN_UNIT_TESTS
#define ISDN_UNIT_TESTS "./isdn_tests"
#endif

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json read_config(const std::string& name) {
  std::ifstream f(std::string(ISDN_SOURCE_DIR) + "/configs/" + name);
  return json::parse(f);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string num(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

// ---- 1: tiny instances against brute force ------------------------------

Outcome tiny_oracle() {
  const auto t0 = Clock::now();
  int instances = 0, matched = 0, above = 0, converged = 0, skipped = 0;
  for (std::uint64_t seed = 1; instances < 200; ++seed) {
    const Scenario s = test::tiny(seed);
    const RateTable r = build_rate_table(s);
    EquilibriumReport bf;
    try {
      bf = run_brute_force(s, r);
    } catch (const GuardError&) {
      ++skipped;
      continue;
    }
    // instances without any feasible allocation have nothing to match
    if (!bf.feasible) {
      ++skipped;
      continue;
    }
    ++instances;
    SolverConfig c;
    c.step0 = 3.0;
    const EquilibriumReport hb = run(s, r, c);
    converged += hb.converged;
    const double tol = 1e-6 * std::max(1.0, std::abs(bf.total_payoff));
    if (hb.feasible && std::abs(hb.total_payoff - bf.total_payoff) <= tol) ++matched;
    if (hb.feasible && hb.total_payoff > bf.total_payoff + tol) ++above;
  }
  const double t = secs(t0);
  const double rate = double(matched) / instances;
  Outcome o;
  o.pass = rate >= 0.95 && above == 0 && t < 300.0;
  o.detail = std::to_string(matched) + "/" + std::to_string(instances) + " match (" + num(100 * rate) +
             "%), above optimum " + std::to_string(above) + ", converged " + std::to_string(converged) +
             ", skipped infeasible " + std::to_string(skipped) + ", " + num(t) + " s";
  return o;
}

// ---- 2-4: desk scenario ---------------------------------------------------

struct DeskRun {
  bool cleared_eq = false;
  int iterations = 0;
  int access_above = 0, backhaul_above = 0;
};

std::map<std::string, std::vector<DeskRun>> desk_cache;

const std::vector<DeskRun>& desk_runs(Method m) {
  auto& out = desk_cache[method_name(m)];
  if (!out.empty()) return out;
  const json doc = read_config("desk.json");
  const SolverConfig base = load_solver_config(doc);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    EquilibriumReport rep;
    const CellResult c = run_cell(doc, m, seed, base, 40e6, 1.6e9, &rep);
    DeskRun d;
    d.cleared_eq = rep.converged && rep.equilibrium;
    d.iterations = rep.converged ? rep.iterations : base.max_iters;
    d.access_above = c.access_above;
    d.backhaul_above = c.backhaul_above;
    out.push_back(d);
  }
  return out;
}

Outcome desk_clearance() {
  const auto& hb = desk_runs(Method::HeavyBall);
  int ok = 0;
  std::vector<double> its;
  for (const auto& d : hb) {
    ok += d.cleared_eq;
    if (d.cleared_eq) its.push_back(d.iterations);
  }
  Outcome o;
  o.pass = ok >= 45;
  o.detail = std::to_string(ok) + "/50 seeds cleared to a verified equilibrium within 2000 iterations" +
             (its.empty() ? "" : ", median " + num(median(its)) + " iterations");
  return o;
}

Outcome momentum_advantage() {
  const auto& hb = desk_runs(Method::HeavyBall);
  const auto& sg = desk_runs(Method::Subgradient);
  int le = 0, both_stalled = 0;
  std::vector<double> reduction;
  for (std::size_t i = 0; i < hb.size(); ++i) {
    le += hb[i].iterations <= sg[i].iterations;
    both_stalled += !hb[i].cleared_eq && !sg[i].cleared_eq;
    reduction.push_back(1.0 - double(hb[i].iterations) / sg[i].iterations);
  }
  const double med = median(reduction);
  Outcome o;
  o.pass = le >= 30 && med >= 0.05;
  o.detail = "heavy-ball <= subgradient on " + std::to_string(le) + "/50, median reduction " + num(100 * med) +
             "% (non-clearing runs count as 2000 iterations; both stalled on " + std::to_string(both_stalled) + ")";
  return o;
}

Outcome baseline_dominance() {
  const auto& hb = desk_runs(Method::HeavyBall);
  double acc = 0, bh = 0;
  for (const auto& d : hb) {
    acc += d.access_above;
    bh += d.backhaul_above;
  }
  acc /= hb.size();
  bh /= hb.size();
  const json doc = read_config("desk.json");
  double racc = 0, rbh = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const CellResult c = run_cell(doc, Method::Random, seed, SolverConfig{}, 40e6, 1.6e9);
    racc += c.access_above;
    rbh += c.backhaul_above;
  }
  racc /= 100;
  rbh /= 100;
  Outcome o;
  o.pass = acc >= 1.5 * racc && bh >= 2.0 * rbh;
  o.detail = "access links >= 40 Mbps " + num(acc) + " vs random " + num(racc) + " (x" + num(acc / racc) +
             "), backhaul links >= 1.6 Gbps " + num(bh) + " vs random " + num(rbh) + " (x" + num(bh / rbh) + ")";
  return o;
}

// ---- 5: drift estimate ----------------------------------------------------

double drift_error(double tau) {
  json doc = read_config("desk.json");
  doc["time"] = {{"tau", tau}, {"slots", 101}};
  for (auto& d : doc["nodes"]["drones"]) d["hover_time"] = 101 * tau;
  const Scenario s = load_scenario(doc);
  const RateTable r = build_rate_table(s);
  double worst = 0.0;
  for (int n = 0; n < s.N(); ++n)
    for (int t = 1; t <= 100; ++t) {
      const double est = r.s(n, t - 1) + satellite_rate_drift(n, t, r, s);
      worst = std::max(worst, std::abs(est - r.s(n, t)) / r.s(n, t));
    }
  return worst;
}

Outcome drift_fidelity() {
  const double e10 = drift_error(0.01), e1 = drift_error(0.001), e01 = drift_error(0.0001);
  Outcome o;
  o.pass = e10 < 0.01 && e1 < e10 && e01 < e1;
  o.detail = "max relative error " + num(e10) + " (10 ms), " + num(e1) + " (1 ms), " + num(e01) + " (0.1 ms)";
  return o;
}

// ---- 6: drone sweep ---------------------------------------------------------

Outcome drone_trend() {
  const json doc = read_config("drone_sweep.json");
  const SolverConfig base = load_solver_config(doc);
  constexpr int kSeeds = 8;
  std::vector<double> acc(6), bh(6), bits(6);
  for (int k = 1; k <= 6; ++k) {
    const json d = apply_sweep_point(doc, "drones", std::to_string(k));
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const CellResult c = run_cell(d, Method::HeavyBall, seed, base, 40e6, 1.6e9);
      acc[k - 1] += c.mean_access / kSeeds;
      bh[k - 1] += c.mean_backhaul / kSeeds;
      bits[k - 1] += c.delivered_access_bits / kSeeds;
    }
  }
  bool acc_ok = true, bh_ok = true, bits_ok = true;
  for (int k = 1; k < 6; ++k) {
    acc_ok &= acc[k] <= acc[k - 1];
    bh_ok &= bh[k] <= bh[k - 1];
    bits_ok &= bits[k] >= bits[k - 1];
  }
  const double acc_drop = 1.0 - acc[5] / acc[0], bh_drop = 1.0 - bh[5] / bh[0];
  std::string series;
  for (int k = 0; k < 6; ++k)
    series += " [" + std::to_string(k + 1) + ": acc " + num(acc[k] / 1e6) + " Mbps, bh " + num(bh[k] / 1e9) +
              " Gbps, data " + num(bits[k] / 1e6) + " Mb]";
  Outcome o;
  o.pass = acc_ok && bh_ok && bh_drop >= acc_drop && bits_ok;
  o.detail = std::string("access non-increasing ") + (acc_ok ? "yes" : "no") + ", backhaul non-increasing " +
             (bh_ok ? "yes" : "no") + ", relative drop backhaul " + num(100 * bh_drop) + "% vs access " +
             num(100 * acc_drop) + "%, delivered data non-decreasing " + (bits_ok ? "yes" : "no") + ";" + series;
  return o;
}

// ---- 7: property suites -------------------------------------------------------

Outcome property_suites() {
  const auto t0 = Clock::now();
  const std::string filter =
      "cleared allocations: prices cancel out of the total payoff,dual value bounds the optimum from above,"
      "momentum coefficient zero gives the plain subgradient step,dB conversions round-trip,"
      "constraint checker is pure";
  const std::string cmd = std::string(ISDN_UNIT_TESTS) + " --test-case=\"" + filter + "\" --minimal > /dev/null";
  const int rc = std::system(cmd.c_str());
  const auto t = secs(t0);
  Outcome o;
  o.pass = rc == 0 && t < 600.0;
  o.detail = std::string("five property suites of 1000 cases each ") + (rc == 0 ? "passed" : "FAILED") + " in " +
             num(t) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, tiny_oracle},      {2, desk_clearance},  {3, momentum_advantage}, {4, baseline_dominance},
      {5, drift_fidelity},   {6, drone_trend},     {7, property_suites}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.detail = std::string("error: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
