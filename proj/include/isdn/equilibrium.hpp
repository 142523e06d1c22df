#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isdn/channel.hpp"
#include "isdn/local_solvers.hpp"
#include "isdn/market.hpp"
#include "isdn/scenario.hpp"

namespace isdn {

enum class Method { HeavyBall, Subgradient, Random, BruteForce };
enum class StepSchedule { InvSqrt, Inv };

Method parse_method(const std::string& name);
std::string method_name(Method m);
SatelliteRateMode parse_satellite_rate_mode(const std::string& name);

struct SolverConfig {
  Method method = Method::HeavyBall;
  double step0 = 0.1;
  StepSchedule schedule = StepSchedule::InvSqrt;
  double momentum = 1.5;
  int max_iters = 2000;
  int patience = 3;
  SatelliteRateMode sat_mode = SatelliteRateMode::Exact;
  int threads = 1;
  // agents whose decision space is at most this many points are solved by
  // enumeration instead of the greedy heuristics
  double exact_below = 4096.0;
  std::uint64_t seed = 1;  // random baseline only
};

// Reads the optional "solver" section; throws ConfigError on bad values.
SolverConfig load_solver_config(const nlohmann::json& doc);
void validate(const SolverConfig& c);

struct ViolationVectors {
  std::vector<std::int8_t> s1, s2, s3;  // theta-rho, phi-delta, eps-beta

  static ViolationVectors of(const AllocationState& a);
  double norm1() const;
  double norm2() const;
  double norm3() const;
  bool zero() const;
};

double step_size(const SolverConfig& c, int k);

// One price update; the iteration counter advances even when a component is
// left alone because its violation is zero.
PriceState heavy_ball_step(const PriceState& p, const ViolationVectors& v, const SolverConfig& c);

struct IterationRecord {
  int k = 0;
  double norm_s1 = 0, norm_s2 = 0, norm_s3 = 0;
  double dual_value = 0;
  double step = 0;
  bool cleared = false;
  double best_payoff = std::numeric_limits<double>::quiet_NaN();
  int infeasible_agents = 0;
};

struct RateMetrics {
  std::vector<double> access_rates;    // one per allocated access link-slot
  std::vector<double> backhaul_rates;  // MBS and satellite link-slots
  double mean_access = 0, mean_backhaul = 0;
  int access_above = 0, backhaul_above = 0;
  double delivered_access_bits = 0;
};

RateMetrics rate_metrics(const AllocationState& a, const RateTable& r, const Scenario& s,
                         double access_threshold = 40e6, double backhaul_threshold = 1.6e9);

struct EquilibriumReport {
  Method method = Method::HeavyBall;
  bool converged = false;
  bool equilibrium = false;
  std::string equilibrium_reason;
  int iterations = 0;
  long long messages = 0;
  double wall_time = 0;

  AllocationState alloc;
  PriceState prices;
  bool feasible = false;  // alloc passes every constraint family
  double total_payoff = std::numeric_limits<double>::quiet_NaN();
  double dual_value = std::numeric_limits<double>::quiet_NaN();
  int infeasible_agents = 0;
  ConstraintReport constraints;
  std::vector<IterationRecord> trace;
};

// Keeps only matched buy/sell entries, then drops sells that break causality.
AllocationState repair(const AllocationState& a, const RateTable& r, const Scenario& s);

EquilibriumReport run(const Scenario& s, const SolverConfig& c);
EquilibriumReport run(const Scenario& s, const RateTable& r, const SolverConfig& c);

EquilibriumReport run_random_baseline(const Scenario& s, std::uint64_t seed);
EquilibriumReport run_random_baseline(const Scenario& s, const RateTable& r, std::uint64_t seed);

constexpr double kBruteForceGuard = 16777216.0;  // 2^24

double brute_force_space(const Scenario& s);
EquilibriumReport run_brute_force(const Scenario& s);
EquilibriumReport run_brute_force(const Scenario& s, const RateTable& r);

// D_final - J_best; NaN when no feasible allocation is known.
double duality_gap(const EquilibriumReport& rep);

void write_trace_csv(std::ostream& out, const EquilibriumReport& rep);
nlohmann::json report_json(const EquilibriumReport& rep, const RateTable& r, const Scenario& s,
                           double access_threshold = 40e6, double backhaul_threshold = 1.6e9);

}  // namespace isdn
