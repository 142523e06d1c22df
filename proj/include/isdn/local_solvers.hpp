#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "isdn/channel.hpp"
#include "isdn/market.hpp"
#include "isdn/scenario.hpp"

namespace isdn {

// Schedule layouts:
//   user u     theta_u          [n*T+t]
//   BS n       rho_n | phi_n | eps_n   [u*T+t] | U*T + [m*T+t] | U*T + M*T + [t]
//   MBS m      delta_m          [n*T+t]
//   satellite  beta             [n*T+t]
struct AgentSolution {
  std::vector<std::uint8_t> schedule;
  double objective = 0.0;
  bool feasible = true;
};

enum class AgentKind { User, BS, MBS, Satellite };

struct AgentRef {
  AgentKind kind;
  int index = 0;
};

class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AgentSolution solve_user(int u, const PriceState& p, const RateTable& r, const Scenario& s);
AgentSolution solve_bs(int n, const PriceState& p, const RateTable& r, const Scenario& s,
                       SatelliteRateMode mode = SatelliteRateMode::Exact);
AgentSolution solve_mbs(int m, const PriceState& p, const Scenario& s);
AgentSolution solve_satellite(const PriceState& p, const Scenario& s);

constexpr double kAgentGuard = 1048576.0;  // 2^20 decision points

// Exhaustive maximization over the agent's local constraint set.
AgentSolution enumerate_agent(AgentRef agent, const PriceState& p, const RateTable& r, const Scenario& s,
                              SatelliteRateMode mode = SatelliteRateMode::Exact);

double agent_lagrangian(AgentRef agent, const std::vector<std::uint8_t>& schedule, const PriceState& p,
                        const RateTable& r, const Scenario& s, SatelliteRateMode mode = SatelliteRateMode::Exact);
bool agent_feasible(AgentRef agent, const std::vector<std::uint8_t>& schedule, const RateTable& r,
                    const Scenario& s, SatelliteRateMode mode = SatelliteRateMode::Exact);

// Number of per-slot option combinations the agent ranges over.
double agent_space(AgentRef agent, const Scenario& s);

// Heuristic solver, or enumerate_agent when agent_space <= exact_below.
AgentSolution solve_agent(AgentRef agent, const PriceState& p, const RateTable& r, const Scenario& s,
                          SatelliteRateMode mode = SatelliteRateMode::Exact, double exact_below = 0.0);

// users, BSs, MBSs, satellite
std::vector<AgentRef> all_agents(const Scenario& s);

std::vector<std::uint8_t> agent_slice(AgentRef agent, const AllocationState& a);
void write_slice(AgentRef agent, const std::vector<std::uint8_t>& schedule, AllocationState& a);

struct MarketResponse {
  AllocationState alloc;
  double dual_value = 0.0;
  int infeasible_agents = 0;
};

// All agents at one price vector. threads <= 1 runs sequentially; results
// are identical either way.
MarketResponse solve_all(const PriceState& p, const RateTable& r, const Scenario& s,
                         SatelliteRateMode mode = SatelliteRateMode::Exact, int threads = 1,
                         double exact_below = 0.0);

}  // namespace isdn
