#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "isdn/channel.hpp"
#include "isdn/scenario.hpp"

namespace isdn {

struct Dims {
  int N = 0, U = 0, M = 0, T = 0;
  static Dims of(const Scenario& s) { return {s.N(), s.U(), s.M(), s.T()}; }
  bool operator==(const Dims&) const = default;
};

// rho/theta [(n*U+u)*T+t], delta/phi [(n*M+m)*T+t], beta/eps [n*T+t].
struct AllocationState {
  Dims dims;
  std::vector<std::uint8_t> rho, theta, delta, phi, beta, eps;

  static AllocationState zeros(Dims d);
  std::size_t iu(int n, int u, int t) const { return (static_cast<std::size_t>(n) * dims.U + u) * dims.T + t; }
  std::size_t im(int n, int m, int t) const { return (static_cast<std::size_t>(n) * dims.M + m) * dims.T + t; }
  std::size_t is(int n, int t) const { return static_cast<std::size_t>(n) * dims.T + t; }
  bool cleared() const { return rho == theta && delta == phi && beta == eps; }
  bool operator==(const AllocationState&) const = default;
};

struct PriceState {
  Dims dims;
  std::vector<double> lambda, varsigma, xi;
  std::vector<double> mu1, mu2, mu3;
  int k = 1;

  static PriceState zeros(Dims d);
  bool operator==(const PriceState&) const = default;
};

struct PayoffBreakdown {
  std::vector<double> user, bs_buyer, bs_seller, mbs;
  double satellite = 0.0;
  double total = 0.0;
};

double user_payoff(int u, const AllocationState& a, const PriceState& p, const RateTable& r, const Scenario& s);
double bs_buyer_payoff(int n, const AllocationState& a, const PriceState& p, const RateTable& r, const Scenario& s);

enum class SellerKind { BS, MBS, Satellite };
// index is ignored for the satellite
double seller_payoff(SellerKind kind, int index, const AllocationState& a, const PriceState& p);

PayoffBreakdown payoff_breakdown(const AllocationState& a, const PriceState& p, const RateTable& r,
                                 const Scenario& s);

// Price-free objective; throws std::logic_error unless cleared.
double total_payoff(const AllocationState& a, const RateTable& r, const Scenario& s);

struct ConstraintFamily {
  char id = 'a';
  bool ok = true;
  std::string first_violation;
};

struct ConstraintReport {
  std::array<ConstraintFamily, 19> families;  // 'a'..'s'
  bool all_ok() const;
  bool ok(char id) const { return families[id - 'a'].ok; }
  const ConstraintFamily& at(char id) const { return families[id - 'a']; }
  nlohmann::json to_json() const;
};

ConstraintReport check_constraints(const AllocationState& a, const RateTable& r, const Scenario& s);

struct EquilibriumCheck {
  bool ok = false;
  std::string reason;
};

EquilibriumCheck check_walrasian(const AllocationState& a, const PriceState& p, const RateTable& r,
                                 const Scenario& s, double tol = 1e-9,
                                 SatelliteRateMode mode = SatelliteRateMode::Exact, double exact_below = 0.0);
bool is_walrasian_equilibrium(const AllocationState& a, const PriceState& p, const RateTable& r,
                              const Scenario& s, double tol = 1e-9,
                              SatelliteRateMode mode = SatelliteRateMode::Exact, double exact_below = 0.0);

nlohmann::json to_json(const AllocationState& a);
AllocationState allocation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PriceState& p);
nlohmann::json to_json(const PayoffBreakdown& p);

}  // namespace isdn
