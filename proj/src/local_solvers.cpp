#include "isdn/local_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace isdn {

namespace {

constexpr int kIdle = -1;

// ---- user -------------------------------------------------------------

struct UserModel {
  int u, N, T;
  const RateTable& r;
  const Scenario& s;
  const PriceState& p;
  double scale;

  UserModel(int u_, const PriceState& p_, const RateTable& r_, const Scenario& s_)
      : u(u_), N(s_.N()), T(s_.T()), r(r_), s(s_), p(p_), scale(1.0 / (s_.T() * s_.demand.user_rate_floor[u_])) {}

  double value(int t, int n) const {
    if (n == kIdle) return 0.0;
    return r.a(n, u) * scale - p.lambda[(static_cast<std::size_t>(n) * s.U() + u) * T + t];
  }
  double rate(int n) const { return n == kIdle ? 0.0 : r.a(n, u); }

  // same summation order as check_constraints
  bool meets(const std::vector<int>& choice) const {
    double bits = 0.0, sum = 0.0;
    for (int n = 0; n < N; ++n)
      for (int t = 0; t < T; ++t)
        if (choice[t] == n) {
          bits += r.a(n, u) * s.time.tau;
          sum += r.a(n, u);
        }
    return !(bits < s.demand.data_demand[u]) && !(sum / T < s.demand.user_rate_floor[u]);
  }

  std::vector<std::uint8_t> schedule(const std::vector<int>& choice) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(N) * T, 0);
    for (int t = 0; t < T; ++t)
      if (choice[t] != kIdle) out[choice[t] * T + t] = 1;
    return out;
  }
};

std::vector<int> user_choice(const std::vector<std::uint8_t>& x, int N, int T, bool* valid) {
  std::vector<int> c(T, kIdle);
  *valid = true;
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t)
      if (x[n * T + t]) {
        if (c[t] != kIdle) *valid = false;
        c[t] = n;
      }
  return c;
}

// ---- BS ---------------------------------------------------------------

// action codes: kIdle, 0..U-1 sell to u, U..U+M-1 buy from m, U+M buy satellite
struct BsModel {
  int n, U, M, T, Tn;
  bool sat;
  const RateTable& r;
  const Scenario& s;
  const PriceState& p;
  double scale;
  std::vector<double> sat_rate;

  BsModel(int n_, const PriceState& p_, const RateTable& r_, const Scenario& s_, SatelliteRateMode mode)
      : n(n_), U(s_.U()), M(s_.M()), T(s_.T()), Tn(s_.Tn(n_)), sat(s_.nodes.satellite_enabled), r(r_), s(s_),
        p(p_), scale(1.0 / (s_.T() * s_.demand.bs_rate_floor[n_])) {
    sat_rate.resize(T);
    for (int t = 0; t < T; ++t) sat_rate[t] = perceived_satellite_rate(n, t, r, s, mode);
  }

  int actions() const { return U + M + (sat ? 1 : 0); }
  bool is_sell(int a) const { return a >= 0 && a < U; }
  bool is_buy(int a) const { return a >= U; }

  double value(int t, int a) const {
    if (a == kIdle) return 0.0;
    if (a < U) return p.lambda[(static_cast<std::size_t>(n) * U + a) * T + t] - 1.0 / T;
    if (a < U + M) return r.b(n, a - U) * scale - p.varsigma[(static_cast<std::size_t>(n) * M + (a - U)) * T + t];
    return sat_rate[t] * scale - p.xi[static_cast<std::size_t>(n) * T + t];
  }
  double in_rate(int t, int a) const {
    if (a < U) return 0.0;
    if (a < U + M) return r.b(n, a - U);
    return sat_rate[t];
  }
  double out_rate(int a) const { return is_sell(a) ? r.a(n, a) : 0.0; }

  // first slot whose prefix breaks causality, or -1
  int first_causality_violation(const std::vector<int>& c) const {
    const double tau = s.time.tau;
    double balance = 0.0, mag = 0.0;
    for (int t = 0; t < T; ++t) {
      const double out = out_rate(c[t]) * tau;
      const double in = (c[t] == kIdle ? 0.0 : in_rate(t, c[t])) * tau;
      balance += out - in;
      mag += out + in;
      if (balance > 1e-12 * mag) return t;
    }
    return -1;
  }
  double backhaul_sum(const std::vector<int>& c) const {
    double sum = 0.0;
    for (int t = 0; t < T; ++t)
      if (c[t] != kIdle && is_buy(c[t])) sum += in_rate(t, c[t]);
    return sum;
  }
  bool qos_ok(const std::vector<int>& c) const { return !(backhaul_sum(c) / T < s.demand.bs_rate_floor[n]); }
  bool feasible(const std::vector<int>& c) const {
    for (int t = Tn; t < T; ++t)
      if (c[t] != kIdle) return false;
    return first_causality_violation(c) < 0 && qos_ok(c);
  }
  double prefix(const std::vector<int>& c, int upto) const {
    double b = 0.0;
    for (int t = 0; t <= upto; ++t) b += out_rate(c[t]) - (c[t] == kIdle ? 0.0 : in_rate(t, c[t]));
    return b;
  }

  std::vector<std::uint8_t> schedule(const std::vector<int>& c) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(U + M + 1) * T, 0);
    for (int t = 0; t < T; ++t) {
      const int a = c[t];
      if (a == kIdle) continue;
      if (a < U)
        out[a * T + t] = 1;
      else if (a < U + M)
        out[U * T + (a - U) * T + t] = 1;
      else
        out[(U + M) * T + t] = 1;
    }
    return out;
  }
};

std::vector<int> bs_choice(const std::vector<std::uint8_t>& x, int U, int M, int T, bool* valid) {
  std::vector<int> c(T, kIdle);
  *valid = true;
  auto put = [&](int t, int a) {
    if (c[t] != kIdle) *valid = false;
    c[t] = a;
  };
  for (int u = 0; u < U; ++u)
    for (int t = 0; t < T; ++t)
      if (x[u * T + t]) put(t, u);
  for (int m = 0; m < M; ++m)
    for (int t = 0; t < T; ++t)
      if (x[U * T + m * T + t]) put(t, U + m);
  for (int t = 0; t < T; ++t)
    if (x[(U + M) * T + t]) put(t, U + M);
  return c;
}

double user_value_sum(const UserModel& um, const std::vector<int>& c) {
  double v = 0.0;
  for (int n = 0; n < um.N; ++n)
    for (int t = 0; t < um.T; ++t)
      if (c[t] == n) v += um.value(t, n);
  return v;
}

double bs_value_sum(const BsModel& bm, const std::vector<int>& c) {
  // rho block, phi block, eps block, matching the schedule layout
  double v = 0.0;
  for (int u = 0; u < bm.U; ++u)
    for (int t = 0; t < bm.T; ++t)
      if (c[t] == u) v += bm.value(t, u);
  for (int m = 0; m < bm.M; ++m)
    for (int t = 0; t < bm.T; ++t)
      if (c[t] == bm.U + m) v += bm.value(t, bm.U + m);
  for (int t = 0; t < bm.T; ++t)
    if (c[t] == bm.U + bm.M) v += bm.value(t, bm.U + bm.M);
  return v;
}

double per_slot_seller_value(const std::vector<double>& price, int T, int t, int n) {
  return price[static_cast<std::size_t>(n) * T + t] - 1.0 / T;
}

// ξ / ς slices laid out [n*T+t] for one seller
std::vector<double> mbs_prices(const PriceState& p, int m, int N, int M, int T) {
  std::vector<double> out(static_cast<std::size_t>(N) * T);
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t) out[n * T + t] = p.varsigma[(static_cast<std::size_t>(n) * M + m) * T + t];
  return out;
}

AgentSolution solve_seller(const std::vector<double>& price, int N, int T) {
  AgentSolution sol;
  sol.schedule.assign(static_cast<std::size_t>(N) * T, 0);
  for (int t = 0; t < T; ++t) {
    int best = kIdle;
    double bv = 0.0;
    for (int n = 0; n < N; ++n) {
      const double v = per_slot_seller_value(price, T, t, n);
      if (v > bv) {
        bv = v;
        best = n;
      }
    }
    if (best != kIdle) sol.schedule[best * T + t] = 1;
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < sol.schedule.size(); ++i)
    if (sol.schedule[i]) obj += price[i] - 1.0 / T;
  sol.objective = obj;
  return sol;
}

double seller_lagrangian(const std::vector<double>& price, const std::vector<std::uint8_t>& x, int T) {
  double obj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) obj += price[i] - 1.0 / T;
  return obj;
}

bool seller_feasible(const std::vector<std::uint8_t>& x, int N, int T, int budget) {
  int total = 0;
  for (int t = 0; t < T; ++t) {
    int c = 0;
    for (int n = 0; n < N; ++n) {
      if (x[n * T + t] > 1) return false;
      c += x[n * T + t];
    }
    if (c > 1) return false;
    total += c;
  }
  return total <= budget;
}

std::vector<int> slot_options(AgentRef agent, const Scenario& s) {
  const int N = s.N(), U = s.U(), M = s.M(), T = s.T();
  std::vector<int> opts(T, 1);
  for (int t = 0; t < T; ++t) switch (agent.kind) {
      case AgentKind::User:
      case AgentKind::MBS: opts[t] = N + 1; break;
      case AgentKind::BS:
        if (t < s.Tn(agent.index)) opts[t] = 1 + U + M + (s.nodes.satellite_enabled ? 1 : 0);
        break;
      case AgentKind::Satellite:
        if (s.nodes.satellite_enabled) opts[t] = N + 1;
        break;
    }
  return opts;
}

// Cheapest set of single-slot upgrades (at most one per slot) whose rate
// gains reach `deficit`. Depth-first with a ratio bound; gives up after
// `cap` nodes and keeps the best cover found so far.
struct Upgrade {
  int option;
  double gain, loss;
};

bool cheapest_cover(std::vector<int>& c, const std::vector<std::vector<Upgrade>>& by_slot, double deficit,
                    long cap = 4000) {
  struct Slot {
    int t;
    double min_ratio, max_gain;
  };
  std::vector<Slot> slots;
  for (int t = 0; t < static_cast<int>(by_slot.size()); ++t) {
    if (by_slot[t].empty()) continue;
    Slot sl{t, std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& o : by_slot[t]) {
      sl.min_ratio = std::min(sl.min_ratio, o.loss / o.gain);
      sl.max_gain = std::max(sl.max_gain, o.gain);
    }
    slots.push_back(sl);
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.min_ratio < b.min_ratio; });
  const std::size_t k = slots.size();
  std::vector<double> suffix_ratio(k + 1, std::numeric_limits<double>::infinity()), suffix_gain(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    suffix_ratio[i] = std::min(suffix_ratio[i + 1], slots[i].min_ratio);
    suffix_gain[i] = suffix_gain[i + 1] + slots[i].max_gain;
  }
  if (suffix_gain[0] < deficit) return false;

  std::vector<int> pick(k, -1), best_pick;
  double best = std::numeric_limits<double>::infinity();
  long nodes = 0;
  auto dfs = [&](auto&& self, std::size_t i, double gain, double loss) -> void {
    if (++nodes > cap) return;
    if (gain >= deficit) {
      if (loss < best) {
        best = loss;
        best_pick = pick;
      }
      return;
    }
    if (i == k || gain + suffix_gain[i] < deficit) return;
    if (loss + std::max(0.0, suffix_ratio[i]) * (deficit - gain) >= best) return;
    const auto& opts = by_slot[slots[i].t];
    for (std::size_t j = 0; j < opts.size(); ++j) {
      pick[i] = static_cast<int>(j);
      self(self, i + 1, gain + opts[j].gain, loss + opts[j].loss);
    }
    pick[i] = -1;
    self(self, i + 1, gain, loss);
  };
  dfs(dfs, 0, 0.0, 0.0);
  if (best_pick.empty()) return false;
  for (std::size_t i = 0; i < k; ++i)
    if (best_pick[i] >= 0) c[slots[i].t] = by_slot[slots[i].t][best_pick[i]].option;
  return true;
}

// Forward DP over slots for one BS. A state carries the causality balance
// and the backhaul rate sum; states dominated in (value, usable credit,
// capped rate sum) are dropped and at most `beam` survive per slot.
bool bs_dynamic_program(const BsModel& bm, std::vector<int>& out, std::size_t beam = 256) {
  const int T = bm.T, Tn = bm.Tn, A = bm.actions(), U = bm.U;
  const double tau = bm.s.time.tau;
  const double floor = bm.s.demand.bs_rate_floor[bm.n];
  const double need = floor * T;
  double max_out = 0.0;
  for (int u = 0; u < U; ++u) max_out = std::max(max_out, bm.r.a(bm.n, u) * tau);

  struct State {
    double balance, mag, rate, value;
    int parent, action;
  };
  struct Option {
    int a;
    double v, o, in, rate;
  };
  std::vector<std::vector<State>> layers(Tn + 1);
  layers[0].push_back({0.0, 0.0, 0.0, 0.0, -1, kIdle});
  std::vector<Option> opts;
  std::vector<State> cand;
  std::vector<std::size_t> order;
  std::map<double, double> stair;  // credit -> capped rate, a 2-D Pareto front

  for (int t = 0; t < Tn; ++t) {
    opts.assign(1, {kIdle, 0.0, 0.0, 0.0, 0.0});
    for (int a = 0; a < A; ++a) {
      const double v = bm.value(t, a);
      if (bm.is_sell(a)) {
        if (!(v > 0.0) || !(bm.out_rate(a) > 0.0)) continue;
        opts.push_back({a, v, bm.out_rate(a) * tau, 0.0, 0.0});
      } else {
        const double c = bm.in_rate(t, a);
        if (!(c > 0.0)) continue;
        opts.push_back({a, v, 0.0, c * tau, c});
      }
    }
    // drop options dominated within their own kind
    std::vector<Option> kept;
    for (const auto& o : opts) {
      bool dominated = false;
      for (const auto& q : opts) {
        if (&q == &o || bm.is_sell(q.a) != bm.is_sell(o.a) || (q.a == kIdle) != (o.a == kIdle)) continue;
        const bool better = q.v >= o.v && q.o <= o.o && q.in >= o.in;
        const bool strictly = q.v > o.v || q.o < o.o || q.in > o.in;
        if (better && (strictly || q.a < o.a)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) kept.push_back(o);
    }

    cand.clear();
    const auto& prev = layers[t];
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (const auto& o : kept) {
        const State& st = prev[i];
        State ns;
        ns.balance = st.balance + (o.o - o.in);
        ns.mag = st.mag + (o.o + o.in);
        if (ns.balance > 1e-12 * ns.mag) continue;
        ns.rate = o.a != kIdle && bm.is_buy(o.a) ? st.rate + o.rate : st.rate;
        ns.value = st.value + o.v;
        ns.parent = static_cast<int>(i);
        ns.action = o.a;
        cand.push_back(ns);
      }
    order.resize(cand.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return cand[x].value > cand[y].value; });
    const double usable = (Tn - 1 - t) * max_out;
    stair.clear();
    auto& next = layers[t + 1];
    for (std::size_t idx : order) {
      const State& st = cand[idx];
      const double credit = std::min(-st.balance, usable);
      const double q = std::min(st.rate, need);
      auto it = stair.lower_bound(credit);
      if (it != stair.end() && it->second >= q) continue;
      next.push_back(st);
      if (next.size() >= beam) break;
      // remove front points now covered by (credit, q)
      auto lo = stair.upper_bound(credit);
      while (lo != stair.begin()) {
        auto prv = std::prev(lo);
        if (prv->second <= q)
          lo = stair.erase(prv);
        else
          break;
      }
      stair[credit] = std::max(q, stair.count(credit) ? stair[credit] : q);
    }
  }

  const auto& last = layers[Tn];
  int best = -1;
  for (std::size_t i = 0; i < last.size(); ++i)
    if (!(last[i].rate / T < floor) && (best < 0 || last[i].value > last[best].value)) best = static_cast<int>(i);
  if (best < 0) return false;
  out.assign(T, kIdle);
  for (int t = Tn, i = best; t > 0; --t) {
    out[t - 1] = layers[t][i].action;
    i = layers[t][i].parent;
  }
  return true;
}

}  // namespace

double agent_space(AgentRef agent, const Scenario& s) {
  double space = 1.0;
  for (int o : slot_options(agent, s)) space *= o;
  return space;
}

std::vector<AgentRef> all_agents(const Scenario& s) {
  std::vector<AgentRef> agents;
  for (int u = 0; u < s.U(); ++u) agents.push_back({AgentKind::User, u});
  for (int n = 0; n < s.N(); ++n) agents.push_back({AgentKind::BS, n});
  for (int m = 0; m < s.M(); ++m) agents.push_back({AgentKind::MBS, m});
  agents.push_back({AgentKind::Satellite, 0});
  return agents;
}

AgentSolution solve_agent(AgentRef agent, const PriceState& p, const RateTable& r, const Scenario& s,
                          SatelliteRateMode mode, double exact_below) {
  if (agent_space(agent, s) <= exact_below) return enumerate_agent(agent, p, r, s, mode);
  switch (agent.kind) {
    case AgentKind::User: return solve_user(agent.index, p, r, s);
    case AgentKind::BS: return solve_bs(agent.index, p, r, s, mode);
    case AgentKind::MBS: return solve_mbs(agent.index, p, s);
    case AgentKind::Satellite: return solve_satellite(p, s);
  }
  return {};
}

AgentSolution solve_user(int u, const PriceState& p, const RateTable& r, const Scenario& s) {
  UserModel um(u, p, r, s);
  const int N = um.N, T = um.T;
  std::vector<int> c(T, kIdle);
  for (int t = 0; t < T; ++t) {
    double bv = 0.0;
    for (int n = 0; n < N; ++n) {
      const double v = um.value(t, n);
      if (v > bv) {
        bv = v;
        c[t] = n;
      }
    }
  }

  bool ok = um.meets(c);
  if (!ok) {
    const double need = std::max(s.demand.data_demand[u] / s.time.tau, T * s.demand.user_rate_floor[u]);
    double have = 0.0;
    std::vector<std::vector<Upgrade>> ups(T);
    for (int t = 0; t < T; ++t) {
      have += um.rate(c[t]);
      for (int n = 0; n < N; ++n) {
        const double gain = um.rate(n) - um.rate(c[t]);
        if (gain > 0.0) ups[t].push_back({n, gain, um.value(t, c[t]) - um.value(t, n)});
      }
    }
    if (cheapest_cover(c, ups, need - have)) ok = um.meets(c);
  }
  // rounding at the boundary: top up greedily by loss per unit rate
  while (!ok) {
    int bt = -1, bn = kIdle;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < T; ++t) {
      const double r0 = um.rate(c[t]), v0 = um.value(t, c[t]);
      for (int n = 0; n < N; ++n) {
        const double gain = um.rate(n) - r0;
        if (!(gain > 0.0)) continue;
        const double ratio = (v0 - um.value(t, n)) / gain;
        if (ratio < best) {
          best = ratio;
          bt = t;
          bn = n;
        }
      }
    }
    if (bt < 0) break;
    c[bt] = bn;
    ok = um.meets(c);
  }

  if (ok) {
    // single-slot improvements that keep the lower bounds
    for (bool changed = true; changed;) {
      changed = false;
      for (int t = 0; t < T; ++t) {
        const int cur = c[t];
        int best = cur;
        double bv = um.value(t, cur);
        for (int o = kIdle; o < N; ++o) {
          if (o == cur) continue;
          const double v = um.value(t, o);
          if (!(v > bv)) continue;
          c[t] = o;
          if (um.meets(c)) {
            best = o;
            bv = v;
          }
          c[t] = cur;
        }
        if (best != cur) {
          c[t] = best;
          changed = true;
        }
      }
    }
  }

  AgentSolution sol;
  sol.schedule = um.schedule(c);
  sol.objective = user_value_sum(um, c);
  sol.feasible = ok;
  return sol;
}

AgentSolution solve_bs(int n, const PriceState& p, const RateTable& r, const Scenario& s, SatelliteRateMode mode) {
  BsModel bm(n, p, r, s, mode);
  const int T = bm.T, Tn = bm.Tn, A = bm.actions();
  std::vector<int> c;
  bool ok = bs_dynamic_program(bm, c) && bm.feasible(c);
  if (!ok) {
    // best-effort schedule: argmax, then causality and QoS repair
    c.assign(T, kIdle);
    for (int t = 0; t < Tn; ++t) {
      double bv = 0.0;
      for (int a = 0; a < A; ++a) {
        const double v = bm.value(t, a);
        if (v > bv) {
          bv = v;
          c[t] = a;
        }
      }
    }

    // best buy at a slot, by value; only sources that deliver bits
    auto best_buy = [&](int t) {
      int best = kIdle;
      double bv = -std::numeric_limits<double>::infinity();
      for (int a = bm.U; a < A; ++a) {
        if (!(bm.in_rate(t, a) > 0.0)) continue;
        const double v = bm.value(t, a);
        if (v > bv) {
          bv = v;
          best = a;
        }
      }
      return best;
    };

    // causality: convert early sells / idles to buys, drop sells, or swap a
    // sell with a later buy
    for (int guard = 0; guard < 4 * T * T + 16; ++guard) {
      const int tv = bm.first_causality_violation(c);
      if (tv < 0) break;
      const double before = bm.prefix(c, tv);
      double best_score = std::numeric_limits<double>::infinity();
      std::vector<int> best_c;
      auto consider = [&](const std::vector<int>& cand) {
        const double gain = before - bm.prefix(cand, tv);
        if (!(gain > 0.0)) return;
        const double loss = bs_value_sum(bm, c) - bs_value_sum(bm, cand);
        const double score = loss / gain;
        if (score < best_score) {
          best_score = score;
          best_c = cand;
        }
      };
      for (int t = 0; t <= tv; ++t) {
        const int cur = c[t];
        if (cur != kIdle && bm.is_buy(cur)) continue;
        std::vector<int> cand = c;
        const int b = best_buy(t);
        if (b != kIdle) {
          cand[t] = b;
          consider(cand);
        }
        if (bm.is_sell(cur)) {
          cand[t] = kIdle;
          consider(cand);
          for (int t2 = tv + 1; t2 < Tn; ++t2) {
            if (!(c[t2] != kIdle && bm.is_buy(c[t2]))) continue;
            std::vector<int> sw = c;
            sw[t] = c[t2];
            sw[t2] = cur;
            consider(sw);
          }
        }
      }
      if (best_c.empty()) break;
      c = best_c;
    }

    ok = bm.first_causality_violation(c) < 0;
    // backhaul QoS: add or upgrade buys
    while (ok && !bm.qos_ok(c)) {
      int bt = -1, ba = kIdle;
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < Tn; ++t) {
        const int cur = c[t];
        const double r0 = cur == kIdle ? 0.0 : bm.in_rate(t, cur);
        const double v0 = bm.value(t, cur);
        for (int a = bm.U; a < A; ++a) {
          const double gain = bm.in_rate(t, a) - r0;
          if (!(gain > 0.0)) continue;
          const double ratio = (v0 - bm.value(t, a)) / gain;
          if (ratio < best) {
            best = ratio;
            bt = t;
            ba = a;
          }
        }
      }
      if (bt < 0) {
        ok = false;
        break;
      }
      c[bt] = ba;
    }
    ok = ok && bm.feasible(c);
  }

  if (ok) {
    for (bool changed = true; changed;) {
      changed = false;
      for (int t = 0; t < Tn; ++t) {
        const int cur = c[t];
        int best = cur;
        double bv = bm.value(t, cur);
        for (int a = kIdle; a < A; ++a) {
          if (a == cur) continue;
          const double v = bm.value(t, a);
          if (!(v > bv)) continue;
          c[t] = a;
          if (bm.feasible(c)) {
            best = a;
            bv = v;
          }
          c[t] = cur;
        }
        if (best != cur) {
          c[t] = best;
          changed = true;
        }
      }
    }
  }

  AgentSolution sol;
  sol.schedule = bm.schedule(c);
  sol.objective = bs_value_sum(bm, c);
  sol.feasible = ok;
  return sol;
}

AgentSolution solve_mbs(int m, const PriceState& p, const Scenario& s) {
  return solve_seller(mbs_prices(p, m, s.N(), s.M(), s.T()), s.N(), s.T());
}

AgentSolution solve_satellite(const PriceState& p, const Scenario& s) {
  if (!s.nodes.satellite_enabled) {
    AgentSolution sol;
    sol.schedule.assign(static_cast<std::size_t>(s.N()) * s.T(), 0);
    return sol;
  }
  return solve_seller(p.xi, s.N(), s.T());
}

double agent_lagrangian(AgentRef agent, const std::vector<std::uint8_t>& x, const PriceState& p, const RateTable& r,
                        const Scenario& s, SatelliteRateMode mode) {
  const int N = s.N(), U = s.U(), M = s.M(), T = s.T();
  switch (agent.kind) {
    case AgentKind::User: {
      UserModel um(agent.index, p, r, s);
      double v = 0.0;
      for (int n = 0; n < N; ++n)
        for (int t = 0; t < T; ++t)
          if (x[n * T + t]) v += um.value(t, n);
      return v;
    }
    case AgentKind::BS: {
      BsModel bm(agent.index, p, r, s, mode);
      double v = 0.0;
      for (int u = 0; u < U; ++u)
        for (int t = 0; t < T; ++t)
          if (x[u * T + t]) v += bm.value(t, u);
      for (int m = 0; m < M; ++m)
        for (int t = 0; t < T; ++t)
          if (x[U * T + m * T + t]) v += bm.value(t, U + m);
      for (int t = 0; t < T; ++t)
        if (x[(U + M) * T + t]) v += bm.value(t, U + M);
      return v;
    }
    case AgentKind::MBS: return seller_lagrangian(mbs_prices(p, agent.index, N, M, T), x, T);
    case AgentKind::Satellite: return seller_lagrangian(p.xi, x, T);
  }
  return 0.0;
}

bool agent_feasible(AgentRef agent, const std::vector<std::uint8_t>& x, const RateTable& r, const Scenario& s,
                    SatelliteRateMode mode) {
  const int N = s.N(), U = s.U(), M = s.M(), T = s.T();
  for (auto v : x)
    if (v > 1) return false;
  switch (agent.kind) {
    case AgentKind::User: {
      bool valid = true;
      auto c = user_choice(x, N, T, &valid);
      PriceState dummy = PriceState::zeros(Dims::of(s));
      return valid && UserModel(agent.index, dummy, r, s).meets(c);
    }
    case AgentKind::BS: {
      bool valid = true;
      auto c = bs_choice(x, U, M, T, &valid);
      if (!s.nodes.satellite_enabled)
        for (int t = 0; t < T; ++t)
          if (c[t] == U + M) return false;
      PriceState dummy = PriceState::zeros(Dims::of(s));
      return valid && BsModel(agent.index, dummy, r, s, mode).feasible(c);
    }
    case AgentKind::MBS: return seller_feasible(x, N, T, T);
    case AgentKind::Satellite: return seller_feasible(x, N, T, s.nodes.satellite_enabled ? T : 0);
  }
  return false;
}

AgentSolution enumerate_agent(AgentRef agent, const PriceState& p, const RateTable& r, const Scenario& s,
                              SatelliteRateMode mode) {
  const int N = s.N(), U = s.U(), M = s.M(), T = s.T();
  AgentSolution best;
  best.feasible = false;
  best.objective = -std::numeric_limits<double>::infinity();
  double best_infeasible = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> fallback;

  // per-slot option counts; option 0 is idle
  const std::vector<int> opts = slot_options(agent, s);
  if (agent_space(agent, s) > kAgentGuard) throw GuardError("enumerate_agent: decision space exceeds 2^20");

  std::vector<int> pick(T, 0);
  std::vector<std::uint8_t> x;
  auto build = [&]() {
    switch (agent.kind) {
      case AgentKind::User:
      case AgentKind::MBS:
      case AgentKind::Satellite:
        x.assign(static_cast<std::size_t>(N) * T, 0);
        for (int t = 0; t < T; ++t)
          if (pick[t] > 0) x[(pick[t] - 1) * T + t] = 1;
        break;
      case AgentKind::BS:
        x.assign(static_cast<std::size_t>(U + M + 1) * T, 0);
        for (int t = 0; t < T; ++t) {
          const int a = pick[t] - 1;
          if (a < 0) continue;
          if (a < U)
            x[a * T + t] = 1;
          else if (a < U + M)
            x[U * T + (a - U) * T + t] = 1;
          else
            x[(U + M) * T + t] = 1;
        }
        break;
    }
  };
  for (;;) {
    build();
    const double v = agent_lagrangian(agent, x, p, r, s, mode);
    if (agent_feasible(agent, x, r, s, mode)) {
      if (v > best.objective) {
        best.objective = v;
        best.schedule = x;
        best.feasible = true;
      }
    } else if (v > best_infeasible) {
      best_infeasible = v;
      fallback = x;
    }
    int t = 0;
    while (t < T && ++pick[t] == opts[t]) pick[t++] = 0;
    if (t == T) break;
  }
  if (!best.feasible) {
    best.schedule = fallback;
    best.objective = best_infeasible;
  }
  return best;
}

std::vector<std::uint8_t> agent_slice(AgentRef agent, const AllocationState& a) {
  const Dims& d = a.dims;
  std::vector<std::uint8_t> x;
  switch (agent.kind) {
    case AgentKind::User:
      x.assign(static_cast<std::size_t>(d.N) * d.T, 0);
      for (int n = 0; n < d.N; ++n)
        for (int t = 0; t < d.T; ++t) x[n * d.T + t] = a.theta[a.iu(n, agent.index, t)];
      break;
    case AgentKind::BS: {
      const int n = agent.index;
      x.assign(static_cast<std::size_t>(d.U + d.M + 1) * d.T, 0);
      for (int u = 0; u < d.U; ++u)
        for (int t = 0; t < d.T; ++t) x[u * d.T + t] = a.rho[a.iu(n, u, t)];
      for (int m = 0; m < d.M; ++m)
        for (int t = 0; t < d.T; ++t) x[d.U * d.T + m * d.T + t] = a.phi[a.im(n, m, t)];
      for (int t = 0; t < d.T; ++t) x[(d.U + d.M) * d.T + t] = a.eps[a.is(n, t)];
      break;
    }
    case AgentKind::MBS:
      x.assign(static_cast<std::size_t>(d.N) * d.T, 0);
      for (int n = 0; n < d.N; ++n)
        for (int t = 0; t < d.T; ++t) x[n * d.T + t] = a.delta[a.im(n, agent.index, t)];
      break;
    case AgentKind::Satellite: x = a.beta; break;
  }
  return x;
}

void write_slice(AgentRef agent, const std::vector<std::uint8_t>& x, AllocationState& a) {
  const Dims& d = a.dims;
  switch (agent.kind) {
    case AgentKind::User:
      for (int n = 0; n < d.N; ++n)
        for (int t = 0; t < d.T; ++t) a.theta[a.iu(n, agent.index, t)] = x[n * d.T + t];
      break;
    case AgentKind::BS: {
      const int n = agent.index;
      for (int u = 0; u < d.U; ++u)
        for (int t = 0; t < d.T; ++t) a.rho[a.iu(n, u, t)] = x[u * d.T + t];
      for (int m = 0; m < d.M; ++m)
        for (int t = 0; t < d.T; ++t) a.phi[a.im(n, m, t)] = x[d.U * d.T + m * d.T + t];
      for (int t = 0; t < d.T; ++t) a.eps[a.is(n, t)] = x[(d.U + d.M) * d.T + t];
      break;
    }
    case AgentKind::MBS:
      for (int n = 0; n < d.N; ++n)
        for (int t = 0; t < d.T; ++t) a.delta[a.im(n, agent.index, t)] = x[n * d.T + t];
      break;
    case AgentKind::Satellite: a.beta = x; break;
  }
}

MarketResponse solve_all(const PriceState& p, const RateTable& r, const Scenario& s, SatelliteRateMode mode,
                         int threads, double exact_below) {
  const std::vector<AgentRef> agents = all_agents(s);
  std::vector<AgentSolution> sols(agents.size());
  auto work = [&](std::size_t i) { sols[i] = solve_agent(agents[i], p, r, s, mode, exact_below); };
  if (threads <= 1) {
    for (std::size_t i = 0; i < agents.size(); ++i) work(i);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t k = static_cast<std::size_t>(threads);
    for (std::size_t w = 0; w < k; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < agents.size(); i += k) work(i);
      });
  }

  MarketResponse out;
  out.alloc = AllocationState::zeros(Dims::of(s));
  for (std::size_t i = 0; i < agents.size(); ++i) {
    write_slice(agents[i], sols[i].schedule, out.alloc);
    out.dual_value += sols[i].objective;
    if (!sols[i].feasible) ++out.infeasible_agents;
  }
  return out;
}

EquilibriumCheck check_walrasian(const AllocationState& a, const PriceState& p, const RateTable& r,
                                 const Scenario& s, double tol, SatelliteRateMode mode, double exact_below) {
  EquilibriumCheck out;
  if (!a.cleared()) {
    out.reason = "market not cleared";
    return out;
  }
  const std::vector<AgentRef> agents = all_agents(s);
  static const char* names[] = {"user", "bs", "mbs", "satellite"};
  for (const AgentRef& ag : agents) {
    const auto x = agent_slice(ag, a);
    const AgentSolution best = solve_agent(ag, p, r, s, mode, exact_below);
    const std::string who = std::string(names[static_cast<int>(ag.kind)]) + " " + std::to_string(ag.index);
    if (!best.feasible || !agent_feasible(ag, x, r, s, mode)) {
      out.reason = who + " has no feasible local response";
      return out;
    }
    const double v = agent_lagrangian(ag, x, p, r, s, mode);
    if (v < best.objective - tol * std::max(1.0, std::abs(best.objective))) {
      out.reason = who + " not locally optimal";
      return out;
    }
  }
  out.ok = true;
  return out;
}

bool is_walrasian_equilibrium(const AllocationState& a, const PriceState& p, const RateTable& r, const Scenario& s,
                              double tol, SatelliteRateMode mode, double exact_below) {
  return check_walrasian(a, p, r, s, tol, mode, exact_below).ok;
}

}  // namespace isdn
