#include "isdn/equilibrium.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "isdn/format.hpp"

namespace isdn {

using nlohmann::json;

Method parse_method(const std::string& name) {
  if (name == "heavy_ball") return Method::HeavyBall;
  if (name == "subgradient") return Method::Subgradient;
  if (name == "random") return Method::Random;
  if (name == "brute_force") return Method::BruteForce;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::HeavyBall: return "heavy_ball";
    case Method::Subgradient: return "subgradient";
    case Method::Random: return "random";
    case Method::BruteForce: return "brute_force";
  }
  return "?";
}

SatelliteRateMode parse_satellite_rate_mode(const std::string& name) {
  if (name == "exact") return SatelliteRateMode::Exact;
  if (name == "drift") return SatelliteRateMode::Drift;
  throw ConfigError("unknown satellite rate mode '" + name + "'");
}

void validate(const SolverConfig& c) {
  if (!(c.step0 > 0.0)) throw ConfigError("solver.step0: must be > 0");
  if (c.max_iters < 1) throw ConfigError("solver.max_iters: must be >= 1");
  if (c.patience < 1) throw ConfigError("solver.patience: must be >= 1");
  if (c.momentum < 0.0) throw ConfigError("solver.momentum: must be >= 0");
}

SolverConfig load_solver_config(const json& doc) {
  SolverConfig c;
  if (!doc.contains("solver")) return c;
  const json& j = doc.at("solver");
  if (!j.is_object()) throw ConfigError("solver: expected an object");
  try {
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("step0")) c.step0 = j.at("step0").get<double>();
    if (j.contains("step_schedule")) {
      const auto v = j.at("step_schedule").get<std::string>();
      if (v == "inv_sqrt")
        c.schedule = StepSchedule::InvSqrt;
      else if (v == "inv")
        c.schedule = StepSchedule::Inv;
      else
        throw ConfigError("solver.step_schedule: expected inv_sqrt or inv");
    }
    if (j.contains("momentum")) c.momentum = j.at("momentum").get<double>();
    if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
    if (j.contains("patience")) c.patience = j.at("patience").get<int>();
    if (j.contains("satellite_rate_mode"))
      c.sat_mode = parse_satellite_rate_mode(j.at("satellite_rate_mode").get<std::string>());
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("exact_below")) c.exact_below = j.at("exact_below").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  validate(c);
  return c;
}

// ---- violations and price step ----------------------------------------

namespace {

std::vector<std::int8_t> diff(const std::vector<std::uint8_t>& buy, const std::vector<std::uint8_t>& sell) {
  std::vector<std::int8_t> out(buy.size());
  for (std::size_t i = 0; i < buy.size(); ++i) out[i] = static_cast<std::int8_t>(int(buy[i]) - int(sell[i]));
  return out;
}

double l2(const std::vector<std::int8_t>& v) {
  double s = 0.0;
  for (auto x : v) s += double(x) * x;
  return std::sqrt(s);
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (auto x : v) s += x * x;
  return std::sqrt(s);
}

void update_component(std::vector<double>& dual, std::vector<double>& mu, const std::vector<std::int8_t>& s,
                      double step, double coef, bool momentum) {
  const double ns = l2(s);
  if (ns == 0.0) return;
  if (!momentum) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      mu[i] = s[i] / ns;
      dual[i] = std::max(0.0, dual[i] + step * mu[i]);
    }
    return;
  }
  const double nm = l2(mu);
  double nu = 0.0;
  if (nm > 0.0) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += s[i] * mu[i];
    nu = std::max(0.0, -coef * dot / (ns * nm));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    mu[i] = s[i] / ns + nu * mu[i];
    dual[i] = std::max(0.0, dual[i] + step * mu[i]);
  }
}

}  // namespace

ViolationVectors ViolationVectors::of(const AllocationState& a) {
  return {diff(a.theta, a.rho), diff(a.phi, a.delta), diff(a.eps, a.beta)};
}
double ViolationVectors::norm1() const { return l2(s1); }
double ViolationVectors::norm2() const { return l2(s2); }
double ViolationVectors::norm3() const { return l2(s3); }
bool ViolationVectors::zero() const {
  auto z = [](const std::vector<std::int8_t>& v) { return std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; }); };
  return z(s1) && z(s2) && z(s3);
}

double step_size(const SolverConfig& c, int k) {
  return c.schedule == StepSchedule::InvSqrt ? c.step0 / std::sqrt(double(k)) : c.step0 / k;
}

PriceState heavy_ball_step(const PriceState& p, const ViolationVectors& v, const SolverConfig& c) {
  PriceState out = p;
  const double step = step_size(c, p.k);
  const bool momentum = c.method != Method::Subgradient;
  update_component(out.lambda, out.mu1, v.s1, step, c.momentum, momentum);
  update_component(out.varsigma, out.mu2, v.s2, step, c.momentum, momentum);
  update_component(out.xi, out.mu3, v.s3, step, c.momentum, momentum);
  ++out.k;
  return out;
}

// ---- metrics ------------------------------------------------------------

RateMetrics rate_metrics(const AllocationState& a, const RateTable& r, const Scenario& s, double access_threshold,
                         double backhaul_threshold) {
  RateMetrics m;
  const Dims& d = a.dims;
  for (int n = 0; n < d.N; ++n)
    for (int u = 0; u < d.U; ++u)
      for (int t = 0; t < d.T; ++t)
        if (a.rho[a.iu(n, u, t)]) {
          m.access_rates.push_back(r.a(n, u));
          if (a.theta[a.iu(n, u, t)]) m.delivered_access_bits += r.a(n, u) * s.time.tau;
        }
  for (int n = 0; n < d.N; ++n)
    for (int t = 0; t < d.T; ++t) {
      for (int mm = 0; mm < d.M; ++mm)
        if (a.delta[a.im(n, mm, t)]) m.backhaul_rates.push_back(r.b(n, mm));
      if (a.beta[a.is(n, t)]) m.backhaul_rates.push_back(r.s(n, t));
    }
  auto mean = [](const std::vector<double>& v) {
    double x = 0.0;
    for (double e : v) x += e;
    return v.empty() ? 0.0 : x / v.size();
  };
  m.mean_access = mean(m.access_rates);
  m.mean_backhaul = mean(m.backhaul_rates);
  for (double x : m.access_rates) m.access_above += x >= access_threshold;
  for (double x : m.backhaul_rates) m.backhaul_above += x >= backhaul_threshold;
  return m;
}

// ---- repair -------------------------------------------------------------

AllocationState repair(const AllocationState& a, const RateTable& r, const Scenario& s) {
  AllocationState out = a;
  for (std::size_t i = 0; i < out.rho.size(); ++i) out.rho[i] = out.theta[i] = (a.rho[i] && a.theta[i]) ? 1 : 0;
  for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] = out.delta[i] = (a.phi[i] && a.delta[i]) ? 1 : 0;
  for (std::size_t i = 0; i < out.eps.size(); ++i) out.eps[i] = out.beta[i] = (a.eps[i] && a.beta[i]) ? 1 : 0;

  const Dims& d = out.dims;
  const double tau = s.time.tau;
  for (int n = 0; n < d.N; ++n) {
    for (;;) {
      double balance = 0.0, mag = 0.0;
      int bad = -1;
      for (int t = 0; t < d.T && bad < 0; ++t) {
        double o = 0.0, in = 0.0;
        for (int u = 0; u < d.U; ++u)
          if (out.rho[out.iu(n, u, t)]) o += r.a(n, u) * tau;
        for (int m = 0; m < d.M; ++m)
          if (out.phi[out.im(n, m, t)]) in += r.b(n, m) * tau;
        if (out.eps[out.is(n, t)]) in += r.s(n, t) * tau;
        balance += o - in;
        mag += o + in;
        if (balance > 1e-12 * mag) bad = t;
      }
      if (bad < 0) break;
      // drop the latest sell at or before the violation
      bool dropped = false;
      for (int t = bad; t >= 0 && !dropped; --t)
        for (int u = 0; u < d.U && !dropped; ++u)
          if (out.rho[out.iu(n, u, t)]) {
            out.rho[out.iu(n, u, t)] = out.theta[out.iu(n, u, t)] = 0;
            dropped = true;
          }
      if (!dropped) break;
    }
  }
  return out;
}

// ---- main loop ----------------------------------------------------------

namespace {

long long message_count(const Scenario& s, int iterations) {
  return static_cast<long long>(iterations) * (s.U() + 2 * s.N() + s.M() + 1);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void finish(EquilibriumReport& rep, const RateTable& r, const Scenario& s) {
  rep.constraints = check_constraints(rep.alloc, r, s);
  rep.feasible = rep.constraints.all_ok();
  rep.total_payoff = total_payoff(rep.alloc, r, s);
  rep.messages = message_count(s, rep.iterations);
}

}  // namespace

EquilibriumReport run(const Scenario& s, const SolverConfig& c) { return run(s, build_rate_table(s), c); }

EquilibriumReport run(const Scenario& s, const RateTable& r, const SolverConfig& c) {
  if (c.method == Method::Random) return run_random_baseline(s, r, c.seed);
  if (c.method == Method::BruteForce) return run_brute_force(s, r);
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  EquilibriumReport rep;
  rep.method = c.method;
  PriceState p = PriceState::zeros(Dims::of(s));
  AllocationState best, last, best_partial;
  bool have_best = false;
  double best_j = std::numeric_limits<double>::quiet_NaN();
  double best_partial_j = -std::numeric_limits<double>::infinity();
  int streak = 0;
  MarketResponse resp;

  for (int k = 1; k <= c.max_iters; ++k) {
    resp = solve_all(p, r, s, c.sat_mode, c.threads, c.exact_below);
    const ViolationVectors v = ViolationVectors::of(resp.alloc);

    last = repair(resp.alloc, r, s);
    const double j = total_payoff(last, r, s);
    if (!have_best && j > best_partial_j) {
      best_partial = last;
      best_partial_j = j;
    }
    if (check_constraints(last, r, s).all_ok()) {
      if (!have_best || j > best_j) {
        best = last;
        best_j = j;
        have_best = true;
      }
    }

    IterationRecord rec;
    rec.k = k;
    rec.norm_s1 = v.norm1();
    rec.norm_s2 = v.norm2();
    rec.norm_s3 = v.norm3();
    rec.dual_value = resp.dual_value;
    rec.step = step_size(c, p.k);
    rec.cleared = v.zero();
    rec.best_payoff = best_j;
    rec.infeasible_agents = resp.infeasible_agents;
    rep.trace.push_back(rec);
    rep.iterations = k;

    streak = rec.cleared ? streak + 1 : 0;
    if (streak >= c.patience) {
      rep.converged = true;
      break;
    }
    if (k < c.max_iters) p = heavy_ball_step(p, v, c);
  }

  rep.prices = p;
  rep.dual_value = resp.dual_value;
  rep.infeasible_agents = resp.infeasible_agents;
  if (rep.converged) {
    rep.alloc = resp.alloc;
    const EquilibriumCheck chk = check_walrasian(rep.alloc, p, r, s, 1e-9, c.sat_mode, c.exact_below);
    rep.equilibrium = chk.ok;
    rep.equilibrium_reason = chk.reason;
  } else {
    // without a fully feasible point, the highest-payoff cleared remainder
    rep.alloc = have_best ? best : best_partial;
    rep.equilibrium_reason = "not converged";
  }
  finish(rep, r, s);
  rep.wall_time = seconds_since(t0);
  return rep;
}

// ---- random baseline ----------------------------------------------------

EquilibriumReport run_random_baseline(const Scenario& s, std::uint64_t seed) {
  return run_random_baseline(s, build_rate_table(s), seed);
}

EquilibriumReport run_random_baseline(const Scenario& s, const RateTable& r, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  EquilibriumReport rep;
  rep.method = Method::Random;
  rep.alloc = AllocationState::zeros(Dims::of(s));
  rep.prices = PriceState::zeros(Dims::of(s));
  AllocationState& a = rep.alloc;
  const int U = s.U(), N = s.N(), M = s.M(), T = s.T();
  std::mt19937_64 rng(seed);
  std::vector<int> options;
  for (int t = 0; t < T; ++t) {
    std::vector<char> user_used(U, 0), mbs_used(M, 0);
    bool sat_used = false;
    for (int n = 0; n < N; ++n) {
      if (t >= s.Tn(n)) continue;
      options.assign(1, -1);
      for (int u = 0; u < U; ++u)
        if (!user_used[u]) options.push_back(u);
      for (int m = 0; m < M; ++m)
        if (!mbs_used[m]) options.push_back(U + m);
      if (s.nodes.satellite_enabled && !sat_used) options.push_back(U + M);
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      const int o = options[pick(rng)];
      if (o < 0) continue;
      if (o < U) {
        user_used[o] = 1;
        a.rho[a.iu(n, o, t)] = a.theta[a.iu(n, o, t)] = 1;
      } else if (o < U + M) {
        mbs_used[o - U] = 1;
        a.phi[a.im(n, o - U, t)] = a.delta[a.im(n, o - U, t)] = 1;
      } else {
        sat_used = true;
        a.eps[a.is(n, t)] = a.beta[a.is(n, t)] = 1;
      }
    }
  }
  // same causality repair the solvers' fallback gets
  rep.alloc = repair(rep.alloc, r, s);
  rep.dual_value = std::numeric_limits<double>::quiet_NaN();
  rep.equilibrium_reason = "baseline";
  finish(rep, r, s);
  rep.wall_time = seconds_since(t0);
  return rep;
}

// ---- brute force --------------------------------------------------------

namespace {

// per-slot joint action of all BSs; actions coded as in the BS solver
struct Profile {
  std::vector<int> act;
  double value = 0.0;
};

std::vector<Profile> slot_profiles(const Scenario& s, const RateTable& r, int t) {
  const int U = s.U(), N = s.N(), M = s.M(), T = s.T();
  const bool sat = s.nodes.satellite_enabled;
  std::vector<Profile> out;
  std::vector<int> act(N, -1);
  std::vector<char> user_used(U, 0), mbs_used(M, 0);
  bool sat_used = false;
  auto rec = [&](auto&& self, int n) -> void {
    if (n == N) {
      Profile p;
      p.act = act;
      for (int i = 0; i < N; ++i) {
        const int a = act[i];
        if (a < 0) continue;
        if (a < U)
          p.value += r.a(i, a) / (T * s.demand.user_rate_floor[a]) - 1.0 / T;
        else if (a < U + M)
          p.value += r.b(i, a - U) / (T * s.demand.bs_rate_floor[i]) - 1.0 / T;
        else
          p.value += r.s(i, t) / (T * s.demand.bs_rate_floor[i]) - 1.0 / T;
      }
      out.push_back(std::move(p));
      return;
    }
    act[n] = -1;
    self(self, n + 1);
    if (t >= s.Tn(n)) return;
    for (int u = 0; u < U; ++u)
      if (!user_used[u]) {
        user_used[u] = 1;
        act[n] = u;
        self(self, n + 1);
        user_used[u] = 0;
      }
    for (int m = 0; m < M; ++m)
      if (!mbs_used[m]) {
        mbs_used[m] = 1;
        act[n] = U + m;
        self(self, n + 1);
        mbs_used[m] = 0;
      }
    if (sat && !sat_used) {
      sat_used = true;
      act[n] = U + M;
      self(self, n + 1);
      sat_used = false;
    }
    act[n] = -1;
  };
  rec(rec, 0);
  return out;
}

struct BruteForce {
  const Scenario& s;
  const RateTable& r;
  int U, N, M, T;
  double tau;
  std::vector<std::vector<Profile>> profiles;
  std::vector<double> bound;  // best achievable from slot t on
  // remaining maxima from slot t on, per user bits / user rate / BS rate
  std::vector<std::vector<double>> rem_user_rate, rem_bs_rate;

  std::vector<int> pick, best_pick;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<double> balance, mag, user_rate, bs_rate;

  BruteForce(const Scenario& s_, const RateTable& r_)
      : s(s_), r(r_), U(s_.U()), N(s_.N()), M(s_.M()), T(s_.T()), tau(s_.time.tau) {
    profiles.resize(T);
    for (int t = 0; t < T; ++t) profiles[t] = slot_profiles(s, r, t);
    bound.assign(T + 1, 0.0);
    rem_user_rate.assign(T + 1, std::vector<double>(U, 0.0));
    rem_bs_rate.assign(T + 1, std::vector<double>(N, 0.0));
    for (int t = T - 1; t >= 0; --t) {
      double b = 0.0;
      for (const auto& p : profiles[t]) b = std::max(b, p.value);
      bound[t] = bound[t + 1] + b;
      for (int u = 0; u < U; ++u) {
        double mx = 0.0;
        for (int n = 0; n < N; ++n)
          if (t < s.Tn(n)) mx = std::max(mx, r.a(n, u));
        rem_user_rate[t][u] = rem_user_rate[t + 1][u] + mx;
      }
      for (int n = 0; n < N; ++n) {
        double mx = 0.0;
        if (t < s.Tn(n)) {
          for (int m = 0; m < M; ++m) mx = std::max(mx, r.b(n, m));
          if (s.nodes.satellite_enabled) mx = std::max(mx, r.s(n, t));
        }
        rem_bs_rate[t][n] = rem_bs_rate[t + 1][n] + mx;
      }
    }
    pick.assign(T, 0);
    balance.assign(N, 0.0);
    mag.assign(N, 0.0);
    user_rate.assign(U, 0.0);
    bs_rate.assign(N, 0.0);
  }

  AllocationState build(const std::vector<int>& pk) const {
    AllocationState a = AllocationState::zeros(Dims::of(s));
    for (int t = 0; t < T; ++t) {
      const Profile& p = profiles[t][pk[t]];
      for (int n = 0; n < N; ++n) {
        const int x = p.act[n];
        if (x < 0) continue;
        if (x < U)
          a.rho[a.iu(n, x, t)] = a.theta[a.iu(n, x, t)] = 1;
        else if (x < U + M)
          a.phi[a.im(n, x - U, t)] = a.delta[a.im(n, x - U, t)] = 1;
        else
          a.eps[a.is(n, t)] = a.beta[a.is(n, t)] = 1;
      }
    }
    return a;
  }

  bool lower_bounds_reachable(int t) const {
    constexpr double slack = 1.0 - 1e-9;
    for (int u = 0; u < U; ++u) {
      const double rate = user_rate[u] + rem_user_rate[t][u];
      if (rate * tau < s.demand.data_demand[u] * slack) return false;
      if (rate / T < s.demand.user_rate_floor[u] * slack) return false;
    }
    for (int n = 0; n < N; ++n)
      if ((bs_rate[n] + rem_bs_rate[t][n]) / T < s.demand.bs_rate_floor[n] * slack) return false;
    return true;
  }

  void dfs(int t, double value) {
    if (found && value + bound[t] <= best) return;
    if (!lower_bounds_reachable(t)) return;
    if (t == T) {
      if (found && !(value > best)) return;
      const AllocationState a = build(pick);
      if (!check_constraints(a, r, s).all_ok()) return;
      best = value;
      best_pick = pick;
      found = true;
      return;
    }
    for (std::size_t i = 0; i < profiles[t].size(); ++i) {
      const Profile& p = profiles[t][i];
      const auto saved_balance = balance, saved_mag = mag, saved_user = user_rate, saved_bs = bs_rate;
      bool ok = true;
      for (int n = 0; n < N && ok; ++n) {
        const int x = p.act[n];
        double o = 0.0, in = 0.0;
        if (x >= 0 && x < U) {
          o = r.a(n, x) * tau;
          user_rate[x] += r.a(n, x);
        } else if (x >= U) {
          const double c = x < U + M ? r.b(n, x - U) : r.s(n, t);
          in = c * tau;
          bs_rate[n] += c;
        }
        balance[n] += o - in;
        mag[n] += o + in;
        if (balance[n] > 1e-12 * mag[n]) ok = false;
      }
      if (ok) {
        pick[t] = static_cast<int>(i);
        dfs(t + 1, value + p.value);
      }
      balance = saved_balance;
      mag = saved_mag;
      user_rate = saved_user;
      bs_rate = saved_bs;
    }
  }
};

}  // namespace

double brute_force_space(const Scenario& s) {
  const RateTable r = build_rate_table(s);
  double space = 1.0;
  for (int t = 0; t < s.T(); ++t) space *= static_cast<double>(slot_profiles(s, r, t).size());
  return space;
}

EquilibriumReport run_brute_force(const Scenario& s) { return run_brute_force(s, build_rate_table(s)); }

EquilibriumReport run_brute_force(const Scenario& s, const RateTable& r) {
  const auto t0 = std::chrono::steady_clock::now();
  BruteForce bf(s, r);
  double space = 1.0;
  for (const auto& p : bf.profiles) space *= static_cast<double>(p.size());
  if (space > kBruteForceGuard) throw GuardError("run_brute_force: decision space exceeds 2^24");
  bf.dfs(0, 0.0);

  EquilibriumReport rep;
  rep.method = Method::BruteForce;
  rep.converged = bf.found;
  rep.equilibrium_reason = bf.found ? "exhaustive optimum" : "no feasible allocation";
  rep.prices = PriceState::zeros(Dims::of(s));
  rep.alloc = bf.found ? bf.build(bf.best_pick) : AllocationState::zeros(Dims::of(s));
  finish(rep, r, s);
  rep.wall_time = seconds_since(t0);
  return rep;
}

double duality_gap(const EquilibriumReport& rep) {
  if (!rep.feasible) return std::numeric_limits<double>::quiet_NaN();
  return rep.dual_value - rep.total_payoff;
}

// ---- output -------------------------------------------------------------

void write_trace_csv(std::ostream& out, const EquilibriumReport& rep) {
  out << "k,norm_s1,norm_s2,norm_s3,dual_value,best_payoff,step,cleared\n";
  for (const auto& r : rep.trace)
    out << r.k << ',' << fmt12(r.norm_s1) << ',' << fmt12(r.norm_s2) << ',' << fmt12(r.norm_s3) << ','
        << fmt12(r.dual_value) << ',' << (std::isnan(r.best_payoff) ? std::string("nan") : fmt12(r.best_payoff))
        << ',' << fmt12(r.step) << ',' << (r.cleared ? 1 : 0) << '\n';
}

namespace {

json num(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

json rounded(const std::vector<double>& v) {
  json j = json::array();
  for (double x : v) j.push_back(round12(x));
  return j;
}

}  // namespace

json report_json(const EquilibriumReport& rep, const RateTable& r, const Scenario& s, double access_threshold,
                 double backhaul_threshold) {
  const RateMetrics m = rate_metrics(rep.alloc, r, s, access_threshold, backhaul_threshold);
  json j;
  j["method"] = method_name(rep.method);
  j["converged"] = rep.converged;
  j["equilibrium"] = rep.equilibrium;
  j["equilibrium_reason"] = rep.equilibrium_reason;
  j["iterations"] = rep.iterations;
  j["messages"] = rep.messages;
  j["wall_time_s"] = num(rep.wall_time);
  j["feasible"] = rep.feasible;
  j["total_payoff"] = num(rep.total_payoff);
  j["dual_value"] = num(rep.dual_value);
  j["duality_gap"] = num(duality_gap(rep));
  j["infeasible_agents"] = rep.infeasible_agents;
  j["allocation"] = to_json(rep.alloc);
  j["prices"] = to_json(rep.prices);
  j["payoffs"] = to_json(payoff_breakdown(rep.alloc, rep.prices, r, s));
  j["constraints"] = rep.constraints.to_json();
  j["metrics"] = {{"mean_access_rate_bps", num(m.mean_access)},
                  {"mean_backhaul_rate_bps", num(m.mean_backhaul)},
                  {"access_links_above", m.access_above},
                  {"backhaul_links_above", m.backhaul_above},
                  {"access_threshold_bps", num(access_threshold)},
                  {"backhaul_threshold_bps", num(backhaul_threshold)},
                  {"delivered_access_bits", num(m.delivered_access_bits)}};
  j["access_rates_bps"] = rounded(m.access_rates);
  j["backhaul_rates_bps"] = rounded(m.backhaul_rates);
  return j;
}

}  // namespace isdn
