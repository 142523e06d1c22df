#include "isdn/market.hpp"

#include <cmath>
#include <stdexcept>

#include "isdn/format.hpp"

namespace isdn {

using nlohmann::json;

AllocationState AllocationState::zeros(Dims d) {
  AllocationState a;
  a.dims = d;
  const std::size_t nu = static_cast<std::size_t>(d.N) * d.U * d.T;
  const std::size_t nm = static_cast<std::size_t>(d.N) * d.M * d.T;
  const std::size_t ns = static_cast<std::size_t>(d.N) * d.T;
  a.rho.assign(nu, 0);
  a.theta.assign(nu, 0);
  a.delta.assign(nm, 0);
  a.phi.assign(nm, 0);
  a.beta.assign(ns, 0);
  a.eps.assign(ns, 0);
  return a;
}

PriceState PriceState::zeros(Dims d) {
  PriceState p;
  p.dims = d;
  const std::size_t nu = static_cast<std::size_t>(d.N) * d.U * d.T;
  const std::size_t nm = static_cast<std::size_t>(d.N) * d.M * d.T;
  const std::size_t ns = static_cast<std::size_t>(d.N) * d.T;
  p.lambda.assign(nu, 0.0);
  p.mu1.assign(nu, 0.0);
  p.varsigma.assign(nm, 0.0);
  p.mu2.assign(nm, 0.0);
  p.xi.assign(ns, 0.0);
  p.mu3.assign(ns, 0.0);
  return p;
}

double user_payoff(int u, const AllocationState& a, const PriceState& p, const RateTable& r, const Scenario& s) {
  const Dims& d = a.dims;
  const double scale = 1.0 / (d.T * s.demand.user_rate_floor[u]);
  double rate = 0.0, paid = 0.0;
  for (int n = 0; n < d.N; ++n)
    for (int t = 0; t < d.T; ++t) {
      const std::size_t i = a.iu(n, u, t);
      if (!a.theta[i]) continue;
      rate += r.a(n, u);
      paid += p.lambda[i];
    }
  return scale * rate - paid;
}

double bs_buyer_payoff(int n, const AllocationState& a, const PriceState& p, const RateTable& r, const Scenario& s) {
  const Dims& d = a.dims;
  const double scale = 1.0 / (d.T * s.demand.bs_rate_floor[n]);
  double rate = 0.0, paid = 0.0;
  for (int t = 0; t < d.T; ++t) {
    for (int m = 0; m < d.M; ++m) {
      const std::size_t i = a.im(n, m, t);
      if (!a.phi[i]) continue;
      rate += r.b(n, m);
      paid += p.varsigma[i];
    }
    if (a.eps[a.is(n, t)]) {
      rate += r.s(n, t);
      paid += p.xi[a.is(n, t)];
    }
  }
  return scale * rate - paid;
}

double seller_payoff(SellerKind kind, int index, const AllocationState& a, const PriceState& p) {
  const Dims& d = a.dims;
  const double cost = 1.0 / d.T;
  double v = 0.0;
  switch (kind) {
    case SellerKind::BS:
      for (int u = 0; u < d.U; ++u)
        for (int t = 0; t < d.T; ++t) {
          const std::size_t i = a.iu(index, u, t);
          if (a.rho[i]) v += p.lambda[i] - cost;
        }
      break;
    case SellerKind::MBS:
      for (int n = 0; n < d.N; ++n)
        for (int t = 0; t < d.T; ++t) {
          const std::size_t i = a.im(n, index, t);
          if (a.delta[i]) v += p.varsigma[i] - cost;
        }
      break;
    case SellerKind::Satellite:
      for (std::size_t i = 0; i < a.beta.size(); ++i)
        if (a.beta[i]) v += p.xi[i] - cost;
      break;
  }
  return v;
}

PayoffBreakdown payoff_breakdown(const AllocationState& a, const PriceState& p, const RateTable& r,
                                 const Scenario& s) {
  const Dims& d = a.dims;
  PayoffBreakdown out;
  for (int u = 0; u < d.U; ++u) out.user.push_back(user_payoff(u, a, p, r, s));
  for (int n = 0; n < d.N; ++n) {
    out.bs_buyer.push_back(bs_buyer_payoff(n, a, p, r, s));
    out.bs_seller.push_back(seller_payoff(SellerKind::BS, n, a, p));
  }
  for (int m = 0; m < d.M; ++m) out.mbs.push_back(seller_payoff(SellerKind::MBS, m, a, p));
  out.satellite = seller_payoff(SellerKind::Satellite, 0, a, p);
  double total = out.satellite;
  for (double v : out.user) total += v;
  for (int n = 0; n < d.N; ++n) total += out.bs_buyer[n] + out.bs_seller[n];
  for (double v : out.mbs) total += v;
  out.total = total;
  return out;
}

double total_payoff(const AllocationState& a, const RateTable& r, const Scenario& s) {
  if (!a.cleared()) throw std::logic_error("total_payoff: market not cleared");
  const Dims& d = a.dims;
  const double cost = 1.0 / d.T;
  double j = 0.0;
  for (int u = 0; u < d.U; ++u) {
    double rate = 0.0;
    for (int n = 0; n < d.N; ++n)
      for (int t = 0; t < d.T; ++t)
        if (a.theta[a.iu(n, u, t)]) rate += r.a(n, u);
    j += rate / (d.T * s.demand.user_rate_floor[u]);
  }
  for (auto x : a.rho) j -= x * cost;
  for (int n = 0; n < d.N; ++n) {
    double rate = 0.0;
    for (int t = 0; t < d.T; ++t) {
      for (int m = 0; m < d.M; ++m)
        if (a.phi[a.im(n, m, t)]) rate += r.b(n, m);
      if (a.eps[a.is(n, t)]) rate += r.s(n, t);
    }
    j += rate / (d.T * s.demand.bs_rate_floor[n]);
  }
  for (auto x : a.delta) j -= x * cost;
  for (auto x : a.beta) j -= x * cost;
  return j;
}

bool ConstraintReport::all_ok() const {
  for (const auto& f : families)
    if (!f.ok) return false;
  return true;
}

json ConstraintReport::to_json() const {
  json j = json::object();
  for (const auto& f : families) {
    json e = {{"ok", f.ok}};
    if (!f.ok) e["first_violation"] = f.first_violation;
    j[std::string(1, f.id)] = e;
  }
  j["all_ok"] = all_ok();
  return j;
}

namespace {

std::string idx(std::initializer_list<std::pair<const char*, int>> parts) {
  std::string out;
  for (const auto& [k, v] : parts) {
    if (!out.empty()) out += ',';
    out += k;
    out += '=';
    out += std::to_string(v);
  }
  return out;
}

}  // namespace

ConstraintReport check_constraints(const AllocationState& a, const RateTable& r, const Scenario& s) {
  ConstraintReport rep;
  for (int i = 0; i < 19; ++i) rep.families[i].id = static_cast<char>('a' + i);
  auto flag = [&](char id, const std::string& where) {
    ConstraintFamily& f = rep.families[id - 'a'];
    if (f.ok) {
      f.ok = false;
      f.first_violation = where;
    }
  };
  const Dims& d = a.dims;
  const double tau = s.time.tau;
  const int T_S = s.nodes.satellite_enabled ? d.T : 0;

  for (int u = 0; u < d.U; ++u) {
    double bits = 0.0, rate = 0.0;
    for (int n = 0; n < d.N; ++n)
      for (int t = 0; t < d.T; ++t)
        if (a.theta[a.iu(n, u, t)]) {
          bits += r.a(n, u) * tau;
          rate += r.a(n, u);
        }
    if (bits < s.demand.data_demand[u]) flag('a', idx({{"u", u}}));
    if (rate / d.T < s.demand.user_rate_floor[u]) flag('n', idx({{"u", u}}));
  }

  for (int n = 0; n < d.N; ++n) {
    int sold = 0;
    double balance = 0.0, scale = 0.0, backhaul_rate = 0.0;
    for (int t = 0; t < d.T; ++t) {
      int used = 0, buys = 0;
      double out = 0.0, in = 0.0;
      for (int u = 0; u < d.U; ++u)
        if (a.rho[a.iu(n, u, t)]) {
          ++used;
          ++sold;
          out += r.a(n, u) * tau;
          if (t >= s.Tn(n)) flag('k', idx({{"n", n}, {"u", u}, {"t", t}}));
        }
      for (int m = 0; m < d.M; ++m)
        if (a.phi[a.im(n, m, t)]) {
          ++used;
          ++buys;
          in += r.b(n, m) * tau;
          backhaul_rate += r.b(n, m);
          if (t >= s.Tn(n)) flag('l', idx({{"n", n}, {"m", m}, {"t", t}}));
        }
      if (a.eps[a.is(n, t)]) {
        ++used;
        ++buys;
        in += r.s(n, t) * tau;
        backhaul_rate += r.s(n, t);
        if (t >= s.Tn(n)) flag('m', idx({{"n", n}, {"t", t}}));
      }
      if (used > 1) flag('b', idx({{"n", n}, {"t", t}}));
      if (buys > 1) flag('h', idx({{"n", n}, {"t", t}}));
      balance += out - in;
      scale += out + in;
      if (balance > 1e-12 * scale) flag('c', idx({{"n", n}, {"t", t}}));
    }
    if (sold > s.Tn(n)) flag('d', idx({{"n", n}}));
    if (backhaul_rate / d.T < s.demand.bs_rate_floor[n]) flag('o', idx({{"n", n}}));
  }

  for (int m = 0; m < d.M; ++m) {
    int total = 0;
    for (int t = 0; t < d.T; ++t) {
      int c = 0;
      for (int n = 0; n < d.N; ++n) c += a.delta[a.im(n, m, t)] ? 1 : 0;
      total += c;
      if (c > 1) flag('i', idx({{"m", m}, {"t", t}}));
    }
    if (total > d.T) flag('e', idx({{"m", m}}));
  }
  {
    int total = 0;
    for (int t = 0; t < d.T; ++t) {
      int c = 0;
      for (int n = 0; n < d.N; ++n) c += a.beta[a.is(n, t)] ? 1 : 0;
      total += c;
      if (c > 1) flag('j', idx({{"t", t}}));
    }
    if (total > T_S) flag('f', idx({{"count", total}}));
  }

  for (int u = 0; u < d.U; ++u)
    for (int t = 0; t < d.T; ++t) {
      int c = 0;
      for (int n = 0; n < d.N; ++n) c += a.theta[a.iu(n, u, t)] ? 1 : 0;
      if (c > 1) flag('g', idx({{"u", u}, {"t", t}}));
    }

  auto binary = [&](char id, const std::vector<std::uint8_t>& x, const char* name) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > 1) {
        flag(id, std::string(name) + "[" + std::to_string(i) + "]");
        return;
      }
  };
  binary('p', a.rho, "rho");
  binary('p', a.theta, "theta");
  binary('q', a.delta, "delta");
  binary('q', a.phi, "phi");
  binary('r', a.beta, "beta");
  binary('r', a.eps, "eps");

  auto clear = [&](const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y, const char* name) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] != y[i]) {
        flag('s', std::string(name) + "[" + std::to_string(i) + "]");
        return;
      }
  };
  clear(a.rho, a.theta, "rho");
  clear(a.delta, a.phi, "delta");
  clear(a.beta, a.eps, "beta");
  return rep;
}

namespace {

json bits(const std::vector<std::uint8_t>& v) {
  json j = json::array();
  for (auto x : v) j.push_back(static_cast<int>(x));
  return j;
}

std::vector<std::uint8_t> unbits(const json& j, const char* key, std::size_t size) {
  if (!j.contains(key) || !j.at(key).is_array()) throw std::invalid_argument(std::string("allocation: missing ") + key);
  const json& a = j.at(key);
  if (a.size() != size) throw std::invalid_argument(std::string("allocation: wrong size for ") + key);
  std::vector<std::uint8_t> out;
  for (const auto& e : a) {
    const int v = e.get<int>();
    if (v < 0 || v > 255) throw std::invalid_argument(std::string("allocation: bad entry in ") + key);
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

json reals(const std::vector<double>& v) {
  json j = json::array();
  for (double x : v) j.push_back(round12(x));
  return j;
}

}  // namespace

json to_json(const AllocationState& a) {
  return {{"N", a.dims.N}, {"U", a.dims.U},        {"M", a.dims.M},      {"T", a.dims.T},
          {"rho", bits(a.rho)}, {"theta", bits(a.theta)}, {"delta", bits(a.delta)},
          {"phi", bits(a.phi)}, {"beta", bits(a.beta)},   {"eps", bits(a.eps)}};
}

AllocationState allocation_from_json(const json& j) {
  Dims d{j.at("N").get<int>(), j.at("U").get<int>(), j.at("M").get<int>(), j.at("T").get<int>()};
  AllocationState a = AllocationState::zeros(d);
  a.rho = unbits(j, "rho", a.rho.size());
  a.theta = unbits(j, "theta", a.theta.size());
  a.delta = unbits(j, "delta", a.delta.size());
  a.phi = unbits(j, "phi", a.phi.size());
  a.beta = unbits(j, "beta", a.beta.size());
  a.eps = unbits(j, "eps", a.eps.size());
  return a;
}

json to_json(const PriceState& p) {
  return {{"lambda", reals(p.lambda)}, {"varsigma", reals(p.varsigma)}, {"xi", reals(p.xi)}, {"k", p.k}};
}

json to_json(const PayoffBreakdown& p) {
  return {{"user", reals(p.user)},
          {"bs_buyer", reals(p.bs_buyer)},
          {"bs_seller", reals(p.bs_seller)},
          {"mbs", reals(p.mbs)},
          {"satellite", round12(p.satellite)},
          {"total", round12(p.total)}};
}

}  // namespace isdn
