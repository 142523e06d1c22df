#include "isdn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isdn/format.hpp"

namespace isdn {

double antenna_gain(double offset, double beamwidth, double main, double side) {
  if (offset < 0.0) throw std::invalid_argument("antenna_gain: negative offset angle");
  return offset <= beamwidth / 2.0 ? main : side;
}

double average_interferer_gain(double beamwidth, double main, double side) {
  const double f = beamwidth / (2.0 * std::numbers::pi);
  return f * main + (1.0 - f) * side;
}

namespace {

Vec3 position(NodeRef r, const Scenario& s, int slot) {
  switch (r.kind) {
    case NodeKind::User: return s.nodes.users.at(r.index);
    case NodeKind::BS: return s.bs_position(r.index);
    case NodeKind::MBS: return s.nodes.macro_cells.at(r.index);
    case NodeKind::Satellite: return s.satellite_at(slot);
  }
  return {};
}

double pathloss_factor(const RadioParams& r, double d, double chi) {
  const double l2 = r.pathloss_intercept_db + r.pathloss_alpha * std::log10(d) + chi;
  return r.rician_l1 * std::pow(10.0, -l2 / 10.0);
}

}  // namespace

LinkGain channel_gain(NodeRef tx, NodeRef rx, const Scenario& s, GainMode mode, int slot) {
  const int U = s.U(), N = s.N();
  const ChannelDraws& d = s.draws;
  double chi = 0.0;
  bool los = false;
  if (tx.kind == NodeKind::BS && rx.kind == NodeKind::User) {
    chi = d.chi_bs_user.at(tx.index * U + rx.index);
    los = d.los_bs_user.at(tx.index * U + rx.index);
  } else if (tx.kind == NodeKind::MBS && rx.kind == NodeKind::User) {
    chi = d.chi_mbs_user.at(tx.index * U + rx.index);
    los = d.los_mbs_user.at(tx.index * U + rx.index);
  } else if (tx.kind == NodeKind::BS && rx.kind == NodeKind::BS) {
    if (tx.index == rx.index) throw std::invalid_argument("channel_gain: tx equals rx");
    chi = d.chi_bs_bs.at(tx.index * N + rx.index);
    los = d.los_bs_bs.at(tx.index * N + rx.index);
  } else if (tx.kind == NodeKind::MBS && rx.kind == NodeKind::BS) {
    chi = d.chi_mbs_bs.at(tx.index * N + rx.index);
    los = d.los_mbs_bs.at(tx.index * N + rx.index);
  } else if (tx.kind == NodeKind::Satellite && rx.kind == NodeKind::BS) {
    chi = d.chi_sat_bs.at(rx.index);
    los = d.los_sat_bs.at(rx.index);
  } else {
    throw std::invalid_argument("channel_gain: unsupported link direction");
  }

  LinkGain g;
  g.distance = distance(position(tx, s, slot), position(rx, s, slot));
  if (g.distance == 0.0) throw std::invalid_argument("channel_gain: coincident positions");
  g.los = los;
  if (!los) return g;
  const RadioParams& r = s.radio;
  double gm, gr;
  if (mode == GainMode::Serving) {
    gm = r.q_mm;
    gr = r.q_rm;
  } else {
    gm = average_interferer_gain(r.kappa_t, r.q_mm, r.q_ms);
    gr = average_interferer_gain(r.kappa_r, r.q_rm, r.q_rs);
  }
  g.gain = pathloss_factor(r, g.distance, chi) * gm * gr;
  return g;
}

Interference static_interference(const Scenario& s) {
  const int U = s.U(), N = s.N(), M = s.M();
  const RadioParams& r = s.radio;
  const auto I = GainMode::Interfering;
  // received interfering power at each user / BS from each transmitter
  std::vector<double> bs_at_user(N * U), mbs_at_user(M * U), bs_at_bs(N * N, 0.0), mbs_at_bs(M * N);
  for (int i = 0; i < N; ++i)
    for (int u = 0; u < U; ++u)
      bs_at_user[i * U + u] = r.p_bs * channel_gain({NodeKind::BS, i}, {NodeKind::User, u}, s, I).gain;
  for (int j = 0; j < M; ++j)
    for (int u = 0; u < U; ++u)
      mbs_at_user[j * U + u] = r.p_mbs * channel_gain({NodeKind::MBS, j}, {NodeKind::User, u}, s, I).gain;
  for (int i = 0; i < N; ++i)
    for (int n = 0; n < N; ++n)
      if (i != n) bs_at_bs[i * N + n] = r.p_bs * channel_gain({NodeKind::BS, i}, {NodeKind::BS, n}, s, I).gain;
  for (int j = 0; j < M; ++j)
    for (int n = 0; n < N; ++n)
      mbs_at_bs[j * N + n] = r.p_mbs * channel_gain({NodeKind::MBS, j}, {NodeKind::BS, n}, s, I).gain;

  Interference out;
  out.access.assign(N * U, 0.0);
  out.backhaul.assign(N * M, 0.0);
  out.sat.assign(N, 0.0);
  for (int n = 0; n < N; ++n) {
    for (int u = 0; u < U; ++u) {
      double acc = 0.0;
      for (int i = 0; i < N; ++i)
        if (i != n) acc += bs_at_user[i * U + u];
      for (int j = 0; j < M; ++j) acc += mbs_at_user[j * U + u];
      out.access[n * U + u] = acc;
    }
    double from_bs = 0.0, from_mbs = 0.0;
    for (int i = 0; i < N; ++i)
      if (i != n) from_bs += bs_at_bs[i * N + n];
    for (int j = 0; j < M; ++j) from_mbs += mbs_at_bs[j * N + n];
    for (int m = 0; m < M; ++m) out.backhaul[n * M + m] = from_bs + (from_mbs - mbs_at_bs[m * N + n]);
    out.sat[n] = from_bs + from_mbs;
  }
  return out;
}

RateTable build_rate_table(const Scenario& s) {
  RateTable rt;
  rt.N = s.N();
  rt.U = s.U();
  rt.M = s.M();
  rt.T = s.T();
  const RadioParams& r = s.radio;
  rt.omega = static_interference(s);
  rt.access.assign(rt.N * rt.U, 0.0);
  rt.access_sinr.assign(rt.N * rt.U, 0.0);
  rt.backhaul.assign(rt.N * rt.M, 0.0);
  rt.backhaul_sinr.assign(rt.N * rt.M, 0.0);
  rt.satellite.assign(rt.N * rt.T, 0.0);
  rt.satellite_sinr.assign(rt.N * rt.T, 0.0);
  for (int n = 0; n < rt.N; ++n) {
    for (int u = 0; u < rt.U; ++u) {
      const double h = channel_gain({NodeKind::BS, n}, {NodeKind::User, u}, s).gain;
      const double g = r.p_bs * h / (rt.omega.access[n * rt.U + u] + r.noise);
      rt.access_sinr[n * rt.U + u] = g;
      rt.access[n * rt.U + u] = r.bw_terrestrial * std::log2(1.0 + g);
    }
    for (int m = 0; m < rt.M; ++m) {
      const double h = channel_gain({NodeKind::MBS, m}, {NodeKind::BS, n}, s).gain;
      const double g = r.p_mbs * h / (rt.omega.backhaul[n * rt.M + m] + r.noise);
      rt.backhaul_sinr[n * rt.M + m] = g;
      rt.backhaul[n * rt.M + m] = r.bw_terrestrial * std::log2(1.0 + g);
    }
    if (!s.nodes.satellite_enabled) continue;
    for (int t = 0; t < rt.T; ++t) {
      const double h = channel_gain({NodeKind::Satellite, 0}, {NodeKind::BS, n}, s, GainMode::Serving, t).gain;
      const double g = r.p_sat * h / (rt.omega.sat[n] + r.cochannel + r.noise);
      rt.satellite_sinr[n * rt.T + t] = g;
      rt.satellite[n * rt.T + t] = r.bw_satellite * std::log2(1.0 + g);
    }
  }
  return rt;
}

double satellite_rate_drift(int n, int t, const RateTable& rates, const Scenario& s) {
  if (t <= 0) throw std::invalid_argument("satellite_rate_drift: slot 0 has no predecessor");
  if (!s.nodes.satellite_enabled) return 0.0;
  const RadioParams& r = s.radio;
  const Vec3 bs = s.bs_position(n);
  const Vec3 sat = s.satellite_at(t);
  const double d = distance(sat, bs);
  const double chi = s.draws.chi_sat_bs[n];
  const double g = std::pow(10.0, -(r.pathloss_intercept_db + r.pathloss_alpha * std::log10(d) + chi) / 10.0);
  const double pp = r.p_sat * r.rician_l1 * r.q_mm * r.q_rm / (rates.omega.sat[n] + r.cochannel + r.noise);
  const double v = s.nodes.satellite_speed, tau = s.time.tau;
  // d/dt of d(t) per slot: (x0 - x_n + v t tau) v tau / d
  const double ddot = (s.nodes.satellite_initial.x - bs.x + v * t * tau) * v * tau;
  return -r.pathloss_alpha * r.bw_satellite * pp * ddot * g / (10.0 * std::numbers::ln2 * (1.0 + pp * g) * d * d);
}

double perceived_satellite_rate(int n, int t, const RateTable& rates, const Scenario& s, SatelliteRateMode mode) {
  if (mode == SatelliteRateMode::Exact || t == 0) return rates.s(n, t);
  return std::max(0.0, rates.s(n, t - 1) + satellite_rate_drift(n, t, rates, s));
}

void write_rates_csv(std::ostream& out, const RateTable& rt) {
  out << "kind,from,to,slot,rate_bps,sinr_db\n";
  auto sinr_db = [](double g) { return g > 0.0 ? fmt12(linear_to_db(g)) : std::string("-inf"); };
  for (int n = 0; n < rt.N; ++n)
    for (int u = 0; u < rt.U; ++u)
      out << "access," << n << ',' << u << ",-1," << fmt12(rt.a(n, u)) << ',' << sinr_db(rt.access_sinr[n * rt.U + u])
          << '\n';
  for (int n = 0; n < rt.N; ++n)
    for (int m = 0; m < rt.M; ++m)
      out << "terrestrial_backhaul," << m << ',' << n << ",-1," << fmt12(rt.b(n, m)) << ','
          << sinr_db(rt.backhaul_sinr[n * rt.M + m]) << '\n';
  for (int n = 0; n < rt.N; ++n)
    for (int t = 0; t < rt.T; ++t)
      out << "satellite_backhaul,S," << n << ',' << t << ',' << fmt12(rt.s(n, t)) << ','
          << sinr_db(rt.satellite_sinr[n * rt.T + t]) << '\n';
}

}  // namespace isdn
