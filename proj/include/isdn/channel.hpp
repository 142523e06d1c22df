#pragma once

#include <ostream>
#include <vector>

#include "isdn/scenario.hpp"

namespace isdn {

enum class NodeKind { User, BS, MBS, Satellite };

struct NodeRef {
  NodeKind kind;
  int index = 0;
};

// Serving links are boresight-aligned; interfering links use average gains.
enum class GainMode { Serving, Interfering };

struct LinkGain {
  double gain = 0.0;
  bool los = false;
  double distance = 0.0;
};

double antenna_gain(double offset, double beamwidth, double main, double side);
double average_interferer_gain(double beamwidth, double main, double side);

// Supported directions: BS->User, MBS->User, BS->BS, MBS->BS, Satellite->BS.
// slot only matters for the satellite.
LinkGain channel_gain(NodeRef tx, NodeRef rx, const Scenario& s, GainMode mode = GainMode::Serving, int slot = 0);

struct Interference {
  std::vector<double> access;    // [n*U+u]
  std::vector<double> backhaul;  // [n*M+m]
  std::vector<double> sat;       // [n]
};

Interference static_interference(const Scenario& s);

struct RateTable {
  int N = 0, U = 0, M = 0, T = 0;
  std::vector<double> access;          // [n*U+u] bit/s
  std::vector<double> backhaul;        // [n*M+m]
  std::vector<double> satellite;       // [n*T+t]
  std::vector<double> access_sinr;     // linear, same layouts
  std::vector<double> backhaul_sinr;
  std::vector<double> satellite_sinr;
  Interference omega;

  double a(int n, int u) const { return access[n * U + u]; }
  double b(int n, int m) const { return backhaul[n * M + m]; }
  double s(int n, int t) const { return satellite[n * T + t]; }
};

RateTable build_rate_table(const Scenario& s);

enum class SatelliteRateMode { Exact, Drift };

// Estimated change of the satellite rate of BS n from slot t-1 to slot t.
double satellite_rate_drift(int n, int t, const RateTable& rates, const Scenario& s);

// Satellite rate of BS n at slot t as a BS perceives it: exact, or the
// previous slot's exact rate plus the drift estimate.
double perceived_satellite_rate(int n, int t, const RateTable& rates, const Scenario& s, SatelliteRateMode mode);

// kind,from,to,slot,rate_bps,sinr_db
void write_rates_csv(std::ostream& out, const RateTable& rates);

}  // namespace isdn
