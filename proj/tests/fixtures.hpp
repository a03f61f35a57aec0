#pragma once

// Hand-built instances shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "drsync/instance.hpp"

namespace fx {

using namespace drsync;

inline Instance blank(const std::string& name, ExchangePolicy p = ExchangePolicy::regular_and_intermediate) {
  Instance inst;
  inst.name = name;
  inst.theta_tw = 10;
  inst.zeta = 10;
  inst.ell = 10;
  inst.exchange_policy = p;
  return inst;
}

inline void stop(Instance& inst, const std::string& id, StopKind k = StopKind::customer) {
  if (inst.stop_index(id) < 0) inst.stops.push_back({id, k, id});
}

inline void ride(Instance& inst, const std::string& id, const std::string& line, std::vector<std::string> stops,
                 std::vector<Minutes> deps, std::vector<Minutes> drive,
                 std::vector<std::vector<StationAccess>> stations = {}) {
  for (const auto& s : stops) stop(inst, s);
  if (stations.empty()) stations.resize(drive.size());
  for (const auto& seg : stations) {
    for (const auto& a : seg) stop(inst, a.station, StopKind::station);
  }
  inst.rides.push_back({id, line, std::move(stops), std::move(deps), std::move(drive), std::move(stations), {}});
}

/// One segment I -> J (60 min) with station S (30 in, 35 out): the two-copy
/// picture with a single station copy.
inline Instance fig2() {
  Instance inst = blank("fig2");
  ride(inst, "R1", "L1", {"I", "J"}, {480, 540}, {60}, {{{"S", 30, 35}}});
  return inst;
}

/// Two rides at one terminal, 60 minutes apart.
inline Instance sequential_two() {
  Instance inst = blank("sequential");
  ride(inst, "R1", "L1", {"A", "B"}, {480, 600}, {120});
  ride(inst, "R2", "L1", {"B", "A"}, {660, 780}, {120});
  return inst;
}

/// Three rides on the road at the same time.
inline Instance three_parallel() {
  Instance inst = blank("parallel");
  for (int i = 0; i < 3; ++i) {
    const std::string n = std::to_string(i);
    ride(inst, "R" + n, "L" + n, {"A" + n, "B" + n}, {480, 600}, {120});
  }
  return inst;
}

/// k rides far apart in time on disjoint stops: no driver can get from one
/// to the next, so the optimum is k while both constructive bounds say 1.
inline Instance gap(int k) {
  Instance inst = blank("gap-" + std::to_string(k));
  for (int i = 0; i < k; ++i) {
    const std::string n = std::to_string(i);
    ride(inst, "R" + n, "L" + n, {"P" + n, "Q" + n}, {480 + 120 * i, 540 + 120 * i}, {60});
  }
  return inst;
}

/// R2 leaves H five minutes before R1 can reach it unless R2 is postponed.
inline Instance handoff() {
  Instance inst = blank("handoff");
  ride(inst, "R1", "L1", {"A", "H"}, {485, 545}, {60});
  ride(inst, "R2", "L2", {"H", "C"}, {540, 600}, {60});
  return inst;
}

/// Two opposite rides through a shared hub under tight hours; a driver who
/// may change buses at the hub saves one driver.
inline Instance exchange(ExchangePolicy p = ExchangePolicy::regular_and_intermediate) {
  Instance inst = blank("exchange", p);
  inst.legal = {60, 20, 150, 300};
  ride(inst, "R1", "L1", {"A", "H", "B"}, {480, 540, 600}, {55, 55});
  ride(inst, "R2", "L1", {"B", "H", "A"}, {500, 560, 620}, {55, 55});
  return inst;
}

/// Lots of sequential steering: lb1 = 2 > lb2 = 1.
inline Instance steering_heavy() {
  Instance inst = blank("steering-heavy");
  inst.legal = {60, 20, 150, 400};
  ride(inst, "R1", "L1", {"A", "B"}, {480, 540}, {60});
  ride(inst, "R2", "L1", {"B", "A"}, {560, 620}, {60});
  ride(inst, "R3", "L1", {"A", "B"}, {640, 700}, {60});
  return inst;
}

/// 300 direct minutes, t_cs 270, no station.
inline Instance impossible() {
  Instance inst = blank("impossible");
  ride(inst, "R1", "L1", {"A", "B"}, {480, 780}, {300});
  return inst;
}

/// A 400-minute segment that only a midway station makes drivable.
inline Instance long_segment() {
  Instance inst = blank("long-segment");
  ride(inst, "R1", "L1", {"A", "B"}, {480, 880}, {400}, {{{"X", 200, 205}}});
  return inst;
}

}  // namespace fx
