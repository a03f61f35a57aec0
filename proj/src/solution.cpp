#include "drsync/solution.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "drsync/legality.hpp"
#include "json.hpp"

namespace drsync {

namespace {

bool has_steering(const std::vector<int>& route, const TimeGraph& g) {
  return std::any_of(route.begin(), route.end(), [&](int a) { return g.arc(a).mode == 1; });
}

// First and last timed node of a route.
std::pair<Minutes, Minutes> route_span(const std::vector<int>& route, const TimeGraph& g) {
  const Minutes start = g.node(g.arc(route.front()).to).time;
  const Minutes end = g.node(g.arc(route.back()).from).time;
  return {start, end};
}

}  // namespace

int objective(const Solution& s, const TimeGraph& g) {
  return static_cast<int>(std::count_if(s.routes.begin(), s.routes.end(),
                                        [&](const auto& r) { return has_steering(r, g); }));
}

Minutes theta(const Solution& s, const TimeGraph& g, const LegalParams& legal) {
  Minutes total = 0;
  for (const auto& r : s.routes) {
    if (!has_steering(r, g)) continue;
    auto [start, end] = route_span(r, g);
    total += legal.t_dw - (end - start);
  }
  return total;
}

std::uint64_t solution_hash(const Solution& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const auto& r : s.routes) {
    mix(0xFFFFFFFFULL);
    for (int a : r) mix(static_cast<std::uint64_t>(a));
  }
  return h;
}

std::vector<std::vector<int>> bus_routes(const Solution& s, const TimeGraph& g) {
  std::vector<std::vector<int>> out(g.ride_count());
  for (const auto& r : s.routes) {
    for (int a : r) {
      const auto& arc = g.arc(a);
      if (arc.mode == 1) out[arc.ride].push_back(a);
    }
  }
  for (auto& bus : out) {
    std::sort(bus.begin(), bus.end(), [&](int a, int b) {
      const auto &x = g.arc(a), &y = g.arc(b);
      if (g.node(x.from).time != g.node(y.from).time) return g.node(x.from).time < g.node(y.from).time;
      return a < b;
    });
    bus.erase(std::unique(bus.begin(), bus.end()), bus.end());
  }
  return out;
}

std::vector<std::vector<Minutes>> departure_times(const Solution& s, const TimeGraph& g) {
  const auto buses = bus_routes(s, g);
  std::vector<std::vector<Minutes>> out(buses.size());
  for (std::size_t r = 0; r < buses.size(); ++r) {
    out[r].assign(g.stop_count(static_cast<int>(r)), -1);
    for (int a : buses[r]) {
      const auto& arc = g.arc(a);
      if (arc.leg != LegKind::from_station) out[r][arc.segment] = g.node(arc.from).time;
      if (arc.leg != LegKind::to_station) out[r][arc.segment + 1] = g.node(arc.to).time;
    }
  }
  return out;
}

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::uncovered_segment: return "uncovered_segment";
    case Violation::Kind::continuous_steering: return "continuous_steering";
    case Violation::Kind::daily_steering: return "daily_steering";
    case Violation::Kind::daily_working: return "daily_working";
    case Violation::Kind::break_too_short: return "break_too_short";
    case Violation::Kind::desync: return "desync";
    case Violation::Kind::detour: return "detour";
  }
  return "?";
}

}  // namespace drsync

namespace drsync {

std::vector<Violation> check_feasibility(const Solution& s, const Instance& inst, const TimeGraph& g) {
  using K = Violation::Kind;
  const int n_arcs = static_cast<int>(g.arcs().size());
  std::vector<std::string> structural;
  for (std::size_t k = 0; k < s.routes.size(); ++k) {
    const auto& route = s.routes[k];
    const std::string who = "driver " + std::to_string(k);
    if (route.empty()) {
      structural.push_back(who + ": empty route");
      continue;
    }
    bool ids_ok = true;
    for (int a : route) {
      if (a < 0 || a >= n_arcs) {
        structural.push_back(who + ": unknown arc " + std::to_string(a));
        ids_ok = false;
      }
    }
    if (!ids_ok) continue;
    if (g.arc(route.front()).from != TimeGraph::kSource) structural.push_back(who + ": does not start at the depot");
    if (g.arc(route.back()).to != TimeGraph::kSink) structural.push_back(who + ": does not return to the depot");
    for (std::size_t i = 1; i < route.size(); ++i) {
      if (g.arc(route[i - 1]).to != g.arc(route[i]).from) {
        structural.push_back(who + ": dangling arc " + std::to_string(route[i]));
      }
    }
  }
  if (!structural.empty()) {
    std::string msg = "malformed routes:";
    for (const auto& e : structural) msg += "\n  " + e;
    throw StructuralError(msg);
  }

  std::vector<Violation> out;
  const auto& L = inst.legal;
  std::vector<int> steered(n_arcs, 0);
  for (const auto& route : s.routes) {
    for (int a : route) {
      if (g.arc(a).mode == 1) ++steered[a];
    }
  }
  for (int a = 0; a < n_arcs; ++a) {
    if (steered[a] > 1) {
      out.push_back({K::desync, "ride " + inst.rides[g.arc(a).ride].id + " leg " + std::to_string(a), steered[a] - 1});
    }
  }

  // Bus paths: one consistent chain of steering arcs per ride.
  const std::size_t n_rides = std::min(inst.rides.size(), g.ride_count());
  std::vector<int> ride_first(n_rides, -1), ride_last(n_rides, -1);
  for (std::size_t r = 0; r < n_rides; ++r) {
    const auto& ride = inst.rides[r];
    int prev_end = -1;
    bool chain_ok = true;
    for (std::size_t seg = 0; seg < ride.segment_count(); ++seg) {
      std::vector<int> used;
      for (int a : g.segment_arcs(static_cast<int>(r), static_cast<int>(seg))) {
        if (steered[a] > 0) used.push_back(a);
      }
      const std::string where = "ride " + ride.id + " segment " + std::to_string(seg);
      int start = -1, end = -1;
      if (used.empty()) {
        out.push_back({K::uncovered_segment, where, ride.segment_minutes[seg]});
        chain_ok = false;
        continue;
      }
      if (used.size() == 1 && g.arc(used[0]).leg == LegKind::direct) {
        start = g.arc(used[0]).from;
        end = g.arc(used[0]).to;
      } else if (used.size() == 2) {
        const auto &x = g.arc(used[0]), &y = g.arc(used[1]);
        const TimedArc* in = x.leg == LegKind::to_station ? &x : (y.leg == LegKind::to_station ? &y : nullptr);
        const TimedArc* outa = x.leg == LegKind::from_station ? &x : (y.leg == LegKind::from_station ? &y : nullptr);
        if (in && outa && in->to == outa->from) {
          start = in->from;
          end = outa->to;
        }
      }
      if (start < 0) {
        out.push_back({K::desync, where + ": bus path is not a single chain", static_cast<Minutes>(used.size())});
        chain_ok = false;
        continue;
      }
      if (prev_end >= 0 && prev_end != start) {
        out.push_back({K::desync, where + ": departure differs from arrival",
                       std::abs(g.node(start).time - g.node(prev_end).time)});
        chain_ok = false;
      }
      if (seg == 0) ride_first[r] = start;
      prev_end = end;
      for (int a : used) {
        const auto& arc = g.arc(a);
        if (arc.leg != LegKind::to_station) continue;
        for (const auto& acc : ride.stations[seg]) {
          if (inst.stop_index(acc.station) != arc.station) continue;
          const Minutes detour = acc.in_minutes + acc.out_minutes - ride.segment_minutes[seg];
          if (detour > inst.zeta) out.push_back({K::detour, where + " via " + acc.station, detour - inst.zeta});
        }
      }
    }
    if (chain_ok) ride_last[r] = prev_end;
  }

  for (std::size_t k = 0; k < s.routes.size(); ++k) {
    const auto& route = s.routes[k];
    const std::string who = "driver " + std::to_string(k);
    for (int a : route) {
      const auto& arc = g.arc(a);
      if (arc.family == ArcFamily::deadhead && steered[arc.twin] == 0) {
        out.push_back({K::desync, who + ": deadheads on an unused leg " + std::to_string(a), arc.duration});
      }
    }
    if (inst.exchange_policy == ExchangePolicy::none) {
      // Drivers may only join a bus at its first stop and leave at its last.
      std::size_t i = 0;
      while (i < route.size()) {
        const int ride = g.arc(route[i]).ride;
        if (ride < 0) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j + 1 < route.size() && g.arc(route[j + 1]).ride == ride) ++j;
        const bool whole = static_cast<std::size_t>(ride) < n_rides && g.arc(route[i]).from == ride_first[ride] &&
                           g.arc(route[j]).to == ride_last[ride];
        if (!whole) out.push_back({K::desync, who + ": changes bus mid-ride " + inst.rides[ride].id, 1});
        i = j + 1;
      }
    }

    if (!std::any_of(route.begin(), route.end(), [&](int a) { return g.arc(a).mode == 1; })) continue;
    Minutes cont = 0, total = 0, last_end = -1;
    for (int a : route) {
      const auto& arc = g.arc(a);
      if (arc.mode != 1) continue;
      const Minutes from = g.node(arc.from).time;
      const Minutes gap = last_end < 0 ? -1 : from - last_end;
      if (last_end < 0 || gap >= L.t_b) cont = 0;
      cont += arc.duration;
      total += arc.duration;
      if (cont > L.t_cs) {
        if (gap > 0 && gap < L.t_b) out.push_back({K::break_too_short, who, L.t_b - gap});
        else out.push_back({K::continuous_steering, who, cont - L.t_cs});
      }
      last_end = g.node(arc.to).time;
    }
    if (total > L.t_ds) out.push_back({K::daily_steering, who, total - L.t_ds});
    auto [start, end] = route_span(route, g);
    if (end - start > L.t_dw) out.push_back({K::daily_working, who, end - start - L.t_dw});
  }
  return out;
}

std::string solution_to_json(const Solution& s, const Instance& inst, const TimeGraph& g) {
  using nlohmann::json;
  auto label = [&](int node) {
    const auto& n = g.node(node);
    if (n.is_source) return std::string("source");
    if (n.is_sink) return std::string("sink");
    return g.location_name(n.location) + "@" + std::to_string(n.time);
  };
  auto family = [](ArcFamily f) {
    switch (f) {
      case ArcFamily::depot: return "depot";
      case ArcFamily::steering: return "steering";
      case ArcFamily::deadhead: return "deadhead";
      case ArcFamily::waiting: return "waiting";
    }
    return "?";
  };
  json j;
  j["schema"] = "drsync-solution/1";
  j["objective"] = objective(s, g);
  j["theta"] = theta(s, g, inst.legal);
  j["drivers"] = json::array();
  for (std::size_t k = 0; k < s.routes.size(); ++k) {
    const auto& route = s.routes[k];
    json jd;
    jd["driver"] = k;
    jd["arcs"] = route;
    json legs = json::array();
    for (int a : route) {
      const auto& arc = g.arc(a);
      if (arc.family == ArcFamily::depot) continue;
      json jl = {{"family", family(arc.family)}, {"from", label(arc.from)}, {"to", label(arc.to)}};
      if (arc.ride >= 0) jl["ride"] = inst.rides[arc.ride].id;
      legs.push_back(jl);
    }
    jd["legs"] = legs;
    j["drivers"].push_back(jd);
  }
  j["buses"] = json::array();
  const auto buses = bus_routes(s, g);
  const auto times = departure_times(s, g);
  for (std::size_t r = 0; r < buses.size(); ++r) {
    json jb;
    jb["ride"] = inst.rides[r].id;
    json path = json::array();
    if (!buses[r].empty()) path.push_back(label(g.arc(buses[r].front()).from));
    for (int a : buses[r]) path.push_back(label(g.arc(a).to));
    jb["path"] = path;
    jb["departures"] = times[r];
    j["buses"].push_back(jb);
  }
  return j.dump(2) + "\n";
}

}  // namespace drsync
