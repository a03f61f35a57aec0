#include "drsync/timegraph.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace drsync {

namespace {

Instance graph_view(const Instance& inst) {
  Instance view = filter_stations(inst);
  if (view.exchange_policy != ExchangePolicy::regular_and_intermediate) {
    for (auto& r : view.rides) {
      for (auto& seg : r.stations) seg.clear();
    }
  }
  return view;
}

const char* family_name(ArcFamily f) {
  switch (f) {
    case ArcFamily::depot: return "depot";
    case ArcFamily::steering: return "steering";
    case ArcFamily::deadhead: return "deadhead";
    case ArcFamily::waiting: return "waiting";
  }
  return "?";
}

const char* leg_name(LegKind k) {
  switch (k) {
    case LegKind::none: return "none";
    case LegKind::direct: return "direct";
    case LegKind::to_station: return "to_station";
    case LegKind::from_station: return "from_station";
  }
  return "?";
}

}  // namespace

std::string size_class_for(std::size_t arc_count) {
  if (arc_count < 1000) return "small";
  if (arc_count < 5000) return "medium";
  return "large";
}

NodeExpansion expand_nodes(const Instance& raw) {
  const Instance inst = graph_view(raw);
  NodeExpansion ex;
  ex.nodes.push_back({0, kNoLocation, 0, true, false});
  ex.nodes.push_back({1, kNoLocation, 0, false, true});
  ex.t_map.assign(inst.stops.size(), {});
  std::map<std::pair<int, Minutes>, int> index;
  auto intern = [&](int loc, Minutes t) {
    auto [it, fresh] = index.emplace(std::make_pair(loc, t), static_cast<int>(ex.nodes.size()));
    if (fresh) {
      ex.nodes.push_back({it->second, loc, t, false, false});
      ex.t_map[loc].push_back(it->second);
    }
    return it->second;
  };

  const Minutes t_cs = inst.legal.t_cs;
  for (const auto& ride : inst.rides) {
    const auto windows = ride_windows(ride, inst.theta_tw);
    const std::size_t n = ride.stops.size();
    std::vector<std::vector<Minutes>> times(n);
    for (std::size_t p = 0; p < n; ++p) {
      for (Minutes t = windows[p].e; t <= windows[p].l; t += inst.ell) times[p].push_back(t);
    }
    std::vector<std::vector<int>> copies(n);
    std::vector<std::vector<std::pair<int, int>>> stations(n - 1);
    for (std::size_t p = 0; p < n; ++p) {
      const int loc = inst.stop_index(ride.stops[p]);
      for (Minutes t : times[p]) copies[p].push_back(intern(loc, t));
      if (p + 1 == n) continue;
      for (const auto& acc : ride.stations[p]) {
        const int sloc = inst.stop_index(acc.station);
        if (acc.in_minutes > t_cs) continue;
        for (Minutes t : times[p]) {
          const Minutes ts = t + acc.in_minutes;
          const bool reaches = std::any_of(times[p + 1].begin(), times[p + 1].end(), [&](Minutes tj) {
            return tj - ts >= acc.out_minutes && tj - ts <= t_cs;
          });
          if (!reaches) continue;
          const int node = intern(sloc, ts);
          auto pr = std::make_pair(sloc, node);
          if (std::find(stations[p].begin(), stations[p].end(), pr) == stations[p].end()) {
            stations[p].push_back(pr);
          }
        }
      }
    }
    ex.stop_copies.push_back(std::move(copies));
    ex.station_copies.push_back(std::move(stations));
  }
  for (auto& list : ex.t_map) {
    std::sort(list.begin(), list.end(),
              [&](int a, int b) { return ex.nodes[a].time < ex.nodes[b].time; });
  }
  for (auto& ride : ex.stop_copies) {
    for (auto& list : ride) {
      std::sort(list.begin(), list.end(),
                [&](int a, int b) { return ex.nodes[a].time < ex.nodes[b].time; });
    }
  }
  return ex;
}

std::vector<TimedArc> build_arcs(const Instance& raw, const NodeExpansion& ex) {
  const Instance inst = graph_view(raw);
  const Minutes t_cs = inst.legal.t_cs;
  const Minutes t_b = inst.legal.t_b;
  std::vector<TimedArc> arcs;
  auto time_of = [&](int n) { return ex.nodes[n].time; };
  auto add_pair = [&](int from, int to, int ride, int seg, LegKind leg, int station) {
    TimedArc a;
    a.from = from;
    a.to = to;
    a.duration = time_of(to) - time_of(from);
    a.ride = ride;
    a.segment = seg;
    a.leg = leg;
    a.station = station;
    a.id = static_cast<int>(arcs.size());
    a.mode = 1;
    a.family = ArcFamily::steering;
    a.consumption = a.duration;
    a.twin = a.id + 1;
    arcs.push_back(a);
    a.id += 1;
    a.mode = 0;
    a.family = ArcFamily::deadhead;
    a.consumption = a.duration >= t_b ? -t_cs : 0;
    a.twin = a.id - 1;
    arcs.push_back(a);
  };

  for (std::size_t r = 0; r < inst.rides.size(); ++r) {
    const auto& ride = inst.rides[r];
    const int ri = static_cast<int>(r);
    for (std::size_t s = 0; s + 1 < ride.stops.size(); ++s) {
      const int si = static_cast<int>(s);
      const auto& pred = ex.stop_copies[r][s];
      const auto& succ = ex.stop_copies[r][s + 1];
      const Minutes direct = ride.segment_minutes[s];
      for (int i : pred) {
        for (int j : succ) {
          const Minutes d = time_of(j) - time_of(i);
          if (d >= direct && d <= t_cs) add_pair(i, j, ri, si, LegKind::direct, kNoLocation);
        }
      }
      for (const auto& acc : ride.stations[s]) {
        const int sloc = inst.stop_index(acc.station);
        std::vector<int> snodes;
        for (const auto& [loc, node] : ex.station_copies[r][s]) {
          if (loc == sloc) snodes.push_back(node);
        }
        for (int i : pred) {
          for (int sn : snodes) {
            if (time_of(sn) - time_of(i) == acc.in_minutes) {
              add_pair(i, sn, ri, si, LegKind::to_station, sloc);
            }
          }
        }
        for (int sn : snodes) {
          for (int j : succ) {
            const Minutes d = time_of(j) - time_of(sn);
            if (d >= acc.out_minutes && d <= t_cs) add_pair(sn, j, ri, si, LegKind::from_station, sloc);
          }
        }
      }
    }
  }

  for (const auto& list : ex.t_map) {
    for (std::size_t k = 1; k < list.size(); ++k) {
      TimedArc a;
      a.id = static_cast<int>(arcs.size());
      a.from = list[k - 1];
      a.to = list[k];
      a.family = ArcFamily::waiting;
      a.duration = time_of(a.to) - time_of(a.from);
      a.consumption = a.duration >= t_b ? -t_cs : 0;
      arcs.push_back(a);
    }
  }

  const int n_nodes = static_cast<int>(ex.nodes.size());
  for (int v = 2; v < n_nodes; ++v) {
    TimedArc a;
    a.id = static_cast<int>(arcs.size());
    a.from = TimeGraph::kSource;
    a.to = v;
    a.family = ArcFamily::depot;
    arcs.push_back(a);
  }
  for (int v = 2; v < n_nodes; ++v) {
    TimedArc a;
    a.id = static_cast<int>(arcs.size());
    a.from = v;
    a.to = TimeGraph::kSink;
    a.family = ArcFamily::depot;
    arcs.push_back(a);
  }
  return arcs;
}

TimeGraph assemble_graph(const Instance& inst, NodeExpansion ex, std::vector<TimedArc> arcs) {
  TimeGraph g;
  for (const auto& s : inst.stops) g.location_names_.push_back(s.id);
  g.nodes_ = std::move(ex.nodes);
  g.arcs_ = std::move(arcs);
  g.t_map_ = std::move(ex.t_map);
  g.stop_copies_ = std::move(ex.stop_copies);
  g.out_.assign(g.nodes_.size(), {});
  g.in_.assign(g.nodes_.size(), {});
  g.segment_arcs_.resize(inst.rides.size());
  for (std::size_t r = 0; r < inst.rides.size(); ++r) {
    g.segment_arcs_[r].resize(inst.rides[r].segment_count());
  }
  for (const auto& a : g.arcs_) {
    g.out_[a.from].push_back(a.id);
    g.in_[a.to].push_back(a.id);
    if (a.family == ArcFamily::steering) g.segment_arcs_[a.ride][a.segment].push_back(a.id);
  }
  return g;
}

TimeGraph build_graph(const Instance& inst) {
  NodeExpansion ex = expand_nodes(inst);
  auto arcs = build_arcs(inst, ex);
  return assemble_graph(inst, std::move(ex), std::move(arcs));
}

int TimeGraph::find_node(int location, Minutes time) const {
  if (location < 0 || static_cast<std::size_t>(location) >= t_map_.size()) return -1;
  const auto& list = t_map_[location];
  auto it = std::lower_bound(list.begin(), list.end(), time,
                             [&](int n, Minutes t) { return nodes_[n].time < t; });
  if (it != list.end() && nodes_[*it].time == time) return *it;
  return -1;
}

std::vector<int> TimeGraph::cut(const std::string& base, CutKind kind) const {
  std::vector<char> inside(nodes_.size(), 0);
  if (base == "depot") {
    inside[kSource] = inside[kSink] = 1;
  } else {
    auto it = std::find(location_names_.begin(), location_names_.end(), base);
    if (it == location_names_.end()) throw std::out_of_range("unknown base node '" + base + "'");
    for (int n : t_map_[it - location_names_.begin()]) inside[n] = 1;
  }
  std::vector<int> out;
  for (const auto& a : arcs_) {
    const bool steering_only = kind == CutKind::out_steering || kind == CutKind::in_steering;
    if (steering_only && a.mode != 1) continue;
    const bool outward = kind == CutKind::out || kind == CutKind::out_steering;
    if (outward ? (inside[a.from] && !inside[a.to]) : (!inside[a.from] && inside[a.to])) {
      out.push_back(a.id);
    }
  }
  return out;
}

GraphStats TimeGraph::stats() const { return {nodes_.size(), arcs_.size(), size_class_for(arcs_.size())}; }

GraphStats graph_stats(const TimeGraph& g) { return g.stats(); }

std::string TimeGraph::to_json() const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json jn = {{"id", n.id}};
    if (n.is_source) jn["base"] = "source";
    else if (n.is_sink) jn["base"] = "sink";
    else {
      jn["base"] = location_names_[n.location];
      jn["time"] = n.time;
    }
    j["nodes"].push_back(jn);
  }
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : arcs_) {
    nlohmann::json ja = {{"id", a.id},           {"from", a.from},         {"to", a.to},
                         {"mode", a.mode},       {"family", family_name(a.family)},
                         {"duration", a.duration}, {"consumption", a.consumption}};
    if (a.ride >= 0) {
      ja["ride"] = a.ride;
      ja["segment"] = a.segment;
      ja["leg"] = leg_name(a.leg);
    }
    j["arcs"].push_back(ja);
  }
  return j.dump(2) + "\n";
}

std::string TimeGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph timegraph {\n  rankdir=LR;\n";
  for (const auto& n : nodes_) {
    os << "  n" << n.id << " [label=\"";
    if (n.is_source) os << "source";
    else if (n.is_sink) os << "sink";
    else os << location_names_[n.location] << "@" << n.time;
    os << "\"];\n";
  }
  for (const auto& a : arcs_) {
    if (a.family == ArcFamily::depot) continue;
    os << "  n" << a.from << " -> n" << a.to;
    if (a.family == ArcFamily::deadhead) os << " [style=dotted]";
    else if (a.family == ArcFamily::waiting) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace drsync
