#include "drsync/oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <climits>
#include <map>
#include <set>

#include "drsync/legality.hpp"
#include "json.hpp"

namespace drsync {

namespace {

constexpr Minutes kFar = INT_MAX / 2;

enum class Kind { direct, to_station, from_station };

struct Leg {
  int ride;
  int seg;
  Kind kind;
  int from_loc;
  Minutes from_t;
  int to_loc;
  Minutes to_t;
};

using RidePlan = std::vector<Leg>;

std::vector<Minutes> grid(Minutes e, Minutes l, Minutes step) {
  std::vector<Minutes> out;
  for (Minutes t = e; t <= l; t += step) out.push_back(t);
  return out;
}

std::vector<RidePlan> ride_options(const Instance& inst, int r) {
  const Ride& ride = inst.rides[r];
  const std::size_t n = ride.stops.size();
  const Minutes tcs = inst.legal.t_cs;
  const auto windows = ride_windows(ride, inst.theta_tw);
  std::vector<std::vector<Minutes>> times(n);
  for (std::size_t p = 0; p < n; ++p) times[p] = grid(windows[p].e, windows[p].l, inst.ell);
  std::vector<int> loc(n);
  for (std::size_t p = 0; p < n; ++p) loc[p] = inst.stop_index(ride.stops[p]);
  const bool stations = inst.exchange_policy == ExchangePolicy::regular_and_intermediate;

  std::vector<RidePlan> out;
  RidePlan cur;
  auto extend = [&](auto&& self, std::size_t seg, Minutes ti) -> void {
    if (seg + 1 == n) {
      out.push_back(cur);
      return;
    }
    const Minutes d = ride.segment_minutes[seg];
    const int s = static_cast<int>(seg);
    for (Minutes tj : times[seg + 1]) {
      if (tj - ti < d || tj - ti > tcs) continue;
      cur.push_back({r, s, Kind::direct, loc[seg], ti, loc[seg + 1], tj});
      self(self, seg + 1, tj);
      cur.pop_back();
    }
    if (!stations) return;
    for (const auto& acc : ride.stations[seg]) {
      if (acc.in_minutes + acc.out_minutes - d > inst.zeta || acc.in_minutes > tcs) continue;
      const int sl = inst.stop_index(acc.station);
      const Minutes ts = ti + acc.in_minutes;
      for (Minutes tj : times[seg + 1]) {
        if (tj - ts < acc.out_minutes || tj - ts > tcs) continue;
        cur.push_back({r, s, Kind::to_station, loc[seg], ti, sl, ts});
        cur.push_back({r, s, Kind::from_station, sl, ts, loc[seg + 1], tj});
        self(self, seg + 1, tj);
        cur.pop_back();
        cur.pop_back();
      }
    }
  };
  for (Minutes t0 : times[0]) extend(extend, 0, t0);
  return out;
}

struct Point {
  int loc = -1;
  Minutes t = 0;
};

// One plan: all legs fixed; find the fewest drivers.
class Assigner {
 public:
  Assigner(const Instance& inst, std::vector<Leg> legs, std::size_t n_rides)
      : inst_(inst), legs_(std::move(legs)), whole_(inst.exchange_policy == ExchangePolicy::none) {
    std::stable_sort(legs_.begin(), legs_.end(), [](const Leg& a, const Leg& b) {
      if (a.from_t != b.from_t) return a.from_t < b.from_t;
      return a.ride < b.ride;
    });
    start_.assign(n_rides, {});
    end_.assign(n_rides, {});
    std::vector<char> seen(n_rides, 0);
    for (const auto& l : legs_) {
      if (!seen[l.ride]) start_[l.ride] = {l.from_loc, l.from_t};
      seen[l.ride] = 1;
      end_[l.ride] = {l.to_loc, l.to_t};
    }
    if (whole_) {
      for (std::size_t r = 0; r < n_rides; ++r) {
        if (seen[r]) hops_.push_back({start_[r], end_[r]});
      }
    } else {
      for (const auto& l : legs_) hops_.push_back({{l.from_loc, l.from_t}, {l.to_loc, l.to_t}});
    }
    std::stable_sort(hops_.begin(), hops_.end(), [](const auto& a, const auto& b) { return a.first.t < b.first.t; });
  }

  const std::vector<Leg>& legs() const { return legs_; }

  /// Fewest drivers <= cap, or -1. Fills `owner`.
  int solve(int cap, std::vector<int>& owner, std::uint64_t& explored) {
    int best = -1;
    while (cap >= 0) {
      failed_.clear();
      drivers_.clear();
      assignment_.assign(legs_.size(), -1);
      if (!dfs(0, cap, explored)) break;
      best = found_;
      owner = assignment_;
      cap = best - 1;
    }
    return best;
  }

  std::vector<Minutes> arrivals(Point p) const {
    std::vector<Minutes> arr(inst_.stops.size(), kFar);
    arr[p.loc] = p.t;
    for (const auto& [a, b] : hops_) {
      if (arr[a.loc] <= a.t && b.t < arr[b.loc]) arr[b.loc] = b.t;
    }
    return arr;
  }

  bool reach(Point from, Point to) {
    auto key = std::make_pair(from.loc, from.t);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, arrivals(from)).first;
    return it->second[to.loc] <= to.t;
  }

  Point ride_start(int r) const { return start_[r]; }
  Point ride_end(int r) const { return end_[r]; }
  const std::vector<std::pair<Point, Point>>& hops() const { return hops_; }

 private:
  struct Driver {
    Point at;
    Minutes free_at = 0;
    int ride = -1;
    bool fresh = true;
    DutyClock clock;
  };

  using Sig = std::array<int, 10>;
  static Sig sig(const Driver& d) {
    return {d.at.loc, d.at.t, d.free_at, d.ride, d.fresh, d.clock.start, d.clock.end, d.clock.last_steer_end,
            d.clock.continuous, d.clock.total};
  }

  bool fits(Driver& d, const Leg& l) {
    const auto& legal = inst_.legal;
    if (!whole_) {
      if (!d.fresh && (d.free_at > l.from_t || !reach(d.at, {l.from_loc, l.from_t}))) return false;
      return d.clock.can_steer(l.from_t, l.to_t, legal);
    }
    const Point s = start_[l.ride], e = end_[l.ride];
    if (!d.fresh && d.ride == l.ride) return d.clock.can_steer(l.from_t, l.to_t, legal);
    if (!d.fresh && (d.free_at > s.t || !reach(d.at, s))) return false;
    if (!d.clock.can_steer(l.from_t, l.to_t, legal, s.t)) return false;
    const Minutes on = d.clock.idle() ? s.t : std::min(d.clock.start, s.t);
    return e.t - on <= legal.t_dw;
  }

  void take(Driver& d, const Leg& l) {
    const auto& legal = inst_.legal;
    if (!whole_) {
      d.clock.steer(l.from_t, l.to_t, legal);
      d.at = {l.to_loc, l.to_t};
      d.free_at = l.to_t;
    } else if (!d.fresh && d.ride == l.ride) {
      d.clock.steer(l.from_t, l.to_t, legal);
    } else {
      const Point s = start_[l.ride], e = end_[l.ride];
      d.clock.steer(l.from_t, l.to_t, legal, s.t);
      d.clock.extend(e.t);
      d.at = e;
      d.free_at = e.t;
      d.ride = l.ride;
    }
    d.fresh = false;
  }

  bool dfs(std::size_t i, int cap, std::uint64_t& explored) {
    ++explored;
    if (i == legs_.size()) {
      found_ = static_cast<int>(drivers_.size());
      return true;
    }
    std::vector<int> key{static_cast<int>(i)};
    std::vector<Sig> sigs;
    for (const auto& d : drivers_) sigs.push_back(sig(d));
    std::sort(sigs.begin(), sigs.end());
    for (const auto& s : sigs) key.insert(key.end(), s.begin(), s.end());
    if (failed_.count(key)) return false;

    const Leg& l = legs_[i];
    std::vector<Sig> tried;
    for (std::size_t k = 0; k < drivers_.size(); ++k) {
      const Sig s = sig(drivers_[k]);
      if (std::find(tried.begin(), tried.end(), s) != tried.end()) continue;
      tried.push_back(s);
      if (!fits(drivers_[k], l)) continue;
      const Driver saved = drivers_[k];
      take(drivers_[k], l);
      assignment_[i] = static_cast<int>(k);
      if (dfs(i + 1, cap, explored)) return true;
      drivers_[k] = saved;
    }
    if (static_cast<int>(drivers_.size()) < cap) {
      Driver d;
      if (fits(d, l)) {
        take(d, l);
        drivers_.push_back(d);
        assignment_[i] = static_cast<int>(drivers_.size()) - 1;
        if (dfs(i + 1, cap, explored)) return true;
        drivers_.pop_back();
      }
    }
    failed_.insert(std::move(key));
    return false;
  }

  const Instance& inst_;
  std::vector<Leg> legs_;
  bool whole_;
  std::vector<Point> start_, end_;
  std::vector<std::pair<Point, Point>> hops_;
  std::map<std::pair<int, Minutes>, std::vector<Minutes>> cache_;
  std::vector<Driver> drivers_;
  std::vector<int> assignment_;
  std::set<std::vector<int>> failed_;
  int found_ = 0;
};

int peak_overlap(const std::vector<Leg>& legs) {
  int peak = 0;
  for (const auto& a : legs) {
    int c = 0;
    for (const auto& b : legs) c += b.from_t <= a.from_t && a.from_t < b.to_t;
    peak = std::max(peak, c);
  }
  return peak;
}

int graph_arc(const TimeGraph& g, const Leg& l) {
  const int u = g.find_node(l.from_loc, l.from_t);
  const int v = g.find_node(l.to_loc, l.to_t);
  const LegKind want = l.kind == Kind::direct       ? LegKind::direct
                       : l.kind == Kind::to_station ? LegKind::to_station
                                                    : LegKind::from_station;
  if (u >= 0 && v >= 0) {
    for (int a : g.out_arcs(u)) {
      const auto& arc = g.arc(a);
      if (arc.mode == 1 && arc.to == v && arc.ride == l.ride && arc.segment == l.seg && arc.leg == want) return a;
    }
  }
  throw std::logic_error("oracle leg has no graph arc");
}

void wait_arcs(const TimeGraph& g, int u, int v, std::vector<int>& out) {
  while (u != v) {
    int next = -1;
    for (int a : g.out_arcs(u)) {
      if (g.arc(a).family == ArcFamily::waiting) next = a;
    }
    if (next < 0) throw std::logic_error("oracle witness: broken waiting chain");
    out.push_back(next);
    u = g.arc(next).to;
  }
}

Solution build_witness(const Instance& inst, const TimeGraph& g, Assigner& as, const std::vector<Leg>& legs,
                       const std::vector<int>& owner) {
  const bool whole = inst.exchange_policy == ExchangePolicy::none;
  std::vector<int> arc_of(legs.size());
  for (std::size_t i = 0; i < legs.size(); ++i) arc_of[i] = graph_arc(g, legs[i]);
  // Hop arcs in graph terms, in the order of Assigner::hops().
  std::vector<std::vector<int>> hop_arcs;
  std::vector<std::pair<Point, Point>> hop_pts = as.hops();
  for (const auto& [a, b] : hop_pts) {
    std::vector<int> arcs;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      const Leg& l = legs[i];
      const bool inside = whole ? (as.ride_start(l.ride).t == a.t && as.ride_start(l.ride).loc == a.loc &&
                                   as.ride_end(l.ride).t == b.t && as.ride_end(l.ride).loc == b.loc)
                                : (l.from_loc == a.loc && l.from_t == a.t && l.to_loc == b.loc && l.to_t == b.t);
      if (inside) arcs.push_back(g.arc(arc_of[i]).twin);
      if (inside && !whole) break;
    }
    hop_arcs.push_back(arcs);
  }
  auto node = [&](Point p) { return g.find_node(p.loc, p.t); };
  auto connect = [&](Point from, Point to, std::vector<int>& out) {
    std::vector<Minutes> arr(inst.stops.size(), kFar);
    std::vector<int> parent(inst.stops.size(), -1);
    arr[from.loc] = from.t;
    for (std::size_t h = 0; h < hop_pts.size(); ++h) {
      const auto& [a, b] = hop_pts[h];
      if (arr[a.loc] <= a.t && b.t < arr[b.loc]) {
        arr[b.loc] = b.t;
        parent[b.loc] = static_cast<int>(h);
      }
    }
    std::vector<std::vector<int>> pieces;
    Point target = to;
    int loc = to.loc;
    while (parent[loc] >= 0) {
      const auto& [a, b] = hop_pts[parent[loc]];
      std::vector<int> piece = hop_arcs[parent[loc]];
      wait_arcs(g, node(b), node(target), piece);
      pieces.push_back(piece);
      target = a;
      loc = a.loc;
    }
    wait_arcs(g, node(from), node(target), out);
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) out.insert(out.end(), it->begin(), it->end());
  };
  auto depot = [&](int from, int to) {
    for (int a : g.out_arcs(from)) {
      if (g.arc(a).to == to) return a;
    }
    throw std::logic_error("oracle witness: missing depot arc");
  };

  int drivers = 0;
  for (int o : owner) drivers = std::max(drivers, o + 1);
  Solution s;
  for (int k = 0; k < drivers; ++k) {
    std::vector<std::size_t> mine;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      if (owner[i] == k) mine.push_back(i);
    }
    std::vector<int> route;
    Point at;
    if (!whole) {
      at = {legs[mine.front()].from_loc, legs[mine.front()].from_t};
      route.push_back(depot(TimeGraph::kSource, node(at)));
      for (std::size_t i : mine) {
        connect(at, {legs[i].from_loc, legs[i].from_t}, route);
        route.push_back(arc_of[i]);
        at = {legs[i].to_loc, legs[i].to_t};
      }
    } else {
      std::vector<int> rides;
      for (std::size_t i : mine) {
        if (rides.empty() || rides.back() != legs[i].ride) rides.push_back(legs[i].ride);
      }
      at = as.ride_start(rides.front());
      route.push_back(depot(TimeGraph::kSource, node(at)));
      for (int r : rides) {
        connect(at, as.ride_start(r), route);
        std::vector<std::size_t> ride_legs;
        for (std::size_t i = 0; i < legs.size(); ++i) {
          if (legs[i].ride == r) ride_legs.push_back(i);
        }
        std::sort(ride_legs.begin(), ride_legs.end(),
                  [&](std::size_t a, std::size_t b) { return legs[a].from_t < legs[b].from_t; });
        for (std::size_t i : ride_legs) route.push_back(owner[i] == k ? arc_of[i] : g.arc(arc_of[i]).twin);
        at = as.ride_end(r);
      }
    }
    route.push_back(depot(node(at), TimeGraph::kSink));
    s.routes.push_back(std::move(route));
  }
  return s;
}

}  // namespace

OracleResult brute_force(const Instance& inst, const OracleLimits& limits) {
  const auto t0 = std::chrono::steady_clock::now();
  if (inst.rides.size() > limits.max_rides) {
    throw OracleRefusal("oracle: " + std::to_string(inst.rides.size()) + " rides exceed the limit of " +
                        std::to_string(limits.max_rides));
  }
  const TimeGraph g = build_graph(inst);
  if (g.arcs().size() > limits.max_arcs) {
    throw OracleRefusal("oracle: " + std::to_string(g.arcs().size()) + " arcs exceed the limit of " +
                        std::to_string(limits.max_arcs));
  }
  OracleResult res;
  const std::size_t n = inst.rides.size();
  std::vector<std::vector<RidePlan>> options(n);
  for (std::size_t r = 0; r < n; ++r) {
    options[r] = ride_options(inst, static_cast<int>(r));
    if (options[r].empty()) {
      res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return res;
    }
  }

  int total_legs_cap = 0;
  for (const auto& o : options) {
    std::size_t most = 0;
    for (const auto& p : o) most = std::max(most, p.size());
    total_legs_cap += static_cast<int>(most);
  }
  int best = total_legs_cap + 1;
  std::vector<Leg> best_legs;
  std::vector<int> best_owner;

  std::vector<std::size_t> pick(n, 0);
  auto visit = [&](auto&& self, std::size_t r) -> void {
    if (r == n) {
      std::vector<Leg> legs;
      for (std::size_t i = 0; i < n; ++i) legs.insert(legs.end(), options[i][pick[i]].begin(), options[i][pick[i]].end());
      if (peak_overlap(legs) >= best) return;
      Assigner as(inst, legs, n);
      std::vector<int> owner;
      const int f = as.solve(best - 1, owner, res.explored);
      if (f >= 0 && f < best) {
        best = f;
        best_legs = as.legs();
        best_owner = owner;
      }
      return;
    }
    for (std::size_t i = 0; i < options[r].size(); ++i) {
      pick[r] = i;
      self(self, r + 1);
    }
  };
  visit(visit, 0);

  if (best <= total_legs_cap) {
    res.feasible = true;
    res.optimum = best;
    Assigner as(inst, best_legs, n);
    res.witness = build_witness(inst, g, as, as.legs(), best_owner);
  }
  res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string oracle_to_json(const OracleResult& r, const Instance& inst, const TimeGraph& g) {
  nlohmann::ordered_json j;
  j["instance"] = inst.name;
  j["feasible"] = r.feasible;
  if (r.feasible) j["optimum"] = r.optimum;
  else j["optimum"] = nullptr;
  j["explored"] = r.explored;
  if (r.feasible) j["witness"] = nlohmann::json::parse(solution_to_json(r.witness, inst, g));
  return j.dump(2) + "\n";
}

}  // namespace drsync
