#include "drsync/plan.hpp"

#include <algorithm>
#include <limits>

namespace drsync {

namespace {

constexpr Minutes kNever = std::numeric_limits<Minutes>::max();

int depot_arc(const TimeGraph& g, int from, int to) {
  for (int a : g.out_arcs(from)) {
    if (g.arc(a).to == to && g.arc(a).family == ArcFamily::depot) return a;
  }
  return -1;
}

// Waiting arcs from u to v, both copies of the same location.
void append_wait(std::vector<int>& out, const TimeGraph& g, int u, int v) {
  while (u != v) {
    int next = -1;
    for (int a : g.out_arcs(u)) {
      if (g.arc(a).family == ArcFamily::waiting) {
        next = a;
        break;
      }
    }
    if (next < 0) return;
    out.push_back(next);
    u = g.arc(next).to;
  }
}

}  // namespace

void sort_by_departure(std::vector<int>& arcs, const TimeGraph& g) {
  std::sort(arcs.begin(), arcs.end(), [&](int a, int b) {
    const Minutes ta = g.node(g.arc(a).from).time, tb = g.node(g.arc(b).from).time;
    return ta != tb ? ta < tb : a < b;
  });
}

PlanContext::PlanContext(const Instance& inst, const TimeGraph& g, const Plan& plan)
    : inst_(&inst), g_(&g), plan_(&plan), whole_rides_(inst.exchange_policy == ExchangePolicy::none) {
  for (std::size_t r = 0; r < plan.legs.size(); ++r) {
    const auto& legs = plan.legs[r];
    if (legs.empty()) continue;
    if (whole_rides_) {
      Connection c{g.arc(legs.front()).from, g.arc(legs.back()).to, static_cast<int>(r), {}};
      for (int a : legs) c.arcs.push_back(g.arc(a).twin);
      conns_.push_back(std::move(c));
    } else {
      for (int a : legs) conns_.push_back({g.arc(a).from, g.arc(a).to, static_cast<int>(r), {g.arc(a).twin}});
    }
  }
  std::stable_sort(conns_.begin(), conns_.end(), [&](const Connection& a, const Connection& b) {
    return g.node(a.from).time < g.node(b.from).time;
  });
  arrival_cache_.resize(g.nodes().size());
  cached_.assign(g.nodes().size(), 0);
}

const std::vector<Minutes>& PlanContext::arrivals(int from) const {
  if (cached_[from]) return arrival_cache_[from];
  const auto& g = *g_;
  std::vector<Minutes> arr(g.location_count(), kNever);
  arr[g.node(from).location] = g.node(from).time;
  for (const auto& c : conns_) {
    const auto& a = g.node(c.from);
    const auto& b = g.node(c.to);
    if (arr[a.location] <= a.time && b.time < arr[b.location]) arr[b.location] = b.time;
  }
  cached_[from] = 1;
  arrival_cache_[from] = std::move(arr);
  return arrival_cache_[from];
}

bool PlanContext::reach(int from, int to) const {
  const auto& n = g_->node(to);
  return arrivals(from)[n.location] <= n.time;
}

std::vector<int> PlanContext::connect(int from, int to) const {
  const auto& g = *g_;
  std::vector<Minutes> arr(g.location_count(), kNever);
  std::vector<int> parent(g.location_count(), -1);
  arr[g.node(from).location] = g.node(from).time;
  for (std::size_t i = 0; i < conns_.size(); ++i) {
    const auto& c = conns_[i];
    const auto& a = g.node(c.from);
    const auto& b = g.node(c.to);
    if (arr[a.location] <= a.time && b.time < arr[b.location]) {
      arr[b.location] = b.time;
      parent[b.location] = static_cast<int>(i);
    }
  }
  if (arr[g.node(to).location] > g.node(to).time) return {};
  // Walk back: each hop is a wait followed by a connection.
  std::vector<std::vector<int>> pieces;
  int target = to;
  int loc = g.node(to).location;
  while (parent[loc] >= 0) {
    const auto& c = conns_[parent[loc]];
    std::vector<int> piece = c.arcs;
    append_wait(piece, g, c.to, target);
    pieces.push_back(std::move(piece));
    target = c.from;
    loc = g.node(c.from).location;
  }
  std::vector<int> path;
  append_wait(path, g, from, target);
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) path.insert(path.end(), it->begin(), it->end());
  return path;
}

int PlanContext::ride_start(int r) const {
  const auto& legs = plan_->legs[r];
  return legs.empty() ? -1 : g_->arc(legs.front()).from;
}

int PlanContext::ride_end(int r) const {
  const auto& legs = plan_->legs[r];
  return legs.empty() ? -1 : g_->arc(legs.back()).to;
}

bool PlanContext::duty_ok(const std::vector<int>& duty) const {
  const auto& g = *g_;
  const auto& legal = inst_->legal;
  auto t = [&](int node) { return g.node(node).time; };
  DutyClock clock;
  if (!whole_rides_) {
    int prev = -1;
    for (int a : duty) {
      const auto& arc = g.arc(a);
      if (prev >= 0 && !reach(g.arc(prev).to, arc.from)) return false;
      if (!clock.can_steer(t(arc.from), t(arc.to), legal)) return false;
      clock.steer(t(arc.from), t(arc.to), legal);
      prev = a;
    }
    return true;
  }
  std::vector<int> seen;
  int prev_end = -1;
  std::size_t i = 0;
  while (i < duty.size()) {
    const int r = g.arc(duty[i]).ride;
    if (std::find(seen.begin(), seen.end(), r) != seen.end()) return false;
    seen.push_back(r);
    const int start = ride_start(r), end = ride_end(r);
    if (prev_end >= 0 && !reach(prev_end, start)) return false;
    for (; i < duty.size() && g.arc(duty[i]).ride == r; ++i) {
      const auto& arc = g.arc(duty[i]);
      if (!clock.can_steer(t(arc.from), t(arc.to), legal, t(start))) return false;
      clock.steer(t(arc.from), t(arc.to), legal, t(start));
    }
    clock.extend(t(end));
    if (clock.span() > legal.t_dw) return false;
    prev_end = end;
  }
  return true;
}

Minutes PlanContext::duty_span(const std::vector<int>& duty) const {
  if (duty.empty()) return 0;
  const auto& g = *g_;
  if (!whole_rides_) return g.node(g.arc(duty.back()).to).time - g.node(g.arc(duty.front()).from).time;
  return g.node(ride_end(g.arc(duty.back()).ride)).time - g.node(ride_start(g.arc(duty.front()).ride)).time;
}

std::optional<Schedule> assign_greedy(const Instance& inst, const TimeGraph& g, const Plan& plan) {
  PlanContext ctx(inst, g, plan);
  const auto& legal = inst.legal;
  auto t = [&](int node) { return g.node(node).time; };
  struct Driver {
    std::vector<int> duty;
    DutyClock clock;
    int pos = -1;
    Minutes free_at = 0;
    int ride = -1;
  };
  std::vector<int> legs;
  for (const auto& l : plan.legs) legs.insert(legs.end(), l.begin(), l.end());
  sort_by_departure(legs, g);

  std::vector<Driver> drivers;
  std::vector<int> last_of_ride(plan.legs.size(), -1);
  const bool whole = ctx.whole_rides();

  auto fits = [&](const Driver& d, const TimedArc& arc) {
    const Minutes from = t(arc.from), to = t(arc.to);
    if (!whole) {
      return (d.pos < 0 || ctx.reach(d.pos, arc.from)) && d.clock.can_steer(from, to, legal);
    }
    const int start = ctx.ride_start(arc.ride), end = ctx.ride_end(arc.ride);
    if (d.ride == arc.ride) {
      return d.clock.can_steer(from, to, legal) && t(end) - d.clock.start <= legal.t_dw;
    }
    if (d.pos >= 0 && (d.free_at > t(start) || !ctx.reach(d.pos, start))) return false;
    if (!d.clock.can_steer(from, to, legal, t(start))) return false;
    const Minutes s = d.clock.idle() ? t(start) : std::min(d.clock.start, t(start));
    return t(end) - s <= legal.t_dw;
  };
  auto take = [&](Driver& d, int a) {
    const auto& arc = g.arc(a);
    d.duty.push_back(a);
    if (!whole) {
      d.clock.steer(t(arc.from), t(arc.to), legal);
      d.pos = arc.to;
      d.free_at = t(arc.to);
      return;
    }
    const int start = ctx.ride_start(arc.ride), end = ctx.ride_end(arc.ride);
    d.clock.steer(t(arc.from), t(arc.to), legal, t(start));
    d.clock.extend(t(end));
    d.pos = end;
    d.free_at = t(end);
    d.ride = arc.ride;
  };

  for (int a : legs) {
    const auto& arc = g.arc(a);
    int chosen = -1;
    const int cur = last_of_ride[arc.ride];
    if (cur >= 0 && fits(drivers[cur], arc)) chosen = cur;
    if (chosen < 0) {
      // Prefer drivers already at the departure stop, longest idle first.
      const int loc = g.node(arc.from).location;
      int best = -1;
      bool best_here = false;
      for (std::size_t k = 0; k < drivers.size(); ++k) {
        if (static_cast<int>(k) == cur || !fits(drivers[k], arc)) continue;
        const bool here = g.node(drivers[k].pos).location == loc;
        if (best < 0 || (here && !best_here) ||
            (here == best_here && drivers[k].free_at < drivers[best].free_at)) {
          best = static_cast<int>(k);
          best_here = here;
        }
      }
      chosen = best;
    }
    if (chosen < 0) {
      Driver fresh;
      if (!fits(fresh, arc)) return std::nullopt;
      drivers.push_back(fresh);
      chosen = static_cast<int>(drivers.size()) - 1;
    }
    take(drivers[chosen], a);
    last_of_ride[arc.ride] = chosen;
  }

  Schedule s{plan, {}};
  for (auto& d : drivers) s.duties.push_back(std::move(d.duty));
  return s;
}

bool eliminate_drivers(Schedule& s, const PlanContext& ctx) {
  const auto& g = ctx.graph();
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> order(s.duties.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.duties[a].size() < s.duties[b].size(); });
    for (int k : order) {
      auto trial = s.duties;
      bool ok = true;
      for (int leg : s.duties[k]) {
        bool placed = false;
        for (std::size_t j = 0; j < trial.size() && !placed; ++j) {
          if (static_cast<int>(j) == k) continue;
          auto cand = trial[j];
          cand.push_back(leg);
          sort_by_departure(cand, g);
          if (ctx.duty_ok(cand)) {
            trial[j] = std::move(cand);
            placed = true;
          }
        }
        if (!placed) {
          ok = false;
          break;
        }
      }
      if (ok) {
        trial.erase(trial.begin() + k);
        s.duties = std::move(trial);
        changed = any = true;
        break;
      }
    }
  }
  return any;
}

int schedule_objective(const Schedule& s) {
  return static_cast<int>(std::count_if(s.duties.begin(), s.duties.end(), [](const auto& d) { return !d.empty(); }));
}

Minutes schedule_theta(const Schedule& s, const PlanContext& ctx) {
  Minutes total = 0;
  for (const auto& d : s.duties) {
    if (!d.empty()) total += ctx.instance().legal.t_dw - ctx.duty_span(d);
  }
  return total;
}

Solution materialize(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  PlanContext ctx(inst, g, s.plan);
  Solution out;
  for (const auto& duty : s.duties) {
    if (duty.empty()) continue;
    std::vector<int> route;
    int cur;
    if (!ctx.whole_rides()) {
      cur = g.arc(duty.front()).from;
      route.push_back(depot_arc(g, TimeGraph::kSource, cur));
      for (int a : duty) {
        auto path = ctx.connect(cur, g.arc(a).from);
        route.insert(route.end(), path.begin(), path.end());
        route.push_back(a);
        cur = g.arc(a).to;
      }
    } else {
      cur = ctx.ride_start(g.arc(duty.front()).ride);
      route.push_back(depot_arc(g, TimeGraph::kSource, cur));
      std::size_t i = 0;
      while (i < duty.size()) {
        const int r = g.arc(duty[i]).ride;
        const std::size_t before = i;
        auto path = ctx.connect(cur, ctx.ride_start(r));
        route.insert(route.end(), path.begin(), path.end());
        for (int a : s.plan.legs[r]) {
          if (i < duty.size() && duty[i] == a) {
            route.push_back(a);
            ++i;
          } else {
            route.push_back(g.arc(a).twin);
          }
        }
        cur = ctx.ride_end(r);
        if (i == before) ++i;
      }
    }
    route.push_back(depot_arc(g, cur, TimeGraph::kSink));
    out.routes.push_back(std::move(route));
  }
  return out;
}

Schedule schedule_from(const Solution& s, const TimeGraph& g) {
  Schedule out;
  out.plan.legs = bus_routes(s, g);
  for (const auto& route : s.routes) {
    std::vector<int> duty;
    for (int a : route) {
      if (g.arc(a).mode == 1) duty.push_back(a);
    }
    if (!duty.empty()) out.duties.push_back(std::move(duty));
  }
  return out;
}

}  // namespace drsync
