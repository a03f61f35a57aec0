#include <algorithm>
#include <map>

#include "drsync/heuristic.hpp"

namespace drsync {

namespace {

int find_steering(const TimeGraph& g, int from, int to, const TimedArc& like) {
  if (from < 0 || to < 0) return -1;
  for (int a : g.out_arcs(from)) {
    const auto& arc = g.arc(a);
    if (arc.mode == 1 && arc.to == to && arc.ride == like.ride && arc.segment == like.segment &&
        arc.leg == like.leg && arc.station == like.station) {
      return a;
    }
  }
  return -1;
}

int find_direct(const TimeGraph& g, int from, int to, int ride, int segment) {
  for (int a : g.out_arcs(from)) {
    const auto& arc = g.arc(a);
    if (arc.mode == 1 && arc.to == to && arc.ride == ride && arc.segment == segment && arc.leg == LegKind::direct) {
      return a;
    }
  }
  return -1;
}

void push_recomputed(std::vector<Schedule>& out, const Instance& inst, const TimeGraph& g, Plan plan) {
  if (auto s = recompute(inst, g, plan)) out.push_back(std::move(*s));
}

}  // namespace

std::vector<Schedule> operator_reassign_segments(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  std::vector<Schedule> out;
  PlanContext ctx(inst, g, s.plan);
  for (std::size_t k = 0; k < s.duties.size(); ++k) {
    auto duties = s.duties;
    bool ok = true;
    for (int leg : s.duties[k]) {
      bool placed = false;
      for (std::size_t j = 0; j < duties.size() && !placed; ++j) {
        if (j == k) continue;
        auto cand = duties[j];
        cand.push_back(leg);
        sort_by_departure(cand, g);
        if (ctx.duty_ok(cand)) {
          duties[j] = std::move(cand);
          placed = true;
        }
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    duties.erase(duties.begin() + static_cast<std::ptrdiff_t>(k));
    out.push_back({s.plan, std::move(duties)});
  }
  return out;
}

std::vector<Schedule> operator_shift(const Schedule& s, const Instance& inst, const TimeGraph& g, Minutes delta) {
  std::vector<Schedule> out;
  if (delta == 0) return out;
  for (std::size_t r = 0; r < s.plan.legs.size(); ++r) {
    std::vector<int> shifted;
    for (int a : s.plan.legs[r]) {
      const auto& arc = g.arc(a);
      const auto& u = g.node(arc.from);
      const auto& v = g.node(arc.to);
      const int b = find_steering(g, g.find_node(u.location, u.time + delta), g.find_node(v.location, v.time + delta), arc);
      if (b < 0) break;
      shifted.push_back(b);
    }
    if (shifted.size() != s.plan.legs[r].size()) continue;
    Plan plan = s.plan;
    plan.legs[r] = std::move(shifted);
    push_recomputed(out, inst, g, std::move(plan));
  }
  return out;
}

std::vector<Schedule> operator_postpone(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  return operator_shift(s, inst, g, inst.ell);
}

std::vector<Schedule> operator_prepone(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  return operator_shift(s, inst, g, -inst.ell);
}

std::vector<Schedule> operator_insert_stop(const Schedule& s, const Instance& inst, const TimeGraph& g,
                                           Operator which, Rng& rng, double p) {
  std::vector<Schedule> out;
  if (inst.exchange_policy != ExchangePolicy::regular_and_intermediate) return out;
  struct Option {
    int in;
    int out;
    Minutes detour;
    int station;
  };
  struct Site {
    int ride;
    std::size_t index;
    Minutes duration;
    std::vector<Option> options;
  };
  std::vector<Site> sites;
  for (std::size_t r = 0; r < s.plan.legs.size(); ++r) {
    const auto& legs = s.plan.legs[r];
    for (std::size_t i = 0; i < legs.size(); ++i) {
      const auto& arc = g.arc(legs[i]);
      if (arc.leg != LegKind::direct) continue;
      Site site{static_cast<int>(r), i, arc.duration, {}};
      for (int a : g.segment_arcs(arc.ride, arc.segment)) {
        const auto& in = g.arc(a);
        if (in.leg != LegKind::to_station || in.from != arc.from) continue;
        const int b = find_steering(g, in.to, arc.to, [&] {
          TimedArc like = in;
          like.leg = LegKind::from_station;
          return like;
        }());
        if (b >= 0) site.options.push_back({a, b, in.duration + g.arc(b).duration - arc.duration, in.station});
      }
      if (!site.options.empty()) sites.push_back(std::move(site));
    }
  }
  if (sites.empty()) return out;
  std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.duration > b.duration; });
  Site& site = sites[perturbed_select(sites.size(), p, rng)];
  auto& opts = site.options;
  std::size_t pick = 0;
  if (which == Operator::insert_random) {
    pick = static_cast<std::size_t>(rng() % opts.size());
  } else if (which == Operator::insert_shortest) {
    std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) { return a.detour < b.detour; });
    pick = perturbed_select(opts.size(), p, rng);
  } else {
    std::map<int, int> shared;
    for (const auto& legs : s.plan.legs) {
      for (int a : legs) {
        ++shared[g.node(g.arc(a).from).location];
        ++shared[g.node(g.arc(a).to).location];
      }
    }
    std::stable_sort(opts.begin(), opts.end(),
                     [&](const Option& a, const Option& b) { return shared[a.station] > shared[b.station]; });
    pick = perturbed_select(opts.size(), p, rng);
  }
  Plan plan = s.plan;
  auto& legs = plan.legs[site.ride];
  legs[site.index] = opts[pick].in;
  legs.insert(legs.begin() + static_cast<std::ptrdiff_t>(site.index) + 1, opts[pick].out);
  push_recomputed(out, inst, g, std::move(plan));
  return out;
}

std::vector<Schedule> operator_remove_stop(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  std::vector<Schedule> out;
  for (std::size_t r = 0; r < s.plan.legs.size(); ++r) {
    const auto& legs = s.plan.legs[r];
    for (std::size_t i = 0; i + 1 < legs.size(); ++i) {
      const auto& in = g.arc(legs[i]);
      const auto& back = g.arc(legs[i + 1]);
      if (in.leg != LegKind::to_station || back.leg != LegKind::from_station) continue;
      const int direct = find_direct(g, in.from, back.to, in.ride, in.segment);
      if (direct < 0) continue;
      Plan plan = s.plan;
      auto& l = plan.legs[r];
      l[i] = direct;
      l.erase(l.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      push_recomputed(out, inst, g, std::move(plan));
    }
  }
  return out;
}

}  // namespace drsync
