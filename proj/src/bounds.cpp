#include "drsync/bounds.hpp"

#include <algorithm>
#include <limits>

namespace drsync {

UpperBound upper_bound(const Instance& inst) {
  UpperBound out;
  const Minutes cap = inst.legal.t_cs;
  for (const auto& ride : inst.rides) {
    int groups = 0;
    Minutes open = 0;  // driving in the current chunk, 0 = no chunk open
    for (Minutes d : ride.segment_minutes) {
      if (d > cap) {
        groups += (d + cap - 1) / cap;
        open = 0;
        continue;
      }
      if (open > 0 && open + d <= cap) {
        open += d;
      } else {
        ++groups;
        open = d;
      }
    }
    out.per_ride_segments.push_back(groups);
    out.ub += groups;
  }
  return out;
}

int lower_bound_steering(const TimeGraph& graph, const Instance& inst) {
  long total = 0;
  for (std::size_t r = 0; r < inst.rides.size(); ++r) {
    const auto& ride = inst.rides[r];
    for (std::size_t s = 0; s < ride.segment_minutes.size(); ++s) {
      Minutes best = std::numeric_limits<Minutes>::max();
      if (r < graph.ride_count()) {
        for (int a : graph.segment_arcs(static_cast<int>(r), static_cast<int>(s))) {
          const auto& arc = graph.arc(a);
          if (arc.leg == LegKind::direct) best = std::min(best, arc.duration);
        }
      }
      total += best == std::numeric_limits<Minutes>::max() ? ride.segment_minutes[s] : best;
    }
  }
  const long t_ds = inst.legal.t_ds;
  return static_cast<int>((total + t_ds - 1) / t_ds);
}

ParallelBound lower_bound_parallel(const Instance& inst) {
  struct Span {
    Minutes from, to;
  };
  std::vector<Span> spans;
  for (const auto& ride : inst.rides) {
    const auto w = ride_windows(ride, inst.theta_tw);
    if (w.size() < 2) continue;
    const Minutes latest_pickup = w.front().l;
    const Minutes earliest_delivery = w.back().e;
    if (latest_pickup < earliest_delivery) spans.push_back({latest_pickup, earliest_delivery});
  }
  ParallelBound out;
  for (const auto& probe : spans) {
    const Minutes t = probe.from;
    int count = 0;
    for (const auto& s : spans) {
      if (s.from <= t && t < s.to) ++count;
    }
    if (count > out.lb2 || (count == out.lb2 && t < out.busiest_interval)) {
      out.lb2 = count;
      out.busiest_interval = t;
    }
  }
  return out;
}

BoundReport compute_bounds(const Instance& inst, const TimeGraph& graph) {
  BoundReport b;
  auto ub = upper_bound(inst);
  b.ub = ub.ub;
  b.per_ride_segments = std::move(ub.per_ride_segments);
  b.lb1 = lower_bound_steering(graph, inst);
  auto par = lower_bound_parallel(inst);
  b.lb2 = par.lb2;
  b.busiest_interval = par.busiest_interval;
  b.lb = combined_lower_bound(b.lb1, b.lb2);
  return b;
}

}  // namespace drsync
