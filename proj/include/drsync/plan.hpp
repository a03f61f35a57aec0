#pragma once

#include <optional>
#include <vector>

#include "drsync/instance.hpp"
#include "drsync/legality.hpp"
#include "drsync/solution.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

/// Vehicle side of a solution: per ride, its steering arcs in travel order.
struct Plan {
  std::vector<std::vector<int>> legs;

  bool operator==(const Plan&) const = default;
};

/// A plan plus, per driver, the steering arcs that driver covers (sorted by
/// departure). Relocation between legs is implied and resolved on demand.
struct Schedule {
  Plan plan;
  std::vector<std::vector<int>> duties;
};

/// Reachability and duty legality over a fixed plan.
class PlanContext {
 public:
  PlanContext(const Instance& inst, const TimeGraph& g, const Plan& plan);

  const Instance& instance() const { return *inst_; }
  const TimeGraph& graph() const { return *g_; }
  const Plan& plan() const { return *plan_; }
  bool whole_rides() const { return whole_rides_; }

  /// Can a driver standing at node `from` be at node `to` by waiting and
  /// riding along on planned buses?
  bool reach(int from, int to) const;

  /// Node path (arc ids) realising reach(from, to); empty when from == to.
  std::vector<int> connect(int from, int to) const;

  /// First and last node of ride r in the plan.
  int ride_start(int r) const;
  int ride_end(int r) const;

  /// Legal duty? `duty` holds steering arcs of this plan, sorted by departure.
  bool duty_ok(const std::vector<int>& duty) const;

  /// On-duty span of a legal duty.
  Minutes duty_span(const std::vector<int>& duty) const;

 private:
  struct Connection {
    int from;
    int to;
    int ride;  // whole-ride connections under the no-exchange policy
    std::vector<int> arcs;
  };
  const std::vector<Minutes>& arrivals(int from) const;

  const Instance* inst_;
  const TimeGraph* g_;
  const Plan* plan_;
  bool whole_rides_;
  std::vector<Connection> conns_;  // sorted by departure
  mutable std::vector<std::vector<Minutes>> arrival_cache_;
  mutable std::vector<char> cached_;
};

/// Sort arcs by departure time, then id.
void sort_by_departure(std::vector<int>& arcs, const TimeGraph& g);

/// Chronological greedy driver assignment: keep the current driver on the
/// bus while legal, else reuse an available driver, else open a new one.
/// Fails only when some leg cannot be driven even by a fresh driver.
std::optional<Schedule> assign_greedy(const Instance& inst, const TimeGraph& g, const Plan& plan);

/// Repeatedly try to dissolve a driver by moving each of its legs to another
/// driver. Returns true if at least one driver was removed.
bool eliminate_drivers(Schedule& s, const PlanContext& ctx);

int schedule_objective(const Schedule& s);
Minutes schedule_theta(const Schedule& s, const PlanContext& ctx);

/// Full driver routes through the graph.
Solution materialize(const Schedule& s, const Instance& inst, const TimeGraph& g);

/// Inverse of materialize (up to relocation paths).
Schedule schedule_from(const Solution& s, const TimeGraph& g);

}  // namespace drsync
