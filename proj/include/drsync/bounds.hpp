#pragma once

#include <vector>

#include "drsync/instance.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

struct BoundReport {
  int ub = 0;
  int lb1 = 0;
  int lb2 = 0;
  int lb = 0;
  std::vector<int> per_ride_segments;  // s_r
  Minutes busiest_interval = 0;
};

struct UpperBound {
  int ub = 0;
  std::vector<int> per_ride_segments;
};

/// Drivers needed when nobody ever takes a break: each ride is cut greedily
/// into chunks of at most t_cs driving, one fresh driver per chunk.
UpperBound upper_bound(const Instance& inst);

/// ceil(total direct steering / t_ds).
int lower_bound_steering(const TimeGraph& graph, const Instance& inst);

struct ParallelBound {
  int lb2 = 0;
  Minutes busiest_interval = 0;
};

/// Peak number of rides that are on the road in every feasible schedule,
/// i.e. whose [latest pickup, earliest delivery) interval covers a minute.
ParallelBound lower_bound_parallel(const Instance& inst);

inline int combined_lower_bound(int lb1, int lb2) { return lb1 > lb2 ? lb1 : lb2; }

BoundReport compute_bounds(const Instance& inst, const TimeGraph& graph);

}  // namespace drsync
