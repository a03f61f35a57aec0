#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "drsync/instance.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

/// Driver routes through the time graph. Every route runs source -> sink;
/// drivers without a steering arc do not count.
struct Solution {
  std::vector<std::vector<int>> routes;

  bool operator==(const Solution&) const = default;
};

/// f(S): drivers steering at least one arc.
int objective(const Solution& s, const TimeGraph& g);

/// Sum over active drivers of the unused working time t_dw - (return - start).
Minutes theta(const Solution& s, const TimeGraph& g, const LegalParams& legal);

/// Order-sensitive hash of the routes; used only to break ties.
std::uint64_t solution_hash(const Solution& s);

/// Steering arcs per ride in travel order (the bus routes).
std::vector<std::vector<int>> bus_routes(const Solution& s, const TimeGraph& g);

/// Departure minute per ride and customer stop, -1 where unserved.
std::vector<std::vector<Minutes>> departure_times(const Solution& s, const TimeGraph& g);

struct Violation {
  enum class Kind { uncovered_segment, continuous_steering, daily_steering, daily_working, break_too_short, desync, detour };
  Kind kind;
  std::string subject;
  Minutes detail = 0;
};

std::string to_string(Violation::Kind k);

/// Dangling or malformed routes; distinct from rule violations.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every broken rule of the routes; empty iff the solution is feasible.
/// Throws StructuralError for routes that are not source-to-sink paths.
std::vector<Violation> check_feasibility(const Solution& s, const Instance& inst, const TimeGraph& g);

std::string solution_to_json(const Solution& s, const Instance& inst, const TimeGraph& g);

}  // namespace drsync
