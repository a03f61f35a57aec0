#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drsync/bounds.hpp"
#include "drsync/instance.hpp"
#include "drsync/solution.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

/// Compact driver model over the time graph: binaries x[k, arc] and
/// continuous r[k, node] (steering minutes since the last break) for
/// k < driver_count.
struct Model {
  std::shared_ptr<const Instance> instance;
  std::shared_ptr<const TimeGraph> graph;
  int driver_count = 0;
  int lower_bound = 0;  // total depot outflow >= lower_bound; drivers below it forced active
  std::optional<int> cardinality_cap;

  std::size_t binary_count() const;
  std::size_t continuous_count() const;
};

/// K = max(ub, start_objective) so a start solution always fits the model.
Model build_model(std::shared_ptr<const Instance> inst, std::shared_ptr<const TimeGraph> g, const BoundReport& b,
                  int start_objective = 0);

/// P(cap): copy of the model with at most `cap` active drivers.
Model restrict(const Model& m, int cap);

/// One linear row, `terms sense rhs`.
struct Row {
  std::string name;
  std::vector<std::pair<long, std::string>> terms;
  std::string sense;  // "<=", ">=", "="
  long rhs = 0;
};

std::vector<Row> model_rows(const Model& m);
std::string model_to_lp(const Model& m);
/// Throws std::runtime_error on I/O failure.
void export_model(const Model& m, const std::string& path);

enum class SolveStatus { optimal, infeasible, feasible, timeout_no_solution };
std::string to_string(SolveStatus s);

struct IncumbentEvent {
  double time_s = 0;
  int objective = 0;
  int bound = 0;
};

/// May return a better solution, which the solver adopts.
using IncumbentCallback = std::function<std::optional<Solution>(const Solution&)>;

struct SolverConfig {
  double time_limit = 60;
  std::optional<int> cutoff;  // accept only solutions with at most this many drivers
  std::optional<Solution> start_solution;
  double start_delay = 0;  // seconds before the start solution becomes the incumbent
  IncumbentCallback incumbent_callback;
  std::uint64_t seed = 1;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::timeout_no_solution;
  std::optional<Solution> best_solution;
  int best_bound = 0;
  double elapsed = 0;
  std::vector<IncumbentEvent> incumbent_log;
  std::uint64_t explored = 0;
  bool incumbent_from_callback = false;
  bool incumbent_from_start = false;
};

/// CSV `time_s,objective,bound`.
std::string incumbent_log_csv(const std::vector<IncumbentEvent>& log);

/// Exact chronological branch-and-bound over bus legs and drivers.
SolveOutcome solve(const Model& m, const SolverConfig& cfg);

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Routes from an assignment of (driver, arc) pairs with x = 1.
Solution extract_solution(const Model& m, const std::vector<std::pair<int, int>>& assignment);

}  // namespace drsync
