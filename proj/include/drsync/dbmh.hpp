#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drsync/bounds.hpp"
#include "drsync/heuristic.hpp"
#include "drsync/mip.hpp"

namespace drsync {

struct Toggles {
  bool use_ch = true;
  bool use_ls = true;
  bool use_dbi = true;
  bool use_cb = true;
  bool use_mip = true;
  // With the MIP off, hand its budget to the remaining components.
  bool extend_time_on_disable = true;
};

struct DbmhConfig {
  double eta_lb = 600;
  double eta_mip = 60;
  double eta_ls = 10;
  double global_limit = 3600;
  SearchConfig search;
  Toggles toggles;
  std::uint64_t seed = 1;
};

/// Ablation variants 0..6: 0 everything, 1 no DBI, 2 no CH, 3 no LS, 4 no
/// callback, 5 no MIP/callback with budgets extended, 6 the same without.
DbmhConfig variant_config(int variant, DbmhConfig base);

/// Throws std::invalid_argument on bad values or unknown keys.
DbmhConfig config_from_json(const std::string& text, DbmhConfig base = {});
std::string config_to_json(const DbmhConfig& c);

enum class RunStatus { optimal, feasible, infeasible, no_solution };
enum class Stage { none, ch_ls, ls_callback, dbi, mip };
std::string to_string(RunStatus s);
std::string to_string(Stage s);

struct PhaseTimings {
  double graph = 0;
  double bounds = 0;
  double ch = 0;
  double ls = 0;
  double dbi = 0;
  double mip = 0;
  double total = 0;
};

struct RunReport {
  std::string instance;
  RunStatus status = RunStatus::no_solution;
  int objective = -1;
  Minutes theta = 0;
  int final_lb = 0;
  int clb = 0;
  int dlb = 0;
  BoundReport bounds;
  GraphStats graph;
  Stage found_by = Stage::none;
  PhaseTimings timings;
  std::vector<IncumbentEvent> incumbent_log;
  std::optional<Solution> solution;
  std::string note;
};

enum class DbiStatus { optimal, bound_only, infeasible };
std::string to_string(DbiStatus s);

struct DbiResult {
  int lb = 0;
  DbiStatus status = DbiStatus::bound_only;
  std::optional<Solution> solution;
};

/// Raise lb by refuting P(lb) until it meets f(s) or a restricted problem
/// turns out feasible. Every returned lb is a valid lower bound.
DbiResult destructive_bound_improvement(const Model& m, int lb, const std::optional<Solution>& s, double eta_lb,
                                        std::uint64_t seed = 1);

RunReport run(const Instance& inst, const DbmhConfig& cfg);

/// Deterministic fields only; wall-clock data lives in timings_to_json.
std::string report_to_json(const RunReport& r);
std::string timings_to_json(const RunReport& r);

}  // namespace drsync
