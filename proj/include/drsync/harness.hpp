#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "drsync/dbmh.hpp"
#include "drsync/instance.hpp"

namespace drsync {

// --- suites -----------------------------------------------------------------

/// suite.json: seeds, runs per seed and the methods to bench.
struct SuiteSpec {
  std::vector<std::uint64_t> seeds{1};
  int runs = 1;
  std::vector<std::string> methods{"dbmh"};
};

struct Suite {
  std::vector<Instance> instances;  // sorted by name
  SuiteSpec spec;
  std::map<std::string, int> best_known;
};

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every *.json in `dir` except suite.json and best_known.json is an instance.
Suite load_suite(const std::filesystem::path& dir);
void save_suite(const Suite& s, const std::filesystem::path& dir);

/// Only tightens entries; values are proven optima.
void record_best_known(Suite& s, const std::string& instance, int optimum);

/// Small instances the oracle can certify: at most 4 rides and 300 arcs.
std::vector<Instance> micro_suite(std::size_t n, std::uint64_t seed, ExchangePolicy policy = ExchangePolicy::regular_and_intermediate);

// --- bench ------------------------------------------------------------------

/// "mip-only", "ch+ls" or "dbmh".
DbmhConfig method_config(const std::string& method, DbmhConfig base);

struct SuiteRow {
  std::string instance;
  std::string size_class;
  std::string method;
  std::uint64_t seed = 0;
  int run = 0;
  std::string status;  // RunStatus or "error"
  int objective = -1;
  int final_lb = 0;
  double time_s = 0;
  std::optional<double> gap_pct;
  std::optional<double> delta_z_pct;
  std::string error;
};

struct SuiteAggregate {
  std::string method;
  std::string size_class;
  int rows = 0;
  double opt_solved_pct = 0;
  double mean_time_s = 0;
  double mean_gap_pct = 0;
  double mean_delta_z_pct = 0;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  std::vector<SuiteAggregate> aggregates;
};

struct BenchOptions {
  int runs = 0;  // 0: take it from suite.json
  std::vector<std::string> methods;  // empty: take them from suite.json
  std::optional<std::uint64_t> seed;  // overrides the suite seeds
  int workers = 1;
};

/// Δz against the best of best_known and every row, gap against final_lb,
/// then per (method, size_class) aggregates.
void finalize(SuiteResult& r, const std::map<std::string, int>& best_known);

SuiteResult bench(const Suite& suite, const DbmhConfig& base, const BenchOptions& opt = {});

/// Aggregate table. Wall-clock columns are blank unless `timings`.
std::string aggregates_csv(const SuiteResult& r, bool timings = false);
std::string rows_csv(const SuiteResult& r, bool timings = false);

// --- experiments --------------------------------------------------------------

struct AblationRow {
  int variant = 0;
  std::string instance;
  std::string size_class;
  std::string status;
  int objective = -1;
};

struct AblationResult {
  std::vector<AblationRow> rows;  // by (variant, size_class, instance)
};

AblationResult ablate(const Suite& suite, const DbmhConfig& base, int workers = 1);
std::string ablation_summary_csv(const AblationResult& r, const std::map<std::string, int>& best_known);
std::string ablation_rows_csv(const AblationResult& r);

struct BoundRow {
  std::string instance;
  std::string size_class;
  int lb1 = 0, lb2 = 0, lb = 0, dlb = 0, ub = 0;
  std::string status;
  int objective = -1;
};

std::vector<BoundRow> compare_bounds(const Suite& suite, const DbmhConfig& base, int workers = 1);
std::string bounds_csv(const std::vector<BoundRow>& rows);
/// Share of instances with lb1 > lb2, lb2 > lb1, ties, and the mean dLB gain.
std::string bounds_summary_csv(const std::vector<BoundRow>& rows);

enum class SweepAxis { theta_tw, zeta, ell, exchange_policy, decomposition };
SweepAxis parse_axis(const std::string& s);
std::string to_string(SweepAxis a);

struct SweepRow {
  std::string instance;
  std::string size_class;
  std::string value;
  std::string status;
  int objective = -1;
  std::optional<int> delta;  // vs the first value of the axis
  double time_s = 0;
  std::string error;
};

/// Default axis values when `values` is empty.
std::vector<std::string> default_axis_values(SweepAxis a);
/// Copy of `inst` with the axis set to `value`; throws std::invalid_argument.
Instance apply_axis(const Instance& inst, SweepAxis a, const std::string& value);

std::vector<SweepRow> sweep(const Suite& suite, SweepAxis axis, std::vector<std::string> values, const DbmhConfig& base,
                            int workers = 1);
std::string sweep_csv(const std::vector<SweepRow>& rows, bool timings = false);

struct FitResult {
  DbmhConfig config;
  double default_delta_z_pct = 0;
  double fitted_delta_z_pct = 0;
  std::vector<std::string> trace;  // "param=value score"
};

/// Grid JSON: {"eta_lb": [...], "eta_mip": [...], "eta_ls": [...], "p": [...],
/// "mu": [...], "mu_min": [...]}; absent keys keep the base value.
FitResult fit(const Suite& suite, const std::string& grid_json, const DbmhConfig& base, int workers = 1);
std::string fit_to_json(const FitResult& r);

// --- single-instance commands ----------------------------------------------

/// Writes solution.json, report.json and timings.json into `out`.
/// Exit codes: 0 optimal/feasible, 2 infeasible, 3 no solution, 1 error.
int cmd_solve(const std::filesystem::path& instance, const DbmhConfig& cfg, const std::filesystem::path& out,
              std::optional<ExchangePolicy> policy, std::ostream& log);

/// Bounds as JSON plus an aligned table on `table`.
std::string bounds_report_json(const Instance& inst);
std::string bounds_table(const Instance& inst);

/// Deterministic worker pool: job i writes slot i.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

}  // namespace drsync
