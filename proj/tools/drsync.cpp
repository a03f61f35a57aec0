// drsync command line.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "drsync/dbmh.hpp"
#include "drsync/harness.hpp"
#include "drsync/oracle.hpp"

namespace fs = std::filesystem;
using namespace drsync;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit;
  std::string mode;
  std::string policy;
  std::string out;
  int workers = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON file mirroring DbmhConfig")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--time-limit", c.time_limit, "global time limit in seconds");
  app->add_option("--mode", c.mode, "local search mode")->check(CLI::IsMember({"composite", "vnd"}));
  app->add_option("--policy", c.policy, "exchange policy override")->check(CLI::IsMember({"none", "regular", "full"}));
  app->add_option("--out", c.out, "output directory");
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

DbmhConfig make_config(const Common& c) {
  DbmhConfig cfg;
  if (!c.config.empty()) cfg = config_from_json(slurp(c.config));
  if (c.seed) cfg.seed = cfg.search.seed = *c.seed;
  if (c.time_limit) {
    if (*c.time_limit <= 0) throw std::invalid_argument("--time-limit must be positive");
    cfg.global_limit = *c.time_limit;
  }
  if (!c.mode.empty()) cfg.search.mode = parse_search_mode(c.mode);
  return cfg;
}

std::optional<ExchangePolicy> policy_of(const Common& c) {
  if (c.policy.empty()) return std::nullopt;
  return parse_policy(c.policy);
}

Suite suite_with_policy(const std::string& dir, const Common& c) {
  Suite s = load_suite(dir);
  if (auto p = policy_of(c)) {
    for (auto& inst : s.instances) inst.exchange_policy = *p;
  }
  return s;
}

// One CSV per name into --out, or all to stdout.
void emit(const Common& c, const std::vector<std::pair<std::string, std::string>>& files) {
  if (c.out.empty()) {
    for (std::size_t i = 0; i < files.size(); ++i) std::cout << (i ? "\n" : "") << files[i].second;
    return;
  }
  fs::create_directories(c.out);
  for (const auto& [name, text] : files) {
    std::ofstream f(fs::path(c.out) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + (fs::path(c.out) / name).string() + "'");
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drsync: driver routing and scheduling with mid-route synchronization"};
  app.require_subcommand(1);

  Common solve_c;
  std::string solve_path;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("instance", solve_path, "instance JSON")->required();
  add_common(solve, solve_c);

  Common bounds_c;
  std::string bounds_path;
  bool bounds_json = false;
  auto* bounds = app.add_subcommand("bounds", "print UB, LB1, LB2 and LB");
  bounds->add_option("instance", bounds_path, "instance JSON")->required();
  bounds->add_flag("--json", bounds_json, "JSON instead of a table");
  add_common(bounds, bounds_c);

  Common oracle_c;
  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum of a tiny instance");
  oracle->add_option("instance", oracle_path, "instance JSON")->required();
  add_common(oracle, oracle_c);

  Common gen_c;
  GeneratorConfig gen;
  std::string overlap = "mixed";
  std::size_t micro = 0;
  auto* generate = app.add_subcommand("generate", "write a synthetic instance or a micro suite");
  generate->add_option("--lines", gen.n_lines);
  generate->add_option("--rides", gen.rides_per_line, "rides per line");
  generate->add_option("--segments", gen.segments_per_ride);
  generate->add_option("--stations", gen.stations_per_segment, "stations per segment");
  generate->add_option("--drive-min", gen.drive_min);
  generate->add_option("--drive-max", gen.drive_max);
  generate->add_option("--overlap", overlap)->check(CLI::IsMember({"sequential", "parallel", "mixed", "hub"}));
  generate->add_option("--theta", gen.theta_tw, "time window width");
  generate->add_option("--zeta", gen.zeta, "detour limit");
  generate->add_option("--ell", gen.ell, "discretization step");
  generate->add_option("--micro", micro, "write a suite of N oracle-sized instances into --out");
  add_common(generate, gen_c);

  Common bench_c;
  std::string bench_dir;
  BenchOptions bench_opt;
  bool timings = false;
  auto* bench_cmd = app.add_subcommand("bench", "run methods over a suite");
  bench_cmd->add_option("suite", bench_dir, "suite directory")->required();
  bench_cmd->add_option("--runs", bench_opt.runs, "runs per seed (default: suite.json)");
  bench_cmd->add_option("--methods", bench_opt.methods, "mip-only, ch+ls, dbmh")->delimiter(',');
  bench_cmd->add_option("--workers", bench_opt.workers, "parallel instance workers");
  bench_cmd->add_flag("--timings", timings, "fill the wall-clock columns");
  add_common(bench_cmd, bench_c);

  Common ablate_c;
  std::string ablate_dir;
  auto* ablate_cmd = app.add_subcommand("ablate", "ablation variants 0-6");
  ablate_cmd->add_option("suite", ablate_dir, "suite directory")->required();
  ablate_cmd->add_option("--workers", ablate_c.workers);
  add_common(ablate_cmd, ablate_c);

  Common cb_c;
  std::string cb_dir;
  auto* cb = app.add_subcommand("compare-bounds", "LB1, LB2, LB and dLB per instance");
  cb->add_option("suite", cb_dir, "suite directory")->required();
  cb->add_option("--workers", cb_c.workers);
  add_common(cb, cb_c);

  Common sweep_c;
  std::string sweep_dir, axis;
  std::vector<std::string> values;
  bool sweep_timings = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "re-solve a suite along one axis");
  sweep_cmd->add_option("suite", sweep_dir, "suite directory")->required();
  sweep_cmd->add_option("--axis", axis)->required()->check(
      CLI::IsMember({"theta_tw", "zeta", "ell", "exchange_policy", "decomposition"}));
  sweep_cmd->add_option("--values", values, "axis values")->delimiter(',');
  sweep_cmd->add_option("--workers", sweep_c.workers);
  sweep_cmd->add_flag("--timings", sweep_timings);
  add_common(sweep_cmd, sweep_c);

  Common fit_c;
  std::string fit_dir, grid;
  auto* fit_cmd = app.add_subcommand("fit", "one-at-a-time parameter fit");
  fit_cmd->add_option("suite", fit_dir, "suite directory")->required();
  fit_cmd->add_option("--grid", grid, "grid JSON")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--workers", fit_c.workers);
  add_common(fit_cmd, fit_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      return cmd_solve(solve_path, make_config(solve_c), solve_c.out.empty() ? "." : solve_c.out, policy_of(solve_c),
                       std::cerr);
    }
    if (*bounds) {
      Instance inst = load_instance(bounds_path);
      if (auto p = policy_of(bounds_c)) inst.exchange_policy = *p;
      std::cout << (bounds_json ? bounds_report_json(inst) : bounds_table(inst));
      return 0;
    }
    if (*oracle) {
      Instance inst = load_instance(oracle_path);
      if (auto p = policy_of(oracle_c)) inst.exchange_policy = *p;
      const OracleResult r = brute_force(inst);
      const std::string text = oracle_to_json(r, inst, build_graph(inst));
      emit(oracle_c, {{"oracle.json", text}});
      return r.feasible ? 0 : 2;
    }
    if (*generate) {
      const std::uint64_t seed = gen_c.seed.value_or(1);
      if (auto p = policy_of(gen_c)) gen.policy = *p;
      if (micro > 0) {
        if (gen_c.out.empty()) throw std::invalid_argument("--micro needs --out");
        Suite s;
        s.instances = micro_suite(micro, seed, gen.policy);
        s.spec.seeds = {seed};
        save_suite(s, gen_c.out);
        std::cerr << "wrote " << s.instances.size() << " instances to " << gen_c.out << "\n";
        return 0;
      }
      gen.overlap = parse_overlap(overlap);
      const GeneratedInstance g = generate_synthetic(gen, seed);
      const std::string text = dump_instance(g.instance);
      emit(gen_c, {{g.instance.name + ".json", text}});
      std::cerr << g.instance.name << ": " << g.arc_count << " arcs (" << g.size_class << ")\n";
      return 0;
    }
    if (*bench_cmd) {
      const Suite s = suite_with_policy(bench_dir, bench_c);
      bench_opt.seed = bench_c.seed;
      const SuiteResult r = bench(s, make_config(bench_c), bench_opt);
      emit(bench_c, {{"bench.csv", aggregates_csv(r, timings)}, {"bench_rows.csv", rows_csv(r, timings)}});
      return 0;
    }
    if (*ablate_cmd) {
      const Suite s = suite_with_policy(ablate_dir, ablate_c);
      const AblationResult r = ablate(s, make_config(ablate_c), ablate_c.workers);
      emit(ablate_c, {{"ablation.csv", ablation_summary_csv(r, s.best_known)}, {"ablation_rows.csv", ablation_rows_csv(r)}});
      return 0;
    }
    if (*cb) {
      const Suite s = suite_with_policy(cb_dir, cb_c);
      const auto rows = compare_bounds(s, make_config(cb_c), cb_c.workers);
      emit(cb_c, {{"bounds.csv", bounds_csv(rows)}, {"bounds_summary.csv", bounds_summary_csv(rows)}});
      return 0;
    }
    if (*sweep_cmd) {
      const Suite s = suite_with_policy(sweep_dir, sweep_c);
      const auto rows = sweep(s, parse_axis(axis), values, make_config(sweep_c), sweep_c.workers);
      emit(sweep_c, {{"sweep_" + axis + ".csv", sweep_csv(rows, sweep_timings)}});
      return 0;
    }
    if (*fit_cmd) {
      const Suite s = suite_with_policy(fit_dir, fit_c);
      const FitResult r = fit(s, slurp(grid), make_config(fit_c), fit_c.workers);
      emit(fit_c, {{"fitted.json", fit_to_json(r)}});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
