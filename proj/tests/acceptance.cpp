// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "drsync/bounds.hpp"
#include "drsync/harness.hpp"
#include "drsync/heuristic.hpp"
#include "drsync/oracle.hpp"
#include "fixtures.hpp"

using namespace drsync;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << what << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::vector<Instance>& micro() {
  static const std::vector<Instance> v = micro_suite(100, 2026);
  return v;
}

const std::vector<OracleResult>& oracle_micro() {
  static const std::vector<OracleResult> v = [] {
    std::vector<OracleResult> out(micro().size());
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = brute_force(micro()[i]); });
    return out;
  }();
  return v;
}

void exact_on_micro() {
  std::vector<RunReport> reps(micro().size());
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < reps.size(); ++i) reps[i] = run(micro()[i], DbmhConfig{});
  const double took = seconds_since(t0);
  int agree = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& o = oracle_micro()[i];
    const bool ok = o.feasible ? reps[i].status == RunStatus::optimal && reps[i].objective == o.optimum
                               : reps[i].status == RunStatus::infeasible;
    agree += ok;
    if (!ok && first_bad.empty()) {
      first_bad = " first mismatch " + micro()[i].name + " oracle " + std::to_string(o.optimum) + " got " +
                  std::to_string(reps[i].objective);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%zu match the exhaustive optimum in %.1f s", agree, reps.size(), took);
  report(1, "micro instances solved to proven optimality", agree == static_cast<int>(reps.size()) && took < 120,
         buf + first_bad);
}

void bound_sandwich() {
  int ok = 0, n = 0, lb1_wins = 0, lb2_wins = 0;
  for (std::size_t i = 0; i < micro().size(); ++i) {
    const auto& o = oracle_micro()[i];
    if (!o.feasible) continue;
    ++n;
    const auto b = compute_bounds(micro()[i], build_graph(micro()[i]));
    ok += b.lb <= o.optimum && o.optimum <= b.ub && b.lb == std::max(b.lb1, b.lb2);
    lb1_wins += b.lb1 > b.lb2;
    lb2_wins += b.lb2 > b.lb1;
  }
  report(2, "LB <= optimum <= UB, both bounds useful", ok == n && lb1_wins > 0 && lb2_wins > 0,
         std::to_string(ok) + "/" + std::to_string(n) + " sandwiched, lb1 > lb2 on " + std::to_string(lb1_wins) +
             ", lb2 > lb1 on " + std::to_string(lb2_wins));
}

void gap_family() {
  bool ok = true, lifted = false;
  std::string detail;
  for (int k = 2; k <= 4; ++k) {
    const Instance inst = fx::gap(k);
    const RunReport r = run(inst, DbmhConfig{});
    const int opt = brute_force(inst).optimum;
    ok = ok && r.status == RunStatus::optimal && r.dlb == opt && r.objective == opt;
    lifted = lifted || r.dlb >= 1.2 * r.clb;
    detail += "k=" + std::to_string(k) + " cLB " + std::to_string(r.clb) + " dLB " + std::to_string(r.dlb) +
              " opt " + std::to_string(opt) + "; ";
  }
  report(3, "destructive bound reaches the optimum on the gap family", ok && lifted, detail);
}

void exchange_policy() {
  const int full = brute_force(fx::exchange(ExchangePolicy::regular_and_intermediate)).optimum;
  const int none = brute_force(fx::exchange(ExchangePolicy::none)).optimum;
  Suite s;
  s.instances = {fx::exchange()};
  const auto rows = sweep(s, SweepAxis::exchange_policy, {"none", "full"}, DbmhConfig{});
  const bool ok = full >= 0 && full < none && rows.size() == 2 && rows[0].objective == none &&
                  rows[1].objective == full;
  report(4, "mid-route exchange saves drivers", ok,
         "oracle full " + std::to_string(full) + " vs none " + std::to_string(none) + ", sweep " +
             std::to_string(rows.size() == 2 ? rows[1].objective : -1) + " vs " +
             std::to_string(rows.size() == 2 ? rows[0].objective : -1));
}

void operators_stay_feasible() {
  constexpr int kTarget = 10000;
  int applied = 0, bad = 0, nonmonotone = 0, trajectories = 0;
  std::size_t idx = 0;
  Rng rng(17);
  while (applied < kTarget && idx < 10 * micro().size()) {
    const Instance& inst = micro()[idx % micro().size()];
    ++idx;
    if (!oracle_micro()[(idx - 1) % micro().size()].feasible) continue;
    const TimeGraph g = build_graph(inst);
    Schedule cur;
    try {
      cur = construct_schedule(inst, g);
    } catch (const ConstructionError&) {
      continue;
    }
    for (int step = 0; step < 60 && applied < kTarget; ++step) {
      const auto op = static_cast<Operator>(rng() % kOperatorCount);
      const auto cands = apply_operator(op, cur, inst, g, rng, 3.0);
      for (const auto& c : cands) {
        ++applied;
        bad += !check_feasibility(materialize(c, inst, g), inst, g).empty();
      }
      if (!cands.empty()) cur = cands[rng() % cands.size()];
    }
    SearchConfig cfg;
    cfg.seed = idx;
    cfg.max_iterations = 200;
    std::vector<Candidate> trail;
    local_search(construct_schedule(inst, g), cfg, inst, g, [&](const Candidate& c) { trail.push_back(c); });
    ++trajectories;
    for (std::size_t i = 1; i < trail.size(); ++i) nonmonotone += !better(trail[i], trail[i - 1]);
  }
  report(5, "operators keep feasibility, search never worsens", applied >= kTarget && bad == 0 && nonmonotone == 0,
         std::to_string(applied) + " applications, " + std::to_string(bad) + " infeasible, " +
             std::to_string(trajectories) + " trajectories with " + std::to_string(nonmonotone) + " worsening steps");
}

void wider_windows() {
  int checked = 0, ok = 0;
  for (std::size_t i = 0; i < micro().size() && checked < 20; ++i) {
    Instance narrow, wide;
    try {
      narrow = apply_axis(micro()[i], SweepAxis::theta_tw, "10");
      wide = apply_axis(micro()[i], SweepAxis::theta_tw, "30");
    } catch (const std::invalid_argument&) {
      continue;
    }
    OracleResult a, b;
    try {
      a = brute_force(narrow);
      b = brute_force(wide);
    } catch (const OracleRefusal&) {
      continue;
    }
    ++checked;
    ok += !a.feasible || (b.feasible && b.optimum <= a.optimum);
  }
  report(6, "wider windows never need more drivers", checked == 20 && ok == checked,
         std::to_string(ok) + "/" + std::to_string(checked) + " instances");
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / "drsync_acceptance";
  fs::remove_all(dir);
  Suite s;
  for (std::size_t i = 0; i < 10; ++i) s.instances.push_back(micro()[i]);
  save_suite(s, dir / "suite");
  std::ostringstream log;
  bool same = true;
  for (const auto& inst : s.instances) {
    const fs::path in = dir / "suite" / (inst.name + ".json");
    const int a = cmd_solve(in, DbmhConfig{}, dir / "a" / inst.name, std::nullopt, log);
    const int b = cmd_solve(in, DbmhConfig{}, dir / "b" / inst.name, std::nullopt, log);
    same = same && a == b;
    for (const char* f : {"report.json", "solution.json"}) {
      same = same && slurp(dir / "a" / inst.name / f) == slurp(dir / "b" / inst.name / f);
    }
  }
  const Suite loaded = load_suite(dir / "suite");
  BenchOptions o;
  o.methods = {"dbmh", "ch+ls"};
  o.workers = 1;
  const SuiteResult x = bench(loaded, DbmhConfig{}, o);
  o.workers = 4;
  const SuiteResult y = bench(loaded, DbmhConfig{}, o);
  const bool bench_same = rows_csv(x) == rows_csv(y) && aggregates_csv(x) == aggregates_csv(y);
  report(7, "identical inputs give identical outputs", same && bench_same,
         std::string("solve ") + (same ? "identical" : "differs") + ", bench " + (bench_same ? "identical" : "differs"));
}

void ablation_order() {
  Suite s;
  for (std::size_t i = 0; i < 30; ++i) s.instances.push_back(micro()[i]);
  const AblationResult r = ablate(s, DbmhConfig{}, 4);
  std::map<std::string, int> full;
  for (const auto& row : r.rows) {
    if (row.variant == 0) full[row.instance] = row.objective;
  }
  int worse = 0, compared = 0;
  for (const auto& row : r.rows) {
    if (row.variant == 0 || row.objective < 0) continue;
    ++compared;
    const int f = full[row.instance];
    worse += f < 0 || f > row.objective;
  }
  report(8, "the full method is never beaten by an ablated variant", worse == 0,
         std::to_string(compared) + " comparisons, " + std::to_string(worse) + " where a variant won");
}

}  // namespace

int main() {
  exact_on_micro();
  bound_sandwich();
  gap_family();
  exchange_policy();
  operators_stay_feasible();
  wider_windows();
  determinism();
  ablation_order();
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
