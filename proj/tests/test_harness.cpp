#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "drsync/harness.hpp"
#include "drsync/oracle.hpp"
#include "fixtures.hpp"

using namespace drsync;
namespace fs = std::filesystem;

namespace {

DbmhConfig quick() {
  DbmhConfig c;
  c.global_limit = 60;
  c.eta_lb = 30;
  c.eta_mip = 5;
  c.eta_ls = 5;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "drsync_harness" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Suite suite_of(std::vector<Instance> v) {
  Suite s;
  for (auto& i : v) s.instances.push_back(std::move(i));
  std::sort(s.instances.begin(), s.instances.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return s;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("solve command exit codes") {
  const fs::path dir = scratch("solve");
  save_instance(fx::handoff(), dir / "handoff.json");
  save_instance(fx::impossible(), dir / "impossible.json");
  std::ostringstream log;
  CHECK(cmd_solve(dir / "handoff.json", quick(), dir / "a", std::nullopt, log) == 0);
  CHECK(fs::exists(dir / "a" / "solution.json"));
  CHECK(fs::exists(dir / "a" / "report.json"));
  CHECK(fs::exists(dir / "a" / "timings.json"));
  CHECK(cmd_solve(dir / "impossible.json", quick(), dir / "b", std::nullopt, log) == 2);
  CHECK_FALSE(fs::exists(dir / "b" / "solution.json"));
  CHECK(cmd_solve(dir / "missing.json", quick(), dir / "c", std::nullopt, log) == 1);
  CHECK(log.str().find("error:") != std::string::npos);

  CHECK(cmd_solve(dir / "handoff.json", quick(), dir / "d", std::nullopt, log) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "d" / "report.json"));
  CHECK(slurp(dir / "a" / "solution.json") == slurp(dir / "d" / "solution.json"));
}

TEST_CASE("suites on disk") {
  const fs::path dir = scratch("suite");
  Suite s = suite_of({fx::handoff(), fx::fig2()});
  s.spec.runs = 2;
  s.spec.methods = {"dbmh", "ch+ls"};
  record_best_known(s, "handoff", 2);
  record_best_known(s, "handoff", 1);
  record_best_known(s, "handoff", 3);
  CHECK(s.best_known.at("handoff") == 1);
  save_suite(s, dir);
  const Suite back = load_suite(dir);
  REQUIRE(back.instances.size() == 2);
  CHECK(back.instances[0].name == "fig2");
  CHECK(back.instances[1] == s.instances[1]);
  CHECK(back.spec.runs == 2);
  CHECK(back.spec.methods == s.spec.methods);
  CHECK(back.best_known == s.best_known);
  CHECK_THROWS(load_suite(dir / "nowhere"));
}

TEST_CASE("micro suite") {
  const auto a = micro_suite(6, 4), b = micro_suite(6, 4);
  REQUIRE(a.size() == 6);
  CHECK(a == b);
  CHECK(a[0].name == "micro-000");
  for (const auto& inst : a) {
    CHECK(inst.rides.size() <= 4);
    CHECK(build_graph(inst).arcs().size() <= 300);
  }
  for (const auto& inst : micro_suite(4, 4, ExchangePolicy::none)) CHECK(inst.exchange_policy == ExchangePolicy::none);
}

TEST_CASE("worker pool") {
  std::vector<int> out(50, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  parallel_for(0, 4, [&](std::size_t) { FAIL("called"); });
}

TEST_CASE("methods") {
  CHECK_FALSE(method_config("mip-only", {}).toggles.use_ch);
  CHECK_FALSE(method_config("ch+ls", {}).toggles.use_mip);
  CHECK(method_config("dbmh", {}).toggles.use_dbi);
  CHECK_THROWS_AS(method_config("tabu", {}), std::invalid_argument);
}

TEST_CASE("an empty suite gives headers only") {
  const SuiteResult r = bench(Suite{}, quick());
  CHECK(lines(rows_csv(r)) == 1);
  CHECK(lines(aggregates_csv(r)) == 1);
  CHECK(lines(ablation_rows_csv(ablate(Suite{}, quick()))) == 1);
  CHECK(lines(sweep_csv(sweep(Suite{}, SweepAxis::zeta, {}, quick()))) == 1);
}

TEST_CASE("bench") {
  Suite s = suite_of({fx::handoff(), fx::gap(3), fx::sequential_two()});
  BenchOptions o;
  o.methods = {"dbmh", "ch+ls"};
  o.workers = 3;
  const SuiteResult a = bench(s, quick(), o);
  o.workers = 1;
  const SuiteResult b = bench(s, quick(), o);
  CHECK(rows_csv(a) == rows_csv(b));
  CHECK(aggregates_csv(a) == aggregates_csv(b));
  CHECK(rows_csv(a).find(",,") != std::string::npos);  // no time column by default
  REQUIRE(a.rows.size() == 6);
  for (const auto& row : a.rows) {
    REQUIRE(row.delta_z_pct);
    CHECK(*row.delta_z_pct >= 0);
    if (row.method == "dbmh") {
      CHECK(row.status == "optimal");
      CHECK(*row.delta_z_pct == 0);
      REQUIRE(row.gap_pct);
      CHECK(*row.gap_pct == 0);
    }
  }
}

TEST_CASE("ablation") {
  const Suite s = suite_of({fx::handoff(), fx::gap(2)});
  const AblationResult r = ablate(s, quick(), 2);
  REQUIRE(r.rows.size() == 14);
  const SuiteResult b = bench(s, quick());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.rows[i].variant == 0);
    CHECK(r.rows[i].objective == b.rows[i].objective);
  }
  for (const auto& row : r.rows) {
    for (const auto& base : r.rows) {
      if (base.variant == 0 && base.instance == row.instance && row.objective >= 0) CHECK(base.objective <= row.objective);
    }
  }
  const std::string sum = ablation_summary_csv(r, {});
  CHECK(lines(sum) == 8);
  CHECK(sum.find("\n0,2,100.00,100.00,0.00\n") != std::string::npos);
}

TEST_CASE("bound comparison") {
  const Suite s = suite_of({fx::steering_heavy(), fx::three_parallel(), fx::gap(3)});
  const auto rows = compare_bounds(s, quick());
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.lb <= r.dlb);
    CHECK(r.dlb <= r.objective);
    CHECK(r.objective <= r.ub);
  }
  CHECK(bounds_summary_csv(rows) ==
        "instances,lb1_dominates_pct,lb2_dominates_pct,tie_pct,mean_dlb_gain_pct\n3,33.33,33.33,33.33,66.67\n");
  CHECK(lines(bounds_csv(rows)) == 4);
}

TEST_CASE("axis values") {
  CHECK(parse_axis("theta_tw") == SweepAxis::theta_tw);
  CHECK(to_string(SweepAxis::exchange_policy) == "exchange_policy");
  CHECK_THROWS(parse_axis("speed"));
  CHECK(default_axis_values(SweepAxis::theta_tw) == std::vector<std::string>{"10", "30"});
  const Instance base = fx::handoff();
  CHECK(apply_axis(base, SweepAxis::zeta, "5").zeta == 5);
  CHECK(apply_axis(base, SweepAxis::exchange_policy, "none").exchange_policy == ExchangePolicy::none);
  CHECK_THROWS_AS(apply_axis(base, SweepAxis::ell, "7"), std::invalid_argument);
  CHECK_THROWS(apply_axis(base, SweepAxis::exchange_policy, "sometimes"));
}

TEST_CASE("policy and window sweeps") {
  const Suite s = suite_of({fx::exchange()});
  const auto pol = sweep(s, SweepAxis::exchange_policy, {"none", "regular", "full"}, quick(), 2);
  REQUIRE(pol.size() == 3);
  CHECK(pol[0].objective == brute_force(fx::exchange(ExchangePolicy::none)).optimum);
  CHECK(pol[2].objective == brute_force(fx::exchange()).optimum);
  REQUIRE(pol[2].delta);
  CHECK(*pol[2].delta < 0);
  CHECK(*pol[1].delta <= 0);

  const auto th = sweep(suite_of({fx::handoff(), fx::gap(3)}), SweepAxis::theta_tw, {}, quick());
  for (const auto& r : th) {
    REQUIRE(r.delta);
    CHECK(*r.delta <= 0);
  }

  const auto dec = sweep(suite_of({fx::handoff()}), SweepAxis::decomposition, {}, quick());
  REQUIRE(dec.size() == 2);
  CHECK(dec[0].objective >= 0);
  CHECK(dec[1].objective >= dec[0].objective);
}

TEST_CASE("fit") {
  Suite s = suite_of({fx::handoff(), fx::gap(2)});
  const FitResult one = fit(s, R"({"mu": [0.3]})", quick());
  CHECK(one.config.search.mu == 0.3);
  const FitResult a = fit(s, R"({"p": [1, 3], "eta_ls": [1, 5]})", quick());
  const FitResult b = fit(s, R"({"p": [1, 3], "eta_ls": [1, 5]})", quick());
  CHECK(fit_to_json(a) == fit_to_json(b));
  CHECK(a.fitted_delta_z_pct <= a.default_delta_z_pct);
  CHECK_THROWS_AS(fit(s, R"({"speed": [1]})", quick()), std::invalid_argument);
  CHECK_THROWS_AS(fit(s, R"({"p": []})", quick()), std::invalid_argument);
}

TEST_CASE("bounds report") {
  const Instance inst = fx::three_parallel();
  CHECK(bounds_report_json(inst).find("\"lb2\": 3") != std::string::npos);
  CHECK(bounds_table(inst).find("LB2") != std::string::npos);
}
