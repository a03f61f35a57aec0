#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "drsync/bounds.hpp"
#include "drsync/heuristic.hpp"
#include "drsync/mip.hpp"
#include "drsync/oracle.hpp"
#include "fixtures.hpp"

using namespace drsync;

namespace {

Model model_for(const Instance& inst, int start = 0) {
  auto ip = std::make_shared<const Instance>(inst);
  auto g = std::make_shared<const TimeGraph>(build_graph(*ip));
  return build_model(ip, g, compute_bounds(*ip, *g), start);
}

const Row* find_row(const std::vector<Row>& rows, const std::string& name) {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("model sizes follow the graph") {
  const Model m = model_for(fx::fig2());
  CHECK(m.driver_count == 1);
  CHECK(m.binary_count() == 22);
  CHECK(m.continuous_count() == 7);
  const auto rows = model_rows(m);
  const Row* cover = find_row(rows, "cover_0_0");
  REQUIRE(cover);
  CHECK(cover->sense == "=");
  CHECK(cover->rhs == 1);
  CHECK(cover->terms.size() == 4);  // three direct legs plus the way into the station
}

TEST_CASE("lower bound rows") {
  Model m = model_for(fx::three_parallel());
  REQUIRE(m.lower_bound == 3);
  const auto rows = model_rows(m);
  const Row* lb = find_row(rows, "lower_bound");
  REQUIRE(lb);
  CHECK(lb->rhs == 3);
  CHECK(lb->sense == ">=");
  for (int k = 0; k < 3; ++k) {
    CHECK(find_row(rows, "active_out_" + std::to_string(k)));
    CHECK(find_row(rows, "active_in_" + std::to_string(k)));
  }
  CHECK_FALSE(find_row(rows, "active_out_3"));
}

TEST_CASE("restricted copies") {
  const Model m = model_for(fx::sequential_two());
  const Model r = restrict(m, 1);
  CHECK(r.cardinality_cap == 1);
  CHECK_FALSE(m.cardinality_cap);
  CHECK_THROWS(restrict(m, -1));
  CHECK(find_row(model_rows(r), "cap"));
}

TEST_CASE("LP export") {
  const Model m = model_for(fx::fig2());
  const std::string a = model_to_lp(m), b = model_to_lp(m);
  CHECK(a == b);
  CHECK(a.find("Minimize") != std::string::npos);
  CHECK(a.find("Subject To") != std::string::npos);
  CHECK(a.find("Binaries") != std::string::npos);
  CHECK(a.rfind("End\n") == a.size() - 4);

  const auto dir = std::filesystem::temp_directory_path() / "drsync_lp";
  std::filesystem::create_directories(dir);
  export_model(m, (dir / "fig2.lp").string());
  std::ifstream f(dir / "fig2.lp");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a);
  CHECK_THROWS_AS(export_model(m, "/nonexistent/dir/x.lp"), std::runtime_error);

  const Model empty = model_for(fx::blank("empty"));
  CHECK(empty.driver_count == 0);
  const std::string e = model_to_lp(empty);
  CHECK(e.find("Subject To\nEnd\n") != std::string::npos);
  CHECK(e.find("Binaries") == std::string::npos);
}

TEST_CASE("exact search") {
  SolverConfig cfg;
  cfg.time_limit = 30;
  SUBCASE("single segment") {
    const auto out = solve(model_for(fx::fig2()), cfg);
    CHECK(out.status == SolveStatus::optimal);
    CHECK(out.best_bound == 1);
    REQUIRE(out.best_solution);
    CHECK(brute_force(fx::fig2()).optimum == 1);
  }
  SUBCASE("chain of two rides") {
    const Model m = model_for(fx::sequential_two());
    const auto out = solve(m, cfg);
    CHECK(out.status == SolveStatus::optimal);
    REQUIRE(out.best_solution);
    CHECK(objective(*out.best_solution, *m.graph) == 1);
    CHECK(check_feasibility(*out.best_solution, *m.instance, *m.graph).empty());
    Model below = restrict(m, 0);
    below.lower_bound = 0;
    CHECK(solve(below, cfg).status == SolveStatus::infeasible);
  }
  SUBCASE("gap instance") {
    const Model m = model_for(fx::gap(3));
    CHECK(m.lower_bound == 1);
    const auto out = solve(m, cfg);
    CHECK(out.status == SolveStatus::optimal);
    CHECK(out.best_bound == 3);
    Model capped = restrict(m, 2);
    CHECK(solve(capped, cfg).status == SolveStatus::infeasible);
    CHECK(solve(restrict(m, m.driver_count), cfg).best_bound == 3);
  }
  SUBCASE("no drivable leg") {
    const auto out = solve(model_for(fx::impossible()), cfg);
    CHECK(out.status == SolveStatus::infeasible);
    CHECK_FALSE(out.best_solution);
  }
}

TEST_CASE("start solutions and callbacks") {
  const Instance inst = fx::handoff();
  const Model m = model_for(inst, 2);
  SolverConfig cfg;
  cfg.time_limit = 30;
  cfg.start_solution = construct(inst, *m.graph);
  int calls = 0;
  cfg.incumbent_callback = [&](const Solution&) -> std::optional<Solution> {
    ++calls;
    return std::nullopt;
  };
  const auto out = solve(m, cfg);
  CHECK(out.status == SolveStatus::optimal);
  CHECK(out.best_bound == 1);
  CHECK(calls >= 1);
  CHECK(!out.incumbent_log.empty());
  CHECK(incumbent_log_csv(out.incumbent_log).rfind("time_s,objective,bound\n", 0) == 0);
  for (std::size_t i = 1; i < out.incumbent_log.size(); ++i) {
    CHECK(out.incumbent_log[i].objective <= out.incumbent_log[i - 1].objective);
  }
}

TEST_CASE("extraction") {
  const Instance inst = fx::sequential_two();
  const Model m = model_for(inst);
  const Solution s = construct(inst, *m.graph);
  std::vector<std::pair<int, int>> x;
  for (std::size_t k = 0; k < s.routes.size(); ++k) {
    for (int a : s.routes[k]) x.emplace_back(static_cast<int>(k), a);
  }
  const Solution back = extract_solution(m, x);
  CHECK(objective(back, *m.graph) == objective(s, *m.graph));
  CHECK(check_feasibility(back, inst, *m.graph).empty());
  CHECK_THROWS_AS(extract_solution(m, {}), ExtractionError);
}
