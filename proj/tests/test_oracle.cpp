#include "doctest.h"
#include "drsync/bounds.hpp"
#include "drsync/oracle.hpp"
#include "fixtures.hpp"

using namespace drsync;

namespace {

void check_witness(const Instance& inst) {
  const TimeGraph g = build_graph(inst);
  const auto r = brute_force(inst);
  REQUIRE(r.feasible);
  CHECK(objective(r.witness, g) == r.optimum);
  CHECK(check_feasibility(r.witness, inst, g).empty());
}

}  // namespace

TEST_CASE("small optima") {
  CHECK(brute_force(fx::fig2()).optimum == 1);
  CHECK(brute_force(fx::sequential_two()).optimum == 1);
  CHECK(brute_force(fx::three_parallel()).optimum == 3);
  CHECK(brute_force(fx::handoff()).optimum == 1);
  CHECK(brute_force(fx::long_segment()).optimum == 2);
  const auto none = brute_force(fx::impossible());
  CHECK_FALSE(none.feasible);
  CHECK(none.optimum == -1);
  CHECK(none.witness.routes.empty());
}

TEST_CASE("witnesses are feasible and match the optimum") {
  for (const Instance& inst : {fx::fig2(), fx::sequential_two(), fx::three_parallel(), fx::handoff(), fx::gap(3),
                               fx::long_segment(), fx::exchange(), fx::steering_heavy()}) {
    CAPTURE(inst.name);
    check_witness(inst);
  }
}

TEST_CASE("refusals") {
  Instance many = fx::blank("many");
  for (int i = 0; i < 5; ++i) {
    fx::ride(many, "R" + std::to_string(i), "L1", {"A", "B"}, {480 + 100 * i, 540 + 100 * i}, {60});
  }
  CHECK_THROWS_AS(brute_force(many), OracleRefusal);
  OracleLimits tight;
  tight.max_arcs = 10;
  CHECK_THROWS_AS(brute_force(fx::handoff(), tight), OracleRefusal);
}

TEST_CASE("bounds sandwich the optimum") {
  for (const Instance& inst : {fx::fig2(), fx::three_parallel(), fx::gap(2), fx::gap(4), fx::handoff(),
                               fx::steering_heavy(), fx::exchange()}) {
    CAPTURE(inst.name);
    const auto b = compute_bounds(inst, build_graph(inst));
    const int opt = brute_force(inst).optimum;
    CHECK(b.lb <= opt);
    CHECK(opt <= b.ub);
  }
}

TEST_CASE("wider windows never hurt") {
  for (const Instance& base : {fx::handoff(), fx::exchange(), fx::gap(3)}) {
    Instance narrow = base, wide = base;
    narrow.theta_tw = 10;
    wide.theta_tw = 30;
    CAPTURE(base.name);
    CHECK(brute_force(wide).optimum <= brute_force(narrow).optimum);
  }
}

TEST_CASE("exchange policies") {
  const int full = brute_force(fx::exchange(ExchangePolicy::regular_and_intermediate)).optimum;
  const int regular = brute_force(fx::exchange(ExchangePolicy::regular_stops)).optimum;
  const int none = brute_force(fx::exchange(ExchangePolicy::none)).optimum;
  CHECK(full <= regular);
  CHECK(regular <= none);
  CHECK(full == 3);
  CHECK(none == 4);
}

TEST_CASE("oracle JSON") {
  const Instance inst = fx::fig2();
  const TimeGraph g = build_graph(inst);
  const std::string j = oracle_to_json(brute_force(inst), inst, g);
  CHECK(j.find("\"optimum\": 1") != std::string::npos);
  const Instance bad = fx::impossible();
  CHECK(oracle_to_json(brute_force(bad), bad, build_graph(bad)).find("\"optimum\": null") != std::string::npos);
}
