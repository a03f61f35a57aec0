#include <numeric>

#include "doctest.h"
#include "drsync/heuristic.hpp"
#include "drsync/oracle.hpp"
#include "fixtures.hpp"

using namespace drsync;

namespace {

// Every leg of the plan on its own driver.
Schedule one_driver_per_leg(const Plan& p, const TimeGraph& g) {
  Schedule s{p, {}};
  for (const auto& legs : p.legs) {
    for (int a : legs) s.duties.push_back({a});
  }
  std::sort(s.duties.begin(), s.duties.end(), [&](const auto& a, const auto& b) {
    return g.node(g.arc(a[0]).from).time < g.node(g.arc(b[0]).from).time;
  });
  return s;
}

bool feasible(const Schedule& s, const Instance& inst, const TimeGraph& g) {
  return check_feasibility(materialize(s, inst, g), inst, g).empty();
}

}  // namespace

TEST_CASE("construction reuses a driver at the terminal") {
  const Instance inst = fx::sequential_two();
  const TimeGraph g = build_graph(inst);
  const Solution s = construct(inst, g);
  CHECK(objective(s, g) == 1);
  CHECK(brute_force(inst).optimum == 1);
}

TEST_CASE("construction opens one driver per parallel ride") {
  const Instance inst = fx::three_parallel();
  const TimeGraph g = build_graph(inst);
  CHECK(objective(construct(inst, g), g) == 3);
}

TEST_CASE("a driver out of steering time waits for the next bus") {
  Instance inst = fx::blank("wait");
  fx::ride(inst, "R1", "L1", {"A", "B"}, {480, 750}, {265});
  fx::ride(inst, "R2", "L1", {"B", "C"}, {800, 900}, {100});
  const TimeGraph g = build_graph(inst);
  const Solution s = construct(inst, g);
  REQUIRE(objective(s, g) == 1);
  CHECK(check_feasibility(s, inst, g).empty());
  for (int a : s.routes[0]) CHECK(g.arc(a).family != ArcFamily::deadhead);
}

TEST_CASE("a segment nobody can drive stops construction") {
  const Instance inst = fx::impossible();
  const TimeGraph g = build_graph(inst);
  CHECK_THROWS_AS(construct(inst, g), ConstructionError);
}

TEST_CASE("construction uses a station only when it must") {
  const Instance inst = fx::long_segment();
  const TimeGraph g = build_graph(inst);
  const Plan p = initial_plan(inst, g);
  REQUIRE(p.legs[0].size() == 2);
  CHECK(g.arc(p.legs[0][0]).leg == LegKind::to_station);
  const Solution s = construct(inst, g);
  CHECK(check_feasibility(s, inst, g).empty());
  CHECK(objective(s, g) == 2);

  const Instance f = fx::fig2();
  const TimeGraph fg = build_graph(f);
  const Plan fp = initial_plan(f, fg);
  REQUIRE(fp.legs[0].size() == 1);
  CHECK(fg.arc(fp.legs[0][0]).leg == LegKind::direct);
}

TEST_CASE("perturbed selection") {
  CHECK(perturbed_select(10, 1.0, 0.0) == 0);
  CHECK(perturbed_select(10, 7.0, 0.0) == 0);
  CHECK(perturbed_select(10, 1.0, 0.5) == 5);
  CHECK(perturbed_select(10, 3.0, 0.9) == 7);
  CHECK(perturbed_select(1, 1.0, 0.99) == 0);
  CHECK(perturbed_select(10, 200.0, 0.9) == 0);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(perturbed_select(4, 2.0, rng) < 4);
}

TEST_CASE("rank and truncate") {
  std::vector<Candidate> c(10);
  for (int i = 0; i < 10; ++i) {
    c[i].theta = i * 10;
    c[i].hash = static_cast<std::uint64_t>(100 - i);
  }
  auto kept = rank_and_truncate(c, 0.2, 1);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].theta == 90);
  CHECK(kept[1].theta == 80);
  CHECK(rank_and_truncate({c[3]}, 0.2, 2).size() == 1);
  CHECK(rank_and_truncate(c, 0.2, 5).size() == 5);

  std::vector<Candidate> tie(3);
  tie[0].hash = 9;
  tie[1].hash = 2;
  tie[2].hash = 5;
  auto t = rank_and_truncate(tie, 1.0, 1);
  CHECK(t[0].hash == 2);
  CHECK(t[1].hash == 5);
  CHECK(t[2].hash == 9);
}

TEST_CASE("reassign dissolves a driver") {
  const Instance inst = fx::sequential_two();
  const TimeGraph g = build_graph(inst);
  const Schedule two = one_driver_per_leg(initial_plan(inst, g), g);
  REQUIRE(schedule_objective(two) == 2);
  const auto cands = operator_reassign_segments(two, inst, g);
  REQUIRE(!cands.empty());
  CHECK(schedule_objective(cands[0]) == 1);
  for (const auto& c : cands) CHECK(feasible(c, inst, g));

  const Instance par = fx::three_parallel();
  const TimeGraph pg = build_graph(par);
  CHECK(operator_reassign_segments(construct_schedule(par, pg), par, pg).empty());
  CHECK(operator_reassign_segments(Schedule{}, par, pg).empty());
}

TEST_CASE("postponing a ride enables a handoff") {
  const Instance inst = fx::handoff();
  const TimeGraph g = build_graph(inst);
  const Schedule s = construct_schedule(inst, g);
  REQUIRE(schedule_objective(s) == 2);
  const auto later = operator_postpone(s, inst, g);
  bool saved = false;
  for (const auto& c : later) {
    CHECK(feasible(c, inst, g));
    saved = saved || schedule_objective(c) == 1;
  }
  CHECK(saved);
  CHECK(brute_force(inst).optimum == 1);
}

TEST_CASE("shifts respect the windows") {
  Instance inst = fx::sequential_two();
  inst.theta_tw = 0;
  inst.zeta = 0;
  const TimeGraph g = build_graph(inst);
  const Schedule s = construct_schedule(inst, g);
  CHECK(operator_postpone(s, inst, g).empty());
  CHECK(operator_prepone(s, inst, g).empty());

  // Everything already at the latest copy: nothing to postpone.
  const Instance h = fx::handoff();
  const TimeGraph hg = build_graph(h);
  Schedule late = construct_schedule(h, hg);
  for (int i = 0; i < 3; ++i) {
    auto next = operator_postpone(late, h, hg);
    if (next.empty()) break;
    late = next.back();
  }
  for (const auto& c : operator_postpone(late, h, hg)) CHECK(feasible(c, h, hg));
}

TEST_CASE("station insertion and removal") {
  Rng rng(3);
  Instance inst = fx::blank("zero-detour");
  fx::ride(inst, "R1", "L1", {"I", "J"}, {480, 540}, {60}, {{{"S", 30, 30}}});
  TimeGraph g = build_graph(inst);
  const Schedule s = construct_schedule(inst, g);
  for (Operator op : {Operator::insert_random, Operator::insert_shortest, Operator::insert_sync}) {
    const auto c = operator_insert_stop(s, inst, g, op, rng, 3.0);
    REQUIRE(c.size() == 1);
    CHECK(c[0].plan.legs[0].size() == 2);
    CHECK(feasible(c[0], inst, g));
    const auto back = operator_remove_stop(c[0], inst, g);
    REQUIRE(back.size() == 1);
    CHECK(back[0].plan.legs[0].size() == 1);
  }
  CHECK(operator_remove_stop(s, inst, g).empty());

  inst.exchange_policy = ExchangePolicy::regular_stops;
  g = build_graph(inst);
  CHECK(operator_insert_stop(construct_schedule(inst, g), inst, g, Operator::insert_random, rng, 3.0).empty());

  const Instance lone = fx::sequential_two();
  const TimeGraph lg = build_graph(lone);
  CHECK(operator_insert_stop(construct_schedule(lone, lg), lone, lg, Operator::insert_shortest, rng, 3.0).empty());

  const Instance ls = fx::long_segment();
  const TimeGraph lsg = build_graph(ls);
  CHECK(operator_remove_stop(construct_schedule(ls, lsg), ls, lsg).empty());
}

TEST_CASE("inserted stations stay feasible and never beat the exhaustive optimum") {
  Instance inst = fx::blank("split");
  inst.legal = {60, 20, 200, 300};
  fx::ride(inst, "R1", "L1", {"A", "B"}, {480, 540}, {55}, {{{"X", 25, 35}}});
  fx::ride(inst, "R2", "L1", {"B", "A"}, {565, 625}, {55});
  const TimeGraph g = build_graph(inst);
  const Schedule s = construct_schedule(inst, g);
  const int before = schedule_objective(s);
  Rng rng(1);
  int best = before;
  for (const auto& c : operator_insert_stop(s, inst, g, Operator::insert_shortest, rng, 3.0)) {
    CHECK(feasible(c, inst, g));
    best = std::min(best, schedule_objective(c));
  }
  const auto oracle = brute_force(inst);
  CHECK(oracle.optimum <= best);
  CHECK(best <= before);
}

TEST_CASE("local search") {
  const Instance inst = fx::handoff();
  const TimeGraph g = build_graph(inst);
  SearchConfig cfg;
  cfg.seed = 11;
  const Schedule start = construct_schedule(inst, g);
  std::vector<Candidate> trail;
  const Schedule out = local_search(start, cfg, inst, g, [&](const Candidate& c) { trail.push_back(c); });
  CHECK(schedule_objective(out) == 1);
  CHECK(feasible(out, inst, g));
  for (std::size_t i = 1; i < trail.size(); ++i) CHECK(better(trail[i], trail[i - 1]));

  const Schedule again = local_search(start, cfg, inst, g);
  CHECK(again.plan == out.plan);
  CHECK(again.duties == out.duties);

  std::size_t steps = 0;
  local_search(out, cfg, inst, g, [&](const Candidate&) { ++steps; });
  CHECK(steps == 1);

  cfg.mode = SearchMode::vnd;
  CHECK(schedule_objective(local_search(start, cfg, inst, g)) == 1);
}

TEST_CASE("random streams") {
  Rng a = substream(1, 2, 3), b = substream(1, 2, 3), c = substream(1, 2, 4);
  CHECK(a() == b());
  CHECK(substream(1, 2, 3)() != c());
  Rng r(9);
  for (int i = 0; i < 100; ++i) {
    const double y = unit_draw(r);
    CHECK(y >= 0.0);
    CHECK(y < 1.0);
  }
  CHECK(parse_search_mode("vnd") == SearchMode::vnd);
  CHECK_THROWS(parse_search_mode("tabu"));
}
