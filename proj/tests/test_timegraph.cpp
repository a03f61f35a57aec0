#include <algorithm>
#include <set>

#include "doctest.h"
#include "drsync/timegraph.hpp"
#include "fixtures.hpp"

using namespace drsync;

namespace {

std::string label(const TimeGraph& g, int n) {
  const auto& node = g.node(n);
  if (node.is_source) return "src";
  if (node.is_sink) return "snk";
  return g.location_name(node.location) + "@" + std::to_string(node.time);
}

std::set<std::string> arcs_of(const TimeGraph& g, ArcFamily fam) {
  std::set<std::string> out;
  for (const auto& a : g.arcs()) {
    if (a.family == fam) out.insert(label(g, a.from) + ">" + label(g, a.to));
  }
  return out;
}

}  // namespace

TEST_CASE("two copies per customer stop and a single station copy") {
  const TimeGraph g = build_graph(fx::fig2());
  const Instance inst = fx::fig2();
  CHECK(g.nodes().size() == 7);
  CHECK(g.stop_copies(0, 0).size() == 2);
  CHECK(g.stop_copies(0, 1).size() == 2);
  CHECK(g.copies(inst.stop_index("S")).size() == 1);

  CHECK(arcs_of(g, ArcFamily::steering) ==
        std::set<std::string>{"I@475>J@535", "I@475>J@545", "I@485>J@545", "I@475>S@505", "S@505>J@545"});
  CHECK(arcs_of(g, ArcFamily::deadhead) == arcs_of(g, ArcFamily::steering));
  CHECK(arcs_of(g, ArcFamily::waiting) == std::set<std::string>{"I@475>I@485", "J@535>J@545"});
  CHECK(arcs_of(g, ArcFamily::depot).size() == 10);
  CHECK(g.arcs().size() == 22);
  const auto st = g.stats();
  CHECK(st.nodes == 7);
  CHECK(st.arcs == 22);
  CHECK(st.size_class == "small");
}

TEST_CASE("wider windows give more copies") {
  Instance inst = fx::fig2();
  inst.theta_tw = 30;
  inst.zeta = 10;
  const TimeGraph g = build_graph(inst);
  CHECK(g.stop_copies(0, 0).size() == 4);
  CHECK(g.stop_copies(0, 1).size() == 4);
  // Station copies stay strictly fewer than customer copies.
  CHECK(g.copies(inst.stop_index("S")).size() < 4);
}

TEST_CASE("arc invariants") {
  for (const Instance& inst : {fx::fig2(), fx::exchange(), fx::long_segment(), fx::handoff()}) {
    const TimeGraph g = build_graph(inst);
    for (const auto& a : g.arcs()) {
      if (a.family == ArcFamily::depot) {
        CHECK(a.mode == 0);
        CHECK(a.duration == 0);
        continue;
      }
      CHECK(g.node(a.to).time == g.node(a.from).time + a.duration);
      CHECK(a.duration > 0);
      if (a.family == ArcFamily::steering) {
        CHECK(a.mode == 1);
        CHECK(a.duration <= inst.legal.t_cs);
        CHECK(a.consumption == a.duration);
        REQUIRE(a.twin >= 0);
        CHECK(g.arc(a.twin).family == ArcFamily::deadhead);
        CHECK(g.arc(a.twin).from == a.from);
        CHECK(g.arc(a.twin).to == a.to);
      } else {
        CHECK(a.mode == 0);
        CHECK(a.consumption <= 0);
      }
    }
    CHECK(g.to_json() == build_graph(inst).to_json());
  }
}

TEST_CASE("segments longer than t_cs have no direct arc") {
  const TimeGraph g = build_graph(fx::impossible());
  CHECK(arcs_of(g, ArcFamily::steering).empty());
  const TimeGraph h = build_graph(fx::long_segment());
  for (const auto& a : h.arcs()) {
    if (a.family == ArcFamily::steering) CHECK(a.leg != LegKind::direct);
  }
  CHECK(!arcs_of(h, ArcFamily::steering).empty());
}

TEST_CASE("break-length waits renew the steering resource") {
  Instance inst = fx::blank("wait");
  inst.theta_tw = 60;
  inst.zeta = 10;
  fx::ride(inst, "R1", "L1", {"A", "B"}, {480, 540}, {50});
  const TimeGraph g = build_graph(inst);
  // A waiting chain: 10-minute arcs never reach t_b on their own.
  for (const auto& a : g.arcs()) {
    if (a.family == ArcFamily::waiting) CHECK(a.consumption == 0);
  }
  inst.ell = 30;
  inst.theta_tw = 60;
  inst.legal.t_b = 30;
  const TimeGraph h = build_graph(inst);
  bool renewing = false;
  for (const auto& a : h.arcs()) {
    if (a.family == ArcFamily::waiting && a.duration >= inst.legal.t_b) {
      CHECK(a.consumption < 0);
      renewing = true;
    }
  }
  CHECK(renewing);
}

TEST_CASE("cut sets") {
  const Instance inst = fx::fig2();
  const TimeGraph g = build_graph(inst);
  auto depot_out = g.cut("depot", CutKind::out);
  CHECK(depot_out == g.out_arcs(TimeGraph::kSource));

  std::set<std::string> steer_out;
  for (int a : g.cut("I", CutKind::out_steering)) steer_out.insert(label(g, g.arc(a).from) + ">" + label(g, g.arc(a).to));
  CHECK(steer_out == std::set<std::string>{"I@475>J@545", "I@475>J@535", "I@485>J@545", "I@475>S@505"});
  CHECK(g.cut("S", CutKind::in_steering).size() == 1);
  CHECK_THROWS_AS(g.cut("nowhere", CutKind::out), std::out_of_range);

  Instance far = fx::fig2();
  far.rides[0].stations[0][0] = {"S", 30, 70};  // detour 40 > zeta
  const TimeGraph h = build_graph(far);
  CHECK(h.cut("S", CutKind::in_steering).empty());
}

TEST_CASE("size classes") {
  CHECK(size_class_for(999) == "small");
  CHECK(size_class_for(1000) == "medium");
  CHECK(size_class_for(4999) == "medium");
  CHECK(size_class_for(5000) == "large");
}

TEST_CASE("stations vanish unless the policy allows them") {
  Instance inst = fx::fig2();
  inst.exchange_policy = ExchangePolicy::regular_stops;
  const TimeGraph g = build_graph(inst);
  CHECK(g.nodes().size() == 6);
  CHECK(arcs_of(g, ArcFamily::steering).size() == 3);
}

TEST_CASE("dot output names every node") {
  const TimeGraph g = build_graph(fx::fig2());
  const std::string dot = g.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("S@505") != std::string::npos);
}
