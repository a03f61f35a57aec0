#include "drsync/heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace drsync {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Minutes arrival(const TimeGraph& g, int a) { return g.node(g.arc(a).to).time; }

bool extend_ride(const TimeGraph& g, int r, int seg, int segments, int node, std::vector<int>& legs, int& deepest) {
  if (seg == segments) return true;
  deepest = std::max(deepest, seg);
  std::vector<int> direct;
  std::vector<std::pair<int, int>> via;
  for (int a : g.segment_arcs(r, seg)) {
    const auto& arc = g.arc(a);
    if (arc.from != node) continue;
    if (arc.leg == LegKind::direct) direct.push_back(a);
    if (arc.leg != LegKind::to_station) continue;
    for (int b : g.segment_arcs(r, seg)) {
      if (g.arc(b).leg == LegKind::from_station && g.arc(b).from == arc.to) via.emplace_back(a, b);
    }
  }
  std::stable_sort(direct.begin(), direct.end(), [&](int a, int b) { return arrival(g, a) < arrival(g, b); });
  std::stable_sort(via.begin(), via.end(), [&](const auto& x, const auto& y) {
    const Minutes dx = g.arc(x.first).duration + g.arc(x.second).duration;
    const Minutes dy = g.arc(y.first).duration + g.arc(y.second).duration;
    return dx != dy ? dx < dy : arrival(g, x.second) < arrival(g, y.second);
  });
  for (int a : direct) {
    legs.push_back(a);
    if (extend_ride(g, r, seg + 1, segments, g.arc(a).to, legs, deepest)) return true;
    legs.pop_back();
  }
  for (const auto& [a, b] : via) {
    legs.push_back(a);
    legs.push_back(b);
    if (extend_ride(g, r, seg + 1, segments, g.arc(b).to, legs, deepest)) return true;
    legs.pop_back();
    legs.pop_back();
  }
  return false;
}

}  // namespace

double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Rng substream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t op) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix(x);
  x ^= iteration * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = splitmix(x);
  x ^= op * 0x8CB92BA72F3D8DD7ULL;
  return Rng(a ^ b ^ splitmix(x));
}

Plan initial_plan(const Instance& inst, const TimeGraph& g) {
  Plan plan;
  for (std::size_t r = 0; r < g.ride_count(); ++r) {
    const int ri = static_cast<int>(r);
    const int segments = static_cast<int>(g.stop_count(ri)) - 1;
    std::vector<int> legs;
    int deepest = 0;
    bool ok = false;
    for (int start : g.stop_copies(ri, 0)) {
      if (extend_ride(g, ri, 0, segments, start, legs, deepest)) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConstructionError("ride " + inst.rides[r].id + " segment " + std::to_string(deepest) +
                              " cannot be driven within the legal limits");
    }
    plan.legs.push_back(std::move(legs));
  }
  return plan;
}

Schedule construct_schedule(const Instance& inst, const TimeGraph& g) {
  Plan plan = initial_plan(inst, g);
  auto s = assign_greedy(inst, g, plan);
  if (!s) throw ConstructionError("no legal driver assignment for the initial plan");
  return *s;
}

Solution construct(const Instance& inst, const TimeGraph& g) {
  return materialize(construct_schedule(inst, g), inst, g);
}

std::optional<Schedule> recompute(const Instance& inst, const TimeGraph& g, const Plan& plan) {
  auto s = assign_greedy(inst, g, plan);
  if (!s) return std::nullopt;
  PlanContext ctx(inst, g, s->plan);
  eliminate_drivers(*s, ctx);
  return s;
}

std::string to_string(SearchMode m) { return m == SearchMode::composite ? "composite" : "vnd"; }

SearchMode parse_search_mode(const std::string& s) {
  if (s == "composite") return SearchMode::composite;
  if (s == "vnd") return SearchMode::vnd;
  throw std::invalid_argument("unknown search mode '" + s + "'");
}

std::uint64_t schedule_hash(const Schedule& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL;
    h *= 1099511628211ULL;
  };
  for (const auto& legs : s.plan.legs) {
    mix(legs.size());
    for (int a : legs) mix(static_cast<std::uint64_t>(a));
  }
  for (const auto& d : s.duties) {
    mix(d.size() + 1000003ULL);
    for (int a : d) mix(static_cast<std::uint64_t>(a));
  }
  return h;
}

Candidate make_candidate(Schedule s, const Instance& inst, const TimeGraph& g) {
  Candidate c;
  c.schedule = std::move(s);
  PlanContext ctx(inst, g, c.schedule.plan);
  c.f = schedule_objective(c.schedule);
  c.theta = schedule_theta(c.schedule, ctx);
  c.hash = schedule_hash(c.schedule);
  return c;
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.f != b.f) return a.f < b.f;
  return a.theta > b.theta;
}

std::vector<Candidate> rank_and_truncate(std::vector<Candidate> c, double mu, int mu_min) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    return a.theta != b.theta ? a.theta > b.theta : a.hash < b.hash;
  });
  const std::size_t n = c.size();
  const std::size_t by_share = static_cast<std::size_t>(std::ceil(mu * static_cast<double>(n) - 1e-9));
  const std::size_t floor_keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(mu_min, 0)), n);
  c.resize(std::min(n, std::max(by_share, floor_keep)));
  return c;
}

std::size_t perturbed_select(std::size_t n, double p, double y) {
  if (n == 0) return 0;
  const auto idx = static_cast<std::size_t>(std::floor(std::pow(y, p) * static_cast<double>(n)));
  return std::min(idx, n - 1);
}

std::size_t perturbed_select(std::size_t n, double p, Rng& rng) { return perturbed_select(n, p, unit_draw(rng)); }

std::string to_string(Operator op) {
  switch (op) {
    case Operator::reassign: return "reassign";
    case Operator::postpone: return "postpone";
    case Operator::prepone: return "prepone";
    case Operator::insert_random: return "insert_random";
    case Operator::insert_shortest: return "insert_shortest";
    case Operator::insert_sync: return "insert_sync";
    case Operator::remove_stop: return "remove_stop";
  }
  return "?";
}

std::vector<Schedule> apply_operator(Operator op, const Schedule& s, const Instance& inst, const TimeGraph& g,
                                     Rng& rng, double p) {
  switch (op) {
    case Operator::reassign: return operator_reassign_segments(s, inst, g);
    case Operator::postpone: return operator_postpone(s, inst, g);
    case Operator::prepone: return operator_prepone(s, inst, g);
    case Operator::insert_random:
    case Operator::insert_shortest:
    case Operator::insert_sync: return operator_insert_stop(s, inst, g, op, rng, p);
    case Operator::remove_stop: return operator_remove_stop(s, inst, g);
  }
  return {};
}

Schedule local_search(const Schedule& start, const SearchConfig& cfg, const Instance& inst, const TimeGraph& g,
                      const TrajectoryHook& hook) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto expired = [&] { return std::chrono::duration<double>(clock::now() - t0).count() >= cfg.deadline; };

  Candidate cur = make_candidate(start, inst, g);
  if (hook) hook(cur);
  // Best strict improvement an operator offers, or nullopt.
  auto propose = [&](int op, int iteration) -> std::optional<Candidate> {
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(op));
    std::vector<Candidate> pool;
    for (auto& s : apply_operator(static_cast<Operator>(op), cur.schedule, inst, g, rng, cfg.p)) {
      Candidate c = make_candidate(std::move(s), inst, g);
      if (better(c, cur)) pool.push_back(std::move(c));
    }
    if (pool.empty()) return std::nullopt;
    const int best_f = std::min_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
                         return a.f < b.f;
                       })->f;
    std::erase_if(pool, [&](const Candidate& c) { return c.f != best_f; });
    auto kept = rank_and_truncate(std::move(pool), cfg.mu, cfg.mu_min);
    return kept[perturbed_select(kept.size(), cfg.p, rng)];
  };

  int iteration = 0;
  if (cfg.mode == SearchMode::composite) {
    while (iteration < cfg.max_iterations && !expired()) {
      std::optional<Candidate> best;
      for (int op = 0; op < kOperatorCount; ++op) {
        auto c = propose(op, iteration);
        if (c && (!best || better(*c, *best))) best = std::move(c);
      }
      ++iteration;
      if (!best) break;
      cur = std::move(*best);
      if (hook) hook(cur);
    }
  } else {
    int op = 0;
    while (op < kOperatorCount && iteration < cfg.max_iterations && !expired()) {
      auto c = propose(op, iteration++);
      if (c) {
        cur = std::move(*c);
        if (hook) hook(cur);
        op = 0;
      } else {
        ++op;
      }
    }
  }
  return cur.schedule;
}

Solution local_search(const Solution& start, const SearchConfig& cfg, const Instance& inst, const TimeGraph& g) {
  return materialize(local_search(schedule_from(start, g), cfg, inst, g), inst, g);
}

}  // namespace drsync
