#include "drsync/mip.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <climits>
#include <sstream>
#include <unordered_map>

#include "drsync/legality.hpp"
#include "drsync/plan.hpp"

namespace drsync {

std::size_t Model::binary_count() const {
  return graph ? static_cast<std::size_t>(driver_count) * graph->arcs().size() : 0;
}

std::size_t Model::continuous_count() const {
  return graph ? static_cast<std::size_t>(driver_count) * graph->nodes().size() : 0;
}

Model build_model(std::shared_ptr<const Instance> inst, std::shared_ptr<const TimeGraph> g, const BoundReport& b,
                  int start_objective) {
  Model m;
  m.instance = std::move(inst);
  m.graph = std::move(g);
  m.driver_count = std::max(b.ub, start_objective);
  m.lower_bound = b.lb;
  return m;
}

Model restrict(const Model& m, int cap) {
  if (cap < 0) throw std::invalid_argument("cardinality cap must be non-negative");
  Model out = m;
  out.cardinality_cap = cap;
  return out;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::timeout_no_solution: return "timeout_no_solution";
  }
  return "?";
}

std::string incumbent_log_csv(const std::vector<IncumbentEvent>& log) {
  std::ostringstream os;
  os << "time_s,objective,bound\n";
  for (const auto& e : log) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", e.time_s);
    os << buf << ',' << e.objective << ',' << e.bound << '\n';
  }
  return os.str();
}

namespace {

constexpr Minutes kBusy = INT_MAX / 2;

struct KeyHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

class Search {
 public:
  Search(const Model& m, const SolverConfig& cfg) : m_(m), cfg_(cfg), inst_(*m.instance), g_(*m.graph) {
    whole_ = inst_.exchange_policy == ExchangePolicy::none;
    const int n = static_cast<int>(g_.ride_count());
    for (int r = 0; r < n; ++r) {
      const int segs = static_cast<int>(g_.stop_count(r)) - 1;
      segs_.push_back(segs);
      const auto& copies = g_.stop_copies(r, 0);
      rides_.push_back({copies.empty() ? -1 : copies.front(), copies.empty() ? segs : 0, 0, false, false});
      if (copies.empty() && segs > 0) dead_ = true;
    }
    plan_.assign(n, {});
    limit_ = m.driver_count;
    if (m.cardinality_cap) limit_ = std::min(limit_, *m.cardinality_cap);
    if (cfg.cutoff) limit_ = std::min(limit_, *cfg.cutoff);
  }

  SolveOutcome run() {
    t0_ = std::chrono::steady_clock::now();
    if (cfg_.start_solution && cfg_.start_delay <= 0) inject_start();
    if (!dead_ && !stop_) dfs();
    SolveOutcome out;
    out.elapsed = elapsed();
    out.explored = explored_;
    out.incumbent_log = log_;
    out.incumbent_from_callback = from_callback_;
    out.incumbent_from_start = from_start_;
    if (best_) out.best_solution = *best_;
    if (timed_out_) {
      out.status = best_ ? SolveStatus::feasible : SolveStatus::timeout_no_solution;
      out.best_bound = best_ ? std::min(m_.lower_bound, best_f_) : m_.lower_bound;
    } else if (best_) {
      out.status = SolveStatus::optimal;
      out.best_bound = best_f_;
      out.incumbent_log.push_back({out.elapsed, best_f_, best_f_});
    } else {
      out.status = SolveStatus::infeasible;
      out.best_bound = limit_ + 1;
    }
    return out;
  }

 private:
  struct RideState {
    int node;
    int seg;
    int copy;
    bool started;
    bool at_station;
  };
  struct Drv {
    int pos = -1;
    Minutes free_at = 0;
    int ride = -1;
    DutyClock clock;
  };

  Minutes t(int node) const { return g_.node(node).time; }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

  void note(int f) {
    log_.push_back({elapsed(), f, std::min(m_.lower_bound, f)});
    if (f <= m_.lower_bound) stop_ = true;
  }

  void inject_start() {
    injected_ = true;
    const int f = objective(*cfg_.start_solution, g_);
    if (f > limit_) return;
    best_ = *cfg_.start_solution;
    best_f_ = f;
    limit_ = f - 1;
    from_start_ = true;
    from_callback_ = false;
    note(f);
  }

  void poll() {
    const double e = elapsed();
    if (e >= cfg_.time_limit) {
      stop_ = true;
      timed_out_ = true;
      return;
    }
    if (cfg_.start_solution && !injected_ && e >= cfg_.start_delay) inject_start();
  }

  // Earliest-arrival scan over the legs (or finished rides) decided so far.
  bool reach(int from, int to) const {
    const auto& a = g_.node(from);
    const auto& b = g_.node(to);
    if (a.time > b.time) return false;
    if (a.location == b.location) return true;
    std::unordered_map<int, Minutes> arr;
    arr[a.location] = a.time;
    auto at = [&](int loc) {
      auto it = arr.find(loc);
      return it == arr.end() ? kBusy : it->second;
    };
    auto relax = [&](int u, int v) {
      const auto& nu = g_.node(u);
      const auto& nv = g_.node(v);
      if (nv.time > b.time) return;
      if (at(nu.location) <= nu.time && nv.time < at(nv.location)) arr[nv.location] = nv.time;
    };
    if (!whole_) {
      for (int d : decided_) relax(g_.arc(d).from, g_.arc(d).to);
    } else {
      auto done = finished_;
      std::sort(done.begin(), done.end(), [&](int x, int y) {
        return t(g_.arc(plan_[x].front()).from) < t(g_.arc(plan_[y].front()).from);
      });
      for (int r : done) relax(g_.arc(plan_[r].front()).from, g_.arc(plan_[r].back()).to);
    }
    return at(b.location) <= b.time;
  }

  int ride_start(int r, const TimedArc& arc) const {
    return plan_[r].empty() ? arc.from : g_.arc(plan_[r].front()).from;
  }

  bool eligible(const Drv& d, const TimedArc& arc, int r) const {
    const auto& legal = inst_.legal;
    const Minutes from = t(arc.from), to = t(arc.to);
    if (!whole_) {
      if (d.free_at > from) return false;
      if (d.pos >= 0 && !reach(d.pos, arc.from)) return false;
      return d.clock.can_steer(from, to, legal);
    }
    if (d.ride == r && d.free_at == kBusy) return d.clock.can_steer(from, to, legal);
    const int start = ride_start(r, arc);
    if (d.free_at > t(start)) return false;
    if (d.pos >= 0 && !reach(d.pos, start)) return false;
    return d.clock.can_steer(from, to, legal, t(start));
  }

  std::vector<int> key() const {
    std::vector<int> k;
    k.reserve(decided_.size() + rides_.size() + drivers_.size() * 8 + 2);
    k.insert(k.end(), decided_.begin(), decided_.end());
    k.push_back(-1);
    for (const auto& r : rides_) k.push_back(r.started ? -2 : r.node);
    k.push_back(-1);
    std::vector<std::array<int, 8>> ds;
    for (const auto& d : drivers_) {
      ds.push_back({d.pos, d.free_at, d.ride, d.clock.start, d.clock.end, d.clock.last_steer_end, d.clock.continuous,
                    d.clock.total});
    }
    std::sort(ds.begin(), ds.end());
    for (const auto& d : ds) k.insert(k.end(), d.begin(), d.end());
    return k;
  }

  void record_solution() {
    const int f = static_cast<int>(drivers_.size());
    Schedule s;
    s.plan.legs = plan_;
    s.duties.assign(drivers_.size(), {});
    for (std::size_t i = 0; i < decided_.size(); ++i) s.duties[owner_[i]].push_back(decided_[i]);
    best_ = materialize(s, inst_, g_);
    best_f_ = f;
    limit_ = f - 1;
    from_callback_ = false;
    from_start_ = false;
    note(f);
    if (cfg_.incumbent_callback && !timed_out_) {
      auto better = cfg_.incumbent_callback(*best_);
      if (better) {
        const int fb = objective(*better, g_);
        if (fb < best_f_) {
          best_ = std::move(*better);
          best_f_ = fb;
          limit_ = fb - 1;
          from_callback_ = true;
          note(fb);
        }
      }
    }
  }

  void assign_and_recurse(int r, int a, int k) {
    const auto& arc = g_.arc(a);
    const auto& legal = inst_.legal;
    const auto saved_ride = rides_[r];
    const auto saved_drivers = drivers_;
    if (k < 0) {
      drivers_.emplace_back();
      k = static_cast<int>(drivers_.size()) - 1;
    }
    Drv& d = drivers_[k];
    const int start = ride_start(r, arc);
    if (!whole_) {
      d.clock.steer(t(arc.from), t(arc.to), legal);
      d.pos = arc.to;
      d.free_at = t(arc.to);
    } else if (d.ride == r && d.free_at == kBusy) {
      d.clock.steer(t(arc.from), t(arc.to), legal);
    } else {
      d.clock.steer(t(arc.from), t(arc.to), legal, t(start));
      d.ride = r;
      d.free_at = kBusy;
    }
    plan_[r].push_back(a);
    decided_.push_back(a);
    owner_.push_back(k);
    auto& rs = rides_[r];
    rs.node = arc.to;
    rs.started = true;
    if (arc.leg == LegKind::to_station) {
      rs.at_station = true;
    } else {
      rs.at_station = false;
      ++rs.seg;
    }
    bool ok = true;
    const bool finished = rs.seg == segs_[r];
    if (finished && whole_) {
      for (auto& dd : drivers_) {
        if (dd.ride != r || dd.free_at != kBusy) continue;
        dd.clock.extend(t(arc.to));
        dd.pos = arc.to;
        dd.free_at = t(arc.to);
        if (dd.clock.span() > legal.t_dw) ok = false;
      }
    }
    if (finished) finished_.push_back(r);
    if (ok) dfs();
    if (finished) finished_.pop_back();
    owner_.pop_back();
    decided_.pop_back();
    plan_[r].pop_back();
    rides_[r] = saved_ride;
    drivers_ = saved_drivers;
  }

  void dfs() {
    if ((++explored_ & 1023) == 0) poll();
    if (stop_ || static_cast<int>(drivers_.size()) > limit_) return;
    int r = -1;
    Minutes T = 0;
    for (std::size_t i = 0; i < rides_.size(); ++i) {
      if (rides_[i].seg >= segs_[i]) continue;
      const Minutes ti = t(rides_[i].node);
      if (r < 0 || ti < T) {
        r = static_cast<int>(i);
        T = ti;
      }
    }
    if (r < 0) {
      record_solution();
      return;
    }
    auto k = key();
    auto hit = memo_.find(k);
    if (hit != memo_.end() && hit->second >= limit_) return;

    const RideState rs = rides_[r];
    std::vector<int> options;
    for (int a : g_.out_arcs(rs.node)) {
      const auto& arc = g_.arc(a);
      if (arc.mode != 1 || arc.ride != r || arc.segment != rs.seg) continue;
      const bool from_station = arc.leg == LegKind::from_station;
      if (from_station != rs.at_station) continue;
      options.push_back(a);
    }
    std::stable_sort(options.begin(), options.end(), [&](int a, int b) {
      const bool sa = g_.arc(a).leg == LegKind::to_station, sb = g_.arc(b).leg == LegKind::to_station;
      if (sa != sb) return !sa;
      return t(g_.arc(a).to) < t(g_.arc(b).to);
    });
    const int prev_owner = [&] {
      for (std::size_t i = decided_.size(); i-- > 0;) {
        if (g_.arc(decided_[i]).ride == r) return owner_[i];
      }
      return -1;
    }();
    for (int a : options) {
      const auto& arc = g_.arc(a);
      std::vector<int> order;
      if (prev_owner >= 0) order.push_back(prev_owner);
      for (int d = 0; d < static_cast<int>(drivers_.size()); ++d) {
        if (d != prev_owner) order.push_back(d);
      }
      std::vector<std::array<int, 8>> tried;
      for (int d : order) {
        if (stop_) break;
        const Drv& dv = drivers_[d];
        std::array<int, 8> sig{dv.pos, dv.free_at, dv.ride, dv.clock.start, dv.clock.end, dv.clock.last_steer_end,
                               dv.clock.continuous, dv.clock.total};
        if (std::find(tried.begin(), tried.end(), sig) != tried.end()) continue;
        tried.push_back(sig);
        if (!eligible(dv, arc, r)) continue;
        assign_and_recurse(r, a, d);
      }
      if (stop_) break;
      if (static_cast<int>(drivers_.size()) < limit_) {
        if (eligible(Drv{}, arc, r)) assign_and_recurse(r, a, -1);
      }
      if (stop_) break;
    }
    if (!stop_ && !rs.started) {
      const auto& copies = g_.stop_copies(r, 0);
      if (rs.copy + 1 < static_cast<int>(copies.size())) {
        rides_[r].copy = rs.copy + 1;
        rides_[r].node = copies[rs.copy + 1];
        dfs();
        rides_[r] = rs;
      }
    }
    if (!stop_) {
      if (memo_.size() > 4'000'000) memo_.clear();
      auto& v = memo_[std::move(k)];
      v = std::max(v, limit_);
    }
  }

  const Model& m_;
  const SolverConfig& cfg_;
  const Instance& inst_;
  const TimeGraph& g_;
  bool whole_ = false;
  bool dead_ = false;
  std::vector<int> segs_;
  std::vector<RideState> rides_;
  std::vector<Drv> drivers_;
  std::vector<std::vector<int>> plan_;
  std::vector<int> decided_;
  std::vector<int> owner_;
  std::vector<int> finished_;
  std::unordered_map<std::vector<int>, int, KeyHash> memo_;
  int limit_ = 0;
  std::optional<Solution> best_;
  int best_f_ = INT_MAX;
  bool stop_ = false;
  bool timed_out_ = false;
  bool injected_ = false;
  bool from_callback_ = false;
  bool from_start_ = false;
  std::vector<IncumbentEvent> log_;
  std::uint64_t explored_ = 0;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

SolveOutcome solve(const Model& m, const SolverConfig& cfg) {
  if (!m.graph || !m.instance) throw std::invalid_argument("model has no graph");
  if (cfg.time_limit <= 0) throw std::invalid_argument("time limit must be positive");
  Search s(m, cfg);
  return s.run();
}

Solution extract_solution(const Model& m, const std::vector<std::pair<int, int>>& assignment) {
  const auto& g = *m.graph;
  const auto& inst = *m.instance;
  std::vector<std::vector<int>> per(m.driver_count);
  for (const auto& [k, a] : assignment) {
    if (k < 0 || k >= m.driver_count) throw ExtractionError("driver " + std::to_string(k) + " is outside the model");
    if (a < 0 || a >= static_cast<int>(g.arcs().size())) throw ExtractionError("unknown arc " + std::to_string(a));
    per[k].push_back(a);
  }
  std::vector<char> covered;
  for (std::size_t r = 0; r < g.ride_count(); ++r) {
    for (std::size_t s = 0; s + 1 < g.stop_count(static_cast<int>(r)); ++s) {
      bool hit = false;
      for (const auto& [k, a] : assignment) {
        const auto& arc = g.arc(a);
        hit = hit || (arc.mode == 1 && arc.ride == static_cast<int>(r) && arc.segment == static_cast<int>(s));
      }
      if (!hit) {
        throw ExtractionError("ride " + inst.rides[r].id + " segment " + std::to_string(s) + " is not covered");
      }
    }
  }
  Solution out;
  for (std::size_t k = 0; k < per.size(); ++k) {
    auto& arcs = per[k];
    if (arcs.empty()) continue;
    std::vector<int> route;
    std::vector<char> used(arcs.size(), 0);
    int node = TimeGraph::kSource;
    while (node != TimeGraph::kSink) {
      int next = -1;
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (!used[i] && g.arc(arcs[i]).from == node) {
          next = static_cast<int>(i);
          break;
        }
      }
      if (next < 0) throw ExtractionError("driver " + std::to_string(k) + ": flow breaks at node " + std::to_string(node));
      used[next] = 1;
      route.push_back(arcs[next]);
      node = g.arc(arcs[next]).to;
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
      throw ExtractionError("driver " + std::to_string(k) + ": arcs outside the route");
    }
    out.routes.push_back(std::move(route));
  }
  std::stable_sort(out.routes.begin(), out.routes.end(), [&](const auto& a, const auto& b) {
    return g.node(g.arc(a.front()).to).time < g.node(g.arc(b.front()).to).time;
  });
  return out;
}

}  // namespace drsync
