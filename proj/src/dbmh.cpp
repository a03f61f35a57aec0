#include "drsync/dbmh.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <stdexcept>

#include "json.hpp"

namespace drsync {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

DbmhConfig variant_config(int variant, DbmhConfig c) {
  auto& t = c.toggles;
  t = Toggles{};
  switch (variant) {
    case 0: break;
    case 1: t.use_dbi = false; break;
    case 2: t.use_ch = false; break;
    case 3: t.use_ls = false; break;
    case 4: t.use_cb = false; break;
    case 5:
      t.use_mip = t.use_cb = false;
      t.extend_time_on_disable = true;
      break;
    case 6:
      t.use_mip = t.use_cb = false;
      t.extend_time_on_disable = false;
      break;
    default: throw std::invalid_argument("variant must be in 0..6");
  }
  return c;
}

DbmhConfig config_from_json(const std::string& text, DbmhConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "eta_lb") c.eta_lb = v.get<double>();
    else if (k == "eta_mip") c.eta_mip = v.get<double>();
    else if (k == "eta_ls") c.eta_ls = v.get<double>();
    else if (k == "global_limit") c.global_limit = v.get<double>();
    else if (k == "mu") c.search.mu = v.get<double>();
    else if (k == "mu_min") c.search.mu_min = v.get<int>();
    else if (k == "p") c.search.p = v.get<double>();
    else if (k == "mode") c.search.mode = parse_search_mode(v.get<std::string>());
    else if (k == "max_iterations") c.search.max_iterations = v.get<int>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "toggles") {
      for (auto t = v.begin(); t != v.end(); ++t) {
        const bool b = t.value().get<bool>();
        if (t.key() == "use_ch") c.toggles.use_ch = b;
        else if (t.key() == "use_ls") c.toggles.use_ls = b;
        else if (t.key() == "use_dbi") c.toggles.use_dbi = b;
        else if (t.key() == "use_cb") c.toggles.use_cb = b;
        else if (t.key() == "use_mip") c.toggles.use_mip = b;
        else if (t.key() == "extend_time_on_disable") c.toggles.extend_time_on_disable = b;
        else throw std::invalid_argument("config: unknown toggle '" + t.key() + "'");
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + k + "'");
    }
  }
  if (c.eta_lb <= 0 || c.eta_mip <= 0 || c.eta_ls <= 0 || c.global_limit <= 0) {
    throw std::invalid_argument("config: budgets must be positive");
  }
  if (c.eta_lb > c.global_limit || c.eta_mip > c.global_limit || c.eta_ls > c.global_limit) {
    throw std::invalid_argument("config: a stage budget exceeds global_limit");
  }
  if (!(c.search.mu > 0 && c.search.mu <= 1)) throw std::invalid_argument("config: mu must be in (0, 1]");
  if (c.search.mu_min < 1) throw std::invalid_argument("config: mu_min must be at least 1");
  if (c.search.p < 1) throw std::invalid_argument("config: p must be at least 1");
  return c;
}

std::string config_to_json(const DbmhConfig& c) {
  nlohmann::ordered_json j;
  j["eta_lb"] = c.eta_lb;
  j["eta_mip"] = c.eta_mip;
  j["eta_ls"] = c.eta_ls;
  j["global_limit"] = c.global_limit;
  j["mu"] = c.search.mu;
  j["mu_min"] = c.search.mu_min;
  j["p"] = c.search.p;
  j["mode"] = to_string(c.search.mode);
  j["max_iterations"] = c.search.max_iterations;
  j["seed"] = c.seed;
  j["toggles"] = {{"use_ch", c.toggles.use_ch},   {"use_ls", c.toggles.use_ls},
                  {"use_dbi", c.toggles.use_dbi}, {"use_cb", c.toggles.use_cb},
                  {"use_mip", c.toggles.use_mip}, {"extend_time_on_disable", c.toggles.extend_time_on_disable}};
  return j.dump(2) + "\n";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::optimal: return "optimal";
    case RunStatus::feasible: return "feasible";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::no_solution: return "no_solution";
  }
  return "?";
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::none: return "none";
    case Stage::ch_ls: return "ch_ls";
    case Stage::ls_callback: return "ls_callback";
    case Stage::dbi: return "dbi";
    case Stage::mip: return "mip";
  }
  return "?";
}

std::string to_string(DbiStatus s) {
  switch (s) {
    case DbiStatus::optimal: return "optimal";
    case DbiStatus::bound_only: return "bound_only";
    case DbiStatus::infeasible: return "infeasible";
  }
  return "?";
}

DbiResult destructive_bound_improvement(const Model& m, int lb, const std::optional<Solution>& s, double eta_lb,
                                        std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int f = s ? objective(*s, *m.graph) : -1;
  while (true) {
    if (s && f <= lb) return {lb, DbiStatus::optimal, s};
    if (lb > m.driver_count) return {lb, DbiStatus::infeasible, std::nullopt};
    const double left = eta_lb - since(t0);
    if (left <= 0) return {lb, DbiStatus::bound_only, std::nullopt};
    Model p = restrict(m, lb);
    p.lower_bound = lb;
    SolverConfig sc;
    sc.time_limit = left;
    sc.seed = seed;
    auto out = solve(p, sc);
    if (out.status == SolveStatus::optimal) return {lb, DbiStatus::optimal, out.best_solution};
    if (out.status != SolveStatus::infeasible) return {lb, DbiStatus::bound_only, std::nullopt};
    ++lb;
  }
}

RunReport run(const Instance& inst, const DbmhConfig& cfg) {
  const auto t0 = Clock::now();
  auto left = [&] { return std::max(0.0, cfg.global_limit - since(t0)); };
  const auto& tg = cfg.toggles;
  double eta_lb = cfg.eta_lb, eta_ls = cfg.eta_ls;
  if (!tg.use_mip && tg.extend_time_on_disable) eta_lb = eta_ls = cfg.global_limit;

  RunReport rep;
  rep.instance = inst.name;
  auto ip = std::make_shared<const Instance>(inst);
  auto phase = Clock::now();
  auto g = std::make_shared<const TimeGraph>(build_graph(*ip));
  rep.timings.graph = since(phase);
  rep.graph = g->stats();
  phase = Clock::now();
  rep.bounds = compute_bounds(*ip, *g);
  rep.timings.bounds = since(phase);
  rep.clb = rep.dlb = rep.final_lb = rep.bounds.lb;
  int lb = rep.bounds.lb;

  auto finish = [&](RunStatus st, Stage by) {
    rep.status = st;
    rep.found_by = by;
    if (rep.solution) {
      rep.objective = objective(*rep.solution, *g);
      rep.theta = theta(*rep.solution, *g, ip->legal);
    }
    if (st == RunStatus::optimal) rep.final_lb = rep.objective;
    rep.timings.total = since(t0);
    return rep;
  };

  std::optional<Schedule> s;
  if (tg.use_ch) {
    phase = Clock::now();
    try {
      s = construct_schedule(*ip, *g);
    } catch (const ConstructionError& e) {
      rep.note = e.what();
    }
    rep.timings.ch = since(phase);
  }
  if (s && tg.use_ls) {
    phase = Clock::now();
    SearchConfig sc = cfg.search;
    sc.seed = cfg.seed;
    sc.deadline = std::min(eta_ls, left());
    s = local_search(*s, sc, *ip, *g);
    rep.timings.ls = since(phase);
  }
  if (s) {
    rep.solution = materialize(*s, *ip, *g);
    rep.incumbent_log.push_back({since(t0), schedule_objective(*s), lb});
    if (schedule_objective(*s) <= lb) return finish(RunStatus::optimal, Stage::ch_ls);
  }
  Stage stage = s ? Stage::ch_ls : Stage::none;
  Model model = build_model(ip, g, rep.bounds, s ? schedule_objective(*s) : 0);

  if (tg.use_dbi) {
    phase = Clock::now();
    auto d = destructive_bound_improvement(model, lb, rep.solution, std::min(eta_lb, left()), cfg.seed);
    rep.timings.dbi = since(phase);
    lb = d.lb;
    rep.dlb = rep.final_lb = lb;
    if (d.status == DbiStatus::optimal) {
      rep.solution = d.solution;
      rep.incumbent_log.push_back({since(t0), objective(*rep.solution, *g), lb});
      return finish(RunStatus::optimal, Stage::dbi);
    }
    if (d.status == DbiStatus::infeasible) {
      rep.solution.reset();
      return finish(RunStatus::infeasible, Stage::dbi);
    }
  }

  if (tg.use_mip && left() > 0) {
    phase = Clock::now();
    Model m = model;
    m.lower_bound = lb;
    SolverConfig sc;
    sc.time_limit = left();
    sc.seed = cfg.seed;
    sc.start_solution = rep.solution;
    sc.start_delay = std::min(cfg.eta_mip, sc.time_limit);
    if (tg.use_cb) {
      sc.incumbent_callback = [&](const Solution& inc) -> std::optional<Solution> {
        SearchConfig ls = cfg.search;
        ls.seed = cfg.seed;
        ls.deadline = std::min(eta_ls, left());
        auto improved = local_search(inc, ls, *ip, *g);
        if (objective(improved, *g) < objective(inc, *g)) return improved;
        return std::nullopt;
      };
    }
    auto out = solve(m, sc);
    rep.timings.mip = since(phase);
    const double offset = since(t0) - out.elapsed;
    for (auto e : out.incumbent_log) {
      e.time_s += offset;
      rep.incumbent_log.push_back(e);
    }
    if (out.best_solution) rep.solution = out.best_solution;
    const Stage by = out.incumbent_from_callback ? Stage::ls_callback : out.incumbent_from_start ? stage : Stage::mip;
    switch (out.status) {
      case SolveStatus::optimal: return finish(RunStatus::optimal, by);
      case SolveStatus::infeasible:
        rep.solution.reset();
        return finish(RunStatus::infeasible, Stage::mip);
      case SolveStatus::feasible:
        rep.final_lb = std::max(lb, out.best_bound);
        return finish(RunStatus::feasible, by);
      case SolveStatus::timeout_no_solution: break;
    }
  }
  return finish(rep.solution ? RunStatus::feasible : RunStatus::no_solution, stage);
}

std::string report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["status"] = to_string(r.status);
  if (r.objective >= 0) j["objective"] = r.objective;
  else j["objective"] = nullptr;
  j["final_lb"] = r.final_lb;
  j["clb"] = r.clb;
  j["dlb"] = r.dlb;
  j["ub"] = r.bounds.ub;
  j["lb1"] = r.bounds.lb1;
  j["lb2"] = r.bounds.lb2;
  j["found_by"] = to_string(r.found_by);
  j["graph"] = {{"nodes", r.graph.nodes}, {"arcs", r.graph.arcs}, {"size_class", r.graph.size_class}};
  if (r.solution) j["theta"] = r.theta;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2) + "\n";
}

std::string timings_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["phases"] = {{"graph", r.timings.graph}, {"bounds", r.timings.bounds}, {"ch", r.timings.ch},
                 {"ls", r.timings.ls},       {"dbi", r.timings.dbi},       {"mip", r.timings.mip},
                 {"total", r.timings.total}};
  j["incumbent_log"] = incumbent_log_csv(r.incumbent_log);
  return j.dump(2) + "\n";
}

}  // namespace drsync
