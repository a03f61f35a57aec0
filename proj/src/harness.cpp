#include "drsync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "drsync/bounds.hpp"
#include "drsync/timegraph.hpp"
#include "json.hpp"

namespace drsync {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::string obj_fmt(int v) { return v >= 0 ? std::to_string(v) : ""; }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string size_class_of(const Instance& inst) {
  try {
    return build_graph(inst).stats().size_class;
  } catch (const std::exception&) {
    return "invalid";
  }
}

bool by_class_then_name(const std::string& ca, const std::string& na, const std::string& cb, const std::string& nb) {
  return std::tie(ca, na) < std::tie(cb, nb);
}

}  // namespace

// --- suites -----------------------------------------------------------------

Suite load_suite(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw SuiteError("suite directory '" + dir.string() + "' does not exist");
  Suite s;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    const auto name = e.path().filename().string();
    if (name == "suite.json" || name == "best_known.json") continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) s.instances.push_back(load_instance(f));
  std::sort(s.instances.begin(), s.instances.end(),
            [](const Instance& a, const Instance& b) { return a.name < b.name; });

  if (fs::exists(dir / "suite.json")) {
    const json j = json::parse(read_file(dir / "suite.json"));
    if (j.contains("seeds")) s.spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("runs")) s.spec.runs = j["runs"].get<int>();
    if (j.contains("methods")) s.spec.methods = j["methods"].get<std::vector<std::string>>();
    if (s.spec.runs < 1 || s.spec.seeds.empty()) throw SuiteError("suite.json: runs >= 1 and a seed are required");
  }
  if (fs::exists(dir / "best_known.json")) {
    const json j = json::parse(read_file(dir / "best_known.json"));
    for (const auto& [k, v] : j.items()) s.best_known[k] = v.get<int>();
  }
  return s;
}

void save_suite(const Suite& s, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& inst : s.instances) save_instance(inst, dir / (inst.name + ".json"));
  ordered_json spec;
  spec["seeds"] = s.spec.seeds;
  spec["runs"] = s.spec.runs;
  spec["methods"] = s.spec.methods;
  write_file(dir / "suite.json", spec.dump(2) + "\n");
  ordered_json bk = ordered_json::object();
  for (const auto& [k, v] : s.best_known) bk[k] = v;
  write_file(dir / "best_known.json", bk.dump(2) + "\n");
}

void record_best_known(Suite& s, const std::string& instance, int optimum) {
  auto it = s.best_known.find(instance);
  if (it == s.best_known.end() || optimum < it->second) s.best_known[instance] = optimum;
}

std::vector<Instance> micro_suite(std::size_t n, std::uint64_t seed, ExchangePolicy policy) {
  std::vector<Instance> out;
  for (std::uint64_t attempt = 0; out.size() < n; ++attempt) {
    std::mt19937_64 rng(mix(seed * 1000003ULL + attempt));
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    GeneratorConfig c;
    c.n_lines = pick(1, 2);
    c.rides_per_line = pick(1, c.n_lines == 1 ? 4 : 2);
    c.segments_per_ride = c.n_lines * c.rides_per_line >= 4 ? 1 : pick(1, 2);
    c.stations_per_segment = pick(0, 1);
    c.overlap = static_cast<OverlapProfile>(pick(0, 3));
    c.policy = policy;
    if (pick(0, 1) == 0) {
      // Tight hours so that breaks and handoffs matter at this size.
      c.legal = {60, 20, 150, 240};
      c.drive_min = 20;
      c.drive_max = c.stations_per_segment ? 100 : 60;
    } else {
      c.drive_min = 60;
      c.drive_max = c.stations_per_segment ? 300 : 240;
    }
    GeneratedInstance g;
    try {
      g = generate_synthetic(c, mix(seed + attempt));
    } catch (const std::invalid_argument&) {
      continue;
    }
    Instance& inst = g.instance;
    if (g.arc_count > 300 || inst.rides.size() > 4 || !coverage_warnings(inst).empty()) continue;
    if (policy == ExchangePolicy::none) {
      bool ok = true;
      for (const auto& r : inst.rides) {
        if (r.departures.back() - r.departures.front() + inst.theta_tw > inst.legal.t_dw) ok = false;
      }
      if (!ok) continue;
    }
    std::ostringstream name;
    name << "micro-" << std::setw(3) << std::setfill('0') << out.size();
    inst.name = name.str();
    out.push_back(std::move(inst));
  }
  return out;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(workers));
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// --- bench ------------------------------------------------------------------

DbmhConfig method_config(const std::string& method, DbmhConfig base) {
  auto& t = base.toggles;
  if (method == "dbmh") return base;
  if (method == "mip-only") {
    t.use_ch = t.use_ls = t.use_dbi = t.use_cb = false;
    t.use_mip = true;
    return base;
  }
  if (method == "ch+ls") {
    t.use_ch = t.use_ls = true;
    t.use_dbi = t.use_cb = t.use_mip = false;
    t.extend_time_on_disable = false;
    return base;
  }
  throw std::invalid_argument("unknown method '" + method + "' (mip-only, ch+ls, dbmh)");
}

void finalize(SuiteResult& r, const std::map<std::string, int>& best_known) {
  std::map<std::string, int> best = best_known;
  for (const auto& row : r.rows) {
    if (row.objective < 0) continue;
    auto it = best.find(row.instance);
    if (it == best.end() || row.objective < it->second) best[row.instance] = row.objective;
  }
  for (auto& row : r.rows) {
    row.gap_pct.reset();
    row.delta_z_pct.reset();
    if (row.objective < 0) continue;
    row.gap_pct = row.status == "optimal" || row.objective == 0
                      ? 0.0
                      : 100.0 * (row.objective - row.final_lb) / row.objective;
    auto it = best.find(row.instance);
    if (it != best.end() && it->second > 0) row.delta_z_pct = 100.0 * (row.objective - it->second) / it->second;
    else if (it != best.end()) row.delta_z_pct = 0.0;
  }
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const SuiteRow& a, const SuiteRow& b) {
    return std::tie(a.method, a.size_class, a.instance, a.seed, a.run) <
           std::tie(b.method, b.size_class, b.instance, b.seed, b.run);
  });
  r.aggregates.clear();
  std::map<std::pair<std::string, std::string>, std::vector<const SuiteRow*>> groups;
  for (const auto& row : r.rows) groups[{row.method, row.size_class}].push_back(&row);
  for (const auto& [key, rows] : groups) {
    SuiteAggregate a{key.first, key.second, static_cast<int>(rows.size())};
    int solved = 0, with_gap = 0, with_dz = 0;
    for (const auto* row : rows) {
      solved += row->status == "optimal" || row->status == "infeasible";
      a.mean_time_s += row->time_s;
      if (row->gap_pct) {
        a.mean_gap_pct += *row->gap_pct;
        ++with_gap;
      }
      if (row->delta_z_pct) {
        a.mean_delta_z_pct += *row->delta_z_pct;
        ++with_dz;
      }
    }
    a.opt_solved_pct = 100.0 * solved / a.rows;
    a.mean_time_s /= a.rows;
    if (with_gap) a.mean_gap_pct /= with_gap;
    if (with_dz) a.mean_delta_z_pct /= with_dz;
    r.aggregates.push_back(a);
  }
}

SuiteResult bench(const Suite& suite, const DbmhConfig& base, const BenchOptions& opt) {
  const auto methods = opt.methods.empty() ? suite.spec.methods : opt.methods;
  const int runs = opt.runs > 0 ? opt.runs : suite.spec.runs;
  const auto seeds = opt.seed ? std::vector<std::uint64_t>{*opt.seed} : suite.spec.seeds;
  for (const auto& m : methods) method_config(m, base);  // reject unknown names early

  struct Job {
    const Instance* inst;
    std::string method;
    std::uint64_t seed;
    int run;
  };
  std::vector<Job> jobs;
  for (const auto& inst : suite.instances) {
    for (const auto& m : methods) {
      for (auto sd : seeds) {
        for (int k = 0; k < runs; ++k) jobs.push_back({&inst, m, sd, k});
      }
    }
  }
  SuiteResult res;
  res.rows.resize(jobs.size());
  parallel_for(jobs.size(), opt.workers, [&](std::size_t i) {
    const Job& j = jobs[i];
    SuiteRow& row = res.rows[i];
    row.instance = j.inst->name;
    row.method = j.method;
    row.seed = j.seed;
    row.run = j.run;
    try {
      DbmhConfig cfg = method_config(j.method, base);
      cfg.seed = mix(j.seed ^ (static_cast<std::uint64_t>(j.run) << 32));
      if (j.run == 0) cfg.seed = j.seed;
      const RunReport rep = run(*j.inst, cfg);
      row.size_class = rep.graph.size_class;
      row.status = to_string(rep.status);
      row.objective = rep.objective;
      row.final_lb = rep.final_lb;
      row.time_s = rep.timings.total;
    } catch (const std::exception& e) {
      row.size_class = size_class_of(*j.inst);
      row.status = "error";
      row.error = e.what();
    }
  });
  finalize(res, suite.best_known);
  return res;
}

std::string aggregates_csv(const SuiteResult& r, bool timings) {
  std::ostringstream os;
  os << "method,size_class,rows,opt_solved_pct,mean_time_s,mean_gap_pct,mean_delta_z_pct\n";
  auto aggs = r.aggregates;
  std::stable_sort(aggs.begin(), aggs.end(), [](const SuiteAggregate& a, const SuiteAggregate& b) {
    return std::tie(a.size_class, a.method) < std::tie(b.size_class, b.method);
  });
  for (const auto& a : aggs) {
    os << a.method << ',' << a.size_class << ',' << a.rows << ',' << fmt(a.opt_solved_pct) << ','
       << (timings ? fmt(a.mean_time_s, 3) : "") << ',' << fmt(a.mean_gap_pct) << ',' << fmt(a.mean_delta_z_pct)
       << "\n";
  }
  return os.str();
}

std::string rows_csv(const SuiteResult& r, bool timings) {
  std::ostringstream os;
  os << "size_class,instance,method,seed,run,status,objective,final_lb,gap_pct,delta_z_pct,time_s,error\n";
  auto rows = r.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const SuiteRow& a, const SuiteRow& b) {
    return std::tie(a.size_class, a.instance, a.method, a.seed, a.run) <
           std::tie(b.size_class, b.instance, b.method, b.seed, b.run);
  });
  for (const auto& row : rows) {
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << row.size_class << ',' << row.instance << ',' << row.method << ',' << row.seed << ',' << row.run << ','
       << row.status << ',' << obj_fmt(row.objective) << ',' << row.final_lb << ',' << opt_fmt(row.gap_pct) << ','
       << opt_fmt(row.delta_z_pct) << ',' << (timings ? fmt(row.time_s, 3) : "") << ',' << err << "\n";
  }
  return os.str();
}

// --- ablation -----------------------------------------------------------------

AblationResult ablate(const Suite& suite, const DbmhConfig& base, int workers) {
  AblationResult res;
  const std::size_t n = suite.instances.size();
  res.rows.resize(7 * n);
  parallel_for(res.rows.size(), workers, [&](std::size_t i) {
    const int v = static_cast<int>(i / std::max<std::size_t>(n, 1));
    const Instance& inst = suite.instances[i % n];
    AblationRow& row = res.rows[i];
    row.variant = v;
    row.instance = inst.name;
    try {
      const RunReport rep = run(inst, variant_config(v, base));
      row.size_class = rep.graph.size_class;
      row.status = to_string(rep.status);
      row.objective = rep.objective;
    } catch (const std::exception& e) {
      row.size_class = size_class_of(inst);
      row.status = "error";
    }
  });
  std::stable_sort(res.rows.begin(), res.rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return std::tie(a.variant, a.size_class, a.instance) < std::tie(b.variant, b.size_class, b.instance);
  });
  return res;
}

std::string ablation_rows_csv(const AblationResult& r) {
  std::ostringstream os;
  os << "variant,size_class,instance,status,objective\n";
  for (const auto& row : r.rows) {
    os << row.variant << ',' << row.size_class << ',' << row.instance << ',' << row.status << ','
       << obj_fmt(row.objective) << "\n";
  }
  return os.str();
}

std::string ablation_summary_csv(const AblationResult& r, const std::map<std::string, int>& best_known) {
  std::map<std::string, int> best = best_known;
  for (const auto& row : r.rows) {
    if (row.objective < 0) continue;
    auto it = best.find(row.instance);
    if (it == best.end() || row.objective < it->second) best[row.instance] = row.objective;
  }
  std::ostringstream os;
  os << "variant,instances,solved_pct,feasible_pct,mean_delta_z_pct\n";
  std::map<int, std::vector<const AblationRow*>> by_variant;
  for (const auto& row : r.rows) by_variant[row.variant].push_back(&row);
  for (const auto& [v, rows] : by_variant) {
    int solved = 0, feasible = 0, with_dz = 0;
    double dz = 0;
    for (const auto* row : rows) {
      solved += row->status == "optimal" || row->status == "infeasible";
      if (row->objective < 0) continue;
      ++feasible;
      auto it = best.find(row->instance);
      if (it != best.end() && it->second > 0) {
        dz += 100.0 * (row->objective - it->second) / it->second;
        ++with_dz;
      }
    }
    const double n = static_cast<double>(rows.size());
    os << v << ',' << rows.size() << ',' << fmt(100.0 * solved / n) << ',' << fmt(100.0 * feasible / n) << ','
       << fmt(with_dz ? dz / with_dz : 0.0) << "\n";
  }
  return os.str();
}

// --- bounds -------------------------------------------------------------------

std::vector<BoundRow> compare_bounds(const Suite& suite, const DbmhConfig& base, int workers) {
  std::vector<BoundRow> rows(suite.instances.size());
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const Instance& inst = suite.instances[i];
    BoundRow& row = rows[i];
    row.instance = inst.name;
    try {
      const RunReport rep = run(inst, base);
      row.size_class = rep.graph.size_class;
      row.lb1 = rep.bounds.lb1;
      row.lb2 = rep.bounds.lb2;
      row.lb = rep.bounds.lb;
      row.dlb = rep.status == RunStatus::optimal ? rep.objective : rep.dlb;
      row.ub = rep.bounds.ub;
      row.status = to_string(rep.status);
      row.objective = rep.objective;
    } catch (const std::exception&) {
      row.size_class = size_class_of(inst);
      row.status = "error";
    }
  });
  std::stable_sort(rows.begin(), rows.end(), [](const BoundRow& a, const BoundRow& b) {
    return by_class_then_name(a.size_class, a.instance, b.size_class, b.instance);
  });
  return rows;
}

std::string bounds_csv(const std::vector<BoundRow>& rows) {
  std::ostringstream os;
  os << "size_class,instance,lb1,lb2,lb,dlb,ub,status,objective\n";
  for (const auto& r : rows) {
    os << r.size_class << ',' << r.instance << ',' << r.lb1 << ',' << r.lb2 << ',' << r.lb << ',' << r.dlb << ','
       << r.ub << ',' << r.status << ',' << obj_fmt(r.objective) << "\n";
  }
  return os.str();
}

std::string bounds_summary_csv(const std::vector<BoundRow>& rows) {
  int lb1_wins = 0, lb2_wins = 0, ties = 0, gains = 0;
  double gain = 0;
  for (const auto& r : rows) {
    if (r.status == "error") continue;
    if (r.lb1 > r.lb2) ++lb1_wins;
    else if (r.lb2 > r.lb1) ++lb2_wins;
    else ++ties;
    if (r.lb > 0) {
      gain += 100.0 * (r.dlb - r.lb) / r.lb;
      ++gains;
    }
  }
  const double n = std::max(1, lb1_wins + lb2_wins + ties);
  std::ostringstream os;
  os << "instances,lb1_dominates_pct,lb2_dominates_pct,tie_pct,mean_dlb_gain_pct\n";
  os << (lb1_wins + lb2_wins + ties) << ',' << fmt(100.0 * lb1_wins / n) << ',' << fmt(100.0 * lb2_wins / n) << ','
     << fmt(100.0 * ties / n) << ',' << fmt(gains ? gain / gains : 0.0) << "\n";
  return os.str();
}

// --- sweeps -------------------------------------------------------------------

SweepAxis parse_axis(const std::string& s) {
  if (s == "theta_tw") return SweepAxis::theta_tw;
  if (s == "zeta") return SweepAxis::zeta;
  if (s == "ell") return SweepAxis::ell;
  if (s == "exchange_policy") return SweepAxis::exchange_policy;
  if (s == "decomposition") return SweepAxis::decomposition;
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::theta_tw: return "theta_tw";
    case SweepAxis::zeta: return "zeta";
    case SweepAxis::ell: return "ell";
    case SweepAxis::exchange_policy: return "exchange_policy";
    case SweepAxis::decomposition: return "decomposition";
  }
  return "?";
}

std::vector<std::string> default_axis_values(SweepAxis a) {
  switch (a) {
    case SweepAxis::theta_tw: return {"10", "30"};
    case SweepAxis::zeta: return {"5", "10", "20"};
    case SweepAxis::ell: return {"10", "5"};
    case SweepAxis::exchange_policy: return {"none", "regular", "full"};
    case SweepAxis::decomposition: return {"subcontractor", "line"};
  }
  return {};
}

Instance apply_axis(const Instance& inst, SweepAxis a, const std::string& value) {
  Instance out = inst;
  auto as_int = [&] {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("not an integer: '" + value + "'");
    return v;
  };
  switch (a) {
    case SweepAxis::theta_tw:
      out.theta_tw = as_int();
      // Explicit windows would shadow the new width.
      for (auto& r : out.rides) r.windows.clear();
      break;
    case SweepAxis::zeta: out.zeta = as_int(); break;
    case SweepAxis::ell: out.ell = as_int(); break;
    case SweepAxis::exchange_policy: out.exchange_policy = parse_policy(value); break;
    case SweepAxis::decomposition:
      if (value != "subcontractor" && value != "line") {
        throw std::invalid_argument("decomposition is 'subcontractor' or 'line', got '" + value + "'");
      }
      return out;
  }
  const auto problems = validate(out);
  if (!problems.empty()) {
    throw std::invalid_argument(to_string(a) + "=" + value + " is invalid for " + inst.name + ": " + problems.front());
  }
  return out;
}

std::vector<SweepRow> sweep(const Suite& suite, SweepAxis axis, std::vector<std::string> values, const DbmhConfig& base,
                            int workers) {
  if (values.empty()) values = default_axis_values(axis);
  const std::size_t nv = values.size();
  std::vector<SweepRow> rows(suite.instances.size() * nv);
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const Instance& inst = suite.instances[i / nv];
    const std::string& value = values[i % nv];
    SweepRow& row = rows[i];
    row.instance = inst.name;
    row.value = value;
    row.size_class = size_class_of(inst);
    try {
      std::vector<Instance> parts;
      if (axis == SweepAxis::decomposition) {
        apply_axis(inst, axis, value);
        parts = value == "line" ? split_by_line(inst) : decompose(inst);
      } else {
        parts.push_back(apply_axis(inst, axis, value));
      }
      int total = 0;
      RunStatus worst = RunStatus::optimal;
      for (const auto& p : parts) {
        const RunReport rep = run(p, base);
        row.time_s += rep.timings.total;
        if (static_cast<int>(rep.status) > static_cast<int>(worst)) worst = rep.status;
        if (rep.objective >= 0) total += rep.objective;
      }
      row.status = to_string(worst);
      if (worst == RunStatus::optimal || worst == RunStatus::feasible) row.objective = total;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& first = rows[i - i % nv];
    if (rows[i].objective >= 0 && first.objective >= 0) rows[i].delta = rows[i].objective - first.objective;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return by_class_then_name(a.size_class, a.instance, b.size_class, b.instance);
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool timings) {
  std::ostringstream os;
  os << "size_class,instance,value,status,objective,delta,time_s,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << r.size_class << ',' << r.instance << ',' << r.value << ',' << r.status << ',' << obj_fmt(r.objective) << ','
       << (r.delta ? std::to_string(*r.delta) : "") << ',' << (timings ? fmt(r.time_s, 3) : "") << ',' << err
       << "\n";
  }
  return os.str();
}

// --- fitting --------------------------------------------------------------------

namespace {

const std::vector<std::string> kFitParams{"eta_lb", "eta_mip", "eta_ls", "p", "mu", "mu_min"};

void set_param(DbmhConfig& c, const std::string& k, double v) {
  if (k == "eta_lb") c.eta_lb = v;
  else if (k == "eta_mip") c.eta_mip = v;
  else if (k == "eta_ls") c.eta_ls = v;
  else if (k == "p") c.search.p = static_cast<int>(v);
  else if (k == "mu") c.search.mu = v;
  else if (k == "mu_min") c.search.mu_min = static_cast<int>(v);
}

double get_param(const DbmhConfig& c, const std::string& k) {
  if (k == "eta_lb") return c.eta_lb;
  if (k == "eta_mip") return c.eta_mip;
  if (k == "eta_ls") return c.eta_ls;
  if (k == "p") return c.search.p;
  if (k == "mu") return c.search.mu;
  return c.search.mu_min;
}

// Mean Δz against a reference that does not move during the fit: best-known
// where recorded, else the combined lower bound.
double score(const Suite& suite, const std::vector<int>& reference, const DbmhConfig& cfg, int workers) {
  std::vector<double> dz(suite.instances.size());
  parallel_for(dz.size(), workers, [&](std::size_t i) {
    const RunReport rep = run(suite.instances[i], cfg);
    const int ref = std::max(1, reference[i]);
    const int obj = rep.objective >= 0 ? rep.objective : 2 * std::max(rep.bounds.ub, ref);
    dz[i] = 100.0 * (obj - ref) / ref;
  });
  double sum = 0;
  for (double d : dz) sum += d;
  return dz.empty() ? 0.0 : sum / static_cast<double>(dz.size());
}

}  // namespace

FitResult fit(const Suite& suite, const std::string& grid_json, const DbmhConfig& base, int workers) {
  const json grid = json::parse(grid_json);
  if (!grid.is_object()) throw std::invalid_argument("fit grid: expected an object");
  for (const auto& [k, v] : grid.items()) {
    if (std::find(kFitParams.begin(), kFitParams.end(), k) == kFitParams.end()) {
      throw std::invalid_argument("fit grid: unknown parameter '" + k + "'");
    }
    if (!v.is_array() || v.empty()) throw std::invalid_argument("fit grid: '" + k + "' needs a non-empty array");
  }
  std::vector<int> reference;
  for (const auto& inst : suite.instances) {
    auto it = suite.best_known.find(inst.name);
    reference.push_back(it != suite.best_known.end() ? it->second : compute_bounds(inst, build_graph(inst)).lb);
  }
  FitResult res;
  res.config = base;
  double current = score(suite, reference, base, workers);
  res.default_delta_z_pct = current;
  for (const auto& k : kFitParams) {
    if (!grid.contains(k)) continue;
    std::vector<double> vals = grid[k].get<std::vector<double>>();
    double best_v = get_param(res.config, k);
    for (double v : vals) {
      DbmhConfig c = res.config;
      set_param(c, k, v);
      const double s = v == best_v ? current : score(suite, reference, c, workers);
      res.trace.push_back(k + "=" + fmt(v, 3) + " " + fmt(s, 4));
      if (s < current) {
        current = s;
        best_v = v;
      }
    }
    set_param(res.config, k, best_v);
    // A singleton grid is the answer even when it scores worse.
    if (vals.size() == 1 && get_param(res.config, k) != vals.front()) {
      set_param(res.config, k, vals.front());
      current = score(suite, reference, res.config, workers);
    }
  }
  res.fitted_delta_z_pct = current;
  return res;
}

std::string fit_to_json(const FitResult& r) {
  ordered_json j;
  j["config"] = json::parse(config_to_json(r.config));
  j["default_delta_z_pct"] = std::round(r.default_delta_z_pct * 1e4) / 1e4;
  j["fitted_delta_z_pct"] = std::round(r.fitted_delta_z_pct * 1e4) / 1e4;
  j["trace"] = r.trace;
  return j.dump(2) + "\n";
}

// --- single-instance commands ----------------------------------------------

int cmd_solve(const fs::path& instance, const DbmhConfig& cfg, const fs::path& out,
              std::optional<ExchangePolicy> policy, std::ostream& log) {
  try {
    Instance inst = load_instance(instance);
    if (policy) inst.exchange_policy = *policy;
    const RunReport rep = run(inst, cfg);
    fs::create_directories(out);
    const TimeGraph g = build_graph(inst);
    write_file(out / "report.json", report_to_json(rep));
    write_file(out / "timings.json", timings_to_json(rep));
    if (rep.solution) write_file(out / "solution.json", solution_to_json(*rep.solution, inst, g));
    else if (fs::exists(out / "solution.json")) fs::remove(out / "solution.json");
    log << inst.name << ": " << to_string(rep.status);
    if (rep.objective >= 0) log << ", " << rep.objective << " drivers";
    log << " (lb " << rep.final_lb << ", by " << to_string(rep.found_by) << ")\n";
    switch (rep.status) {
      case RunStatus::optimal:
      case RunStatus::feasible: return 0;
      case RunStatus::infeasible: return 2;
      case RunStatus::no_solution: return 3;
    }
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string bounds_report_json(const Instance& inst) {
  const TimeGraph g = build_graph(inst);
  const BoundReport b = compute_bounds(inst, g);
  ordered_json j;
  j["instance"] = inst.name;
  j["ub"] = b.ub;
  j["lb1"] = b.lb1;
  j["lb2"] = b.lb2;
  j["lb"] = b.lb;
  j["busiest_interval"] = b.busiest_interval;
  j["per_ride_segments"] = b.per_ride_segments;
  j["graph"] = {{"nodes", g.nodes().size()}, {"arcs", g.arcs().size()}, {"size_class", g.stats().size_class}};
  return j.dump(2) + "\n";
}

std::string bounds_table(const Instance& inst) {
  const TimeGraph g = build_graph(inst);
  const BoundReport b = compute_bounds(inst, g);
  std::ostringstream os;
  const std::vector<std::pair<std::string, std::string>> rows{
      {"instance", inst.name},          {"UB", std::to_string(b.ub)},
      {"LB1 (steering)", std::to_string(b.lb1)}, {"LB2 (parallel)", std::to_string(b.lb2)},
      {"LB", std::to_string(b.lb)},     {"arcs", std::to_string(g.arcs().size())}};
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& r : rows) os << std::left << std::setw(static_cast<int>(w) + 2) << r.first << r.second << "\n";
  return os.str();
}

}  // namespace drsync
