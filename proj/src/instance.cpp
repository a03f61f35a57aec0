#include "drsync/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace drsync {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "drsync/1";

std::string join_lines(const std::vector<std::string>& v) {
  std::string out = "invalid instance:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  }
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

StopKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "customer") return StopKind::customer;
  if (s == "station") return StopKind::station;
  throw ParseError(where + ": unknown stop kind '" + s + "'");
}

const char* kind_name(StopKind k) { return k == StopKind::customer ? "customer" : "station"; }

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

int Instance::stop_index(const std::string& id) const {
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (stops[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string to_string(ExchangePolicy p) {
  switch (p) {
    case ExchangePolicy::none: return "none";
    case ExchangePolicy::regular_stops: return "regular_stops";
    case ExchangePolicy::regular_and_intermediate: return "regular_and_intermediate";
  }
  return "?";
}

ExchangePolicy parse_policy(const std::string& s) {
  if (s == "none") return ExchangePolicy::none;
  if (s == "regular_stops" || s == "regular") return ExchangePolicy::regular_stops;
  if (s == "regular_and_intermediate" || s == "full") return ExchangePolicy::regular_and_intermediate;
  throw ParseError("unknown exchange policy '" + s + "'");
}

std::vector<TimeWindow> derive_time_windows(const Ride& ride, Minutes theta_tw) {
  std::vector<TimeWindow> out;
  out.reserve(ride.departures.size());
  const Minutes half = theta_tw / 2;
  for (Minutes tau : ride.departures) {
    if (tau < half) {
      throw std::domain_error("ride " + ride.id + ": window below start of day (tau=" +
                              std::to_string(tau) + ")");
    }
    out.push_back({tau - half, tau - half + theta_tw});
  }
  return out;
}

std::vector<TimeWindow> ride_windows(const Ride& ride, Minutes theta_tw) {
  if (!ride.windows.empty()) return ride.windows;
  return derive_time_windows(ride, theta_tw);
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> p;
  const auto& L = inst.legal;
  if (L.t_b <= 0) p.push_back("legal: t_b must be positive");
  if (L.t_cs <= 0) p.push_back("legal: t_cs must be positive");
  if (L.t_cs > L.t_ds) p.push_back("legal: t_cs exceeds t_ds");
  if (L.t_ds > L.t_dw) p.push_back("legal: t_ds exceeds t_dw");
  if (inst.theta_tw < 0) p.push_back("params: theta_tw must be non-negative");
  if (inst.zeta < 0) p.push_back("params: zeta must be non-negative");
  if (inst.ell <= 0) {
    p.push_back("params: ell must be positive");
  } else if (inst.theta_tw % inst.ell != 0) {
    p.push_back("params: ell does not divide theta_tw");
  }
  if (inst.theta_tw % 2 != 0) p.push_back("params: theta_tw must be even");
  if (inst.theta_tw < inst.zeta) p.push_back("params: detour limit exceeds window (zeta > theta_tw)");

  std::map<std::string, StopKind> kinds;
  for (const auto& s : inst.stops) {
    if (s.id.empty()) p.push_back("stop with empty id");
    if (!kinds.emplace(s.id, s.kind).second) p.push_back("duplicate stop id '" + s.id + "'");
  }
  std::set<std::string> ride_ids;
  for (const auto& r : inst.rides) {
    const std::string where = "ride " + r.id;
    if (!ride_ids.insert(r.id).second) p.push_back("duplicate ride id '" + r.id + "'");
    if (r.stops.size() < 2) {
      p.push_back(where + ": needs at least two customer stops");
      continue;
    }
    const std::size_t n = r.stops.size();
    if (r.departures.size() != n) p.push_back(where + ": departures length differs from stops");
    if (r.segment_minutes.size() != n - 1) p.push_back(where + ": segment_minutes length must be stops-1");
    if (r.stations.size() != n - 1) p.push_back(where + ": stations length must be stops-1");
    for (const auto& sid : r.stops) {
      auto it = kinds.find(sid);
      if (it == kinds.end()) p.push_back(where + ": unknown stop '" + sid + "'");
      else if (it->second != StopKind::customer) p.push_back(where + ": stop '" + sid + "' is not a customer stop");
    }
    {
      std::set<std::string> seen(r.stops.begin(), r.stops.end());
      if (seen.size() != r.stops.size()) p.push_back(where + ": a stop is visited twice");
    }
    for (std::size_t i = 1; i < r.departures.size(); ++i) {
      if (r.departures[i] <= r.departures[i - 1]) {
        p.push_back(where + ": departures not strictly increasing at position " + std::to_string(i));
      }
    }
    for (std::size_t i = 0; i < r.departures.size(); ++i) {
      if (r.windows.empty() && r.departures[i] < inst.theta_tw / 2) {
        p.push_back(where + ": window below start of day at position " + std::to_string(i));
      }
    }
    for (std::size_t s = 0; s < r.segment_minutes.size(); ++s) {
      if (r.segment_minutes[s] <= 0) p.push_back(where + ": segment " + std::to_string(s) + " has non-positive drive time");
    }
    for (std::size_t s = 0; s < r.stations.size() && s < r.segment_minutes.size(); ++s) {
      for (const auto& acc : r.stations[s]) {
        auto it = kinds.find(acc.station);
        if (it == kinds.end()) p.push_back(where + ": unknown station '" + acc.station + "'");
        else if (it->second != StopKind::station) p.push_back(where + ": '" + acc.station + "' is not a station");
        if (acc.in_minutes <= 0 || acc.out_minutes <= 0) {
          p.push_back(where + ": station '" + acc.station + "' needs positive drive times");
        }
        if (acc.in_minutes + acc.out_minutes < r.segment_minutes[s]) {
          p.push_back(where + ": station '" + acc.station + "' is faster than the direct segment " +
                      std::to_string(s));
        }
      }
    }
    if (!r.windows.empty()) {
      if (r.windows.size() != n) p.push_back(where + ": windows length differs from stops");
      for (std::size_t i = 0; i < r.windows.size(); ++i) {
        const auto& w = r.windows[i];
        if (w.l - w.e != inst.theta_tw || w.e > w.l) {
          p.push_back(where + ": window " + std::to_string(i) + " [" + std::to_string(w.e) + ", " +
                      std::to_string(w.l) + "] does not have width theta_tw");
        }
        if (w.e < 0) p.push_back(where + ": window " + std::to_string(i) + " starts before the day");
      }
    }
  }
  return p;
}

std::vector<std::string> coverage_warnings(const Instance& inst) {
  std::vector<std::string> w;
  const bool stations_on = inst.exchange_policy == ExchangePolicy::regular_and_intermediate;
  for (const auto& r : inst.rides) {
    for (std::size_t s = 0; s < r.segment_minutes.size() && s < r.stations.size(); ++s) {
      if (r.segment_minutes[s] <= inst.legal.t_cs) continue;
      bool usable = false;
      if (stations_on) {
        for (const auto& acc : r.stations[s]) {
          const Minutes detour = acc.in_minutes + acc.out_minutes - r.segment_minutes[s];
          if (detour <= inst.zeta && acc.in_minutes <= inst.legal.t_cs &&
              acc.out_minutes <= inst.legal.t_cs) {
            usable = true;
          }
        }
      }
      if (!usable) {
        w.push_back("ride " + r.id + " segment " + std::to_string(s) + ": direct drive " +
                    std::to_string(r.segment_minutes[s]) +
                    " min exceeds t_cs with no admissible station; instance is infeasible");
      }
    }
  }
  return w;
}

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  require_keys(j, {"schema", "name", "legal", "params", "stops", "rides"},
               {"schema", "legal", "params", "stops", "rides"}, "instance");
  if (get_as<std::string>(j["schema"], "schema") != kSchema) {
    throw ParseError("unsupported schema '" + j["schema"].dump() + "', expected " + kSchema);
  }
  Instance inst;
  if (j.contains("name")) inst.name = get_as<std::string>(j["name"], "name");

  const json& legal = j["legal"];
  require_keys(legal, {"t_cs", "t_b", "t_ds", "t_dw"}, {"t_cs", "t_b", "t_ds", "t_dw"}, "legal");
  inst.legal.t_cs = get_as<int>(legal["t_cs"], "legal.t_cs");
  inst.legal.t_b = get_as<int>(legal["t_b"], "legal.t_b");
  inst.legal.t_ds = get_as<int>(legal["t_ds"], "legal.t_ds");
  inst.legal.t_dw = get_as<int>(legal["t_dw"], "legal.t_dw");

  const json& params = j["params"];
  require_keys(params, {"theta_tw", "zeta", "ell", "exchange_policy"},
               {"theta_tw", "zeta", "ell", "exchange_policy"}, "params");
  inst.theta_tw = get_as<int>(params["theta_tw"], "params.theta_tw");
  inst.zeta = get_as<int>(params["zeta"], "params.zeta");
  inst.ell = get_as<int>(params["ell"], "params.ell");
  inst.exchange_policy = parse_policy(get_as<std::string>(params["exchange_policy"], "params.exchange_policy"));

  if (!j["stops"].is_array()) throw ParseError("stops: expected an array");
  for (const auto& s : j["stops"]) {
    require_keys(s, {"id", "kind", "location"}, {"id", "kind"}, "stop");
    Stop st;
    st.id = get_as<std::string>(s["id"], "stop.id");
    st.kind = parse_kind(get_as<std::string>(s["kind"], "stop.kind"), "stop " + st.id);
    if (s.contains("location")) st.location = get_as<std::string>(s["location"], "stop.location");
    inst.stops.push_back(std::move(st));
  }

  if (!j["rides"].is_array()) throw ParseError("rides: expected an array");
  for (const auto& r : j["rides"]) {
    require_keys(r, {"id", "line_id", "stops", "departures", "segment_minutes", "stations", "windows"},
                 {"id", "line_id", "stops", "departures", "segment_minutes", "stations"}, "ride");
    Ride ride;
    ride.id = get_as<std::string>(r["id"], "ride.id");
    const std::string where = "ride " + ride.id;
    ride.line_id = get_as<std::string>(r["line_id"], where + ".line_id");
    ride.stops = get_as<std::vector<std::string>>(r["stops"], where + ".stops");
    ride.departures = get_as<std::vector<int>>(r["departures"], where + ".departures");
    ride.segment_minutes = get_as<std::vector<int>>(r["segment_minutes"], where + ".segment_minutes");
    if (!r["stations"].is_array()) throw ParseError(where + ".stations: expected an array");
    for (const auto& seg : r["stations"]) {
      if (!seg.is_array()) throw ParseError(where + ".stations: expected an array per segment");
      std::vector<StationAccess> accs;
      for (const auto& a : seg) {
        require_keys(a, {"id", "in_minutes", "out_minutes"}, {"id", "in_minutes", "out_minutes"},
                     where + ".stations[]");
        accs.push_back({get_as<std::string>(a["id"], where + ".stations.id"),
                        get_as<int>(a["in_minutes"], where + ".stations.in_minutes"),
                        get_as<int>(a["out_minutes"], where + ".stations.out_minutes")});
      }
      ride.stations.push_back(std::move(accs));
    }
    if (r.contains("windows")) {
      for (const auto& w : r["windows"]) {
        auto pair = get_as<std::vector<int>>(w, where + ".windows");
        if (pair.size() != 2) throw ParseError(where + ".windows: expected [e, l] pairs");
        ride.windows.push_back({pair[0], pair[1]});
      }
    }
    inst.rides.push_back(std::move(ride));
  }

  auto problems = validate(inst);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  inst.warnings = coverage_warnings(inst);
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Instance inst = parse_instance(ss.str());
  if (inst.name.empty()) inst.name = path.stem().string();
  return inst;
}

std::string dump_instance(const Instance& inst) {
  json j;
  j["schema"] = kSchema;
  if (!inst.name.empty()) j["name"] = inst.name;
  j["legal"] = {{"t_cs", inst.legal.t_cs}, {"t_b", inst.legal.t_b}, {"t_ds", inst.legal.t_ds},
                {"t_dw", inst.legal.t_dw}};
  j["params"] = {{"theta_tw", inst.theta_tw}, {"zeta", inst.zeta}, {"ell", inst.ell},
                 {"exchange_policy", to_string(inst.exchange_policy)}};
  j["stops"] = json::array();
  for (const auto& s : inst.stops) {
    json js = {{"id", s.id}, {"kind", kind_name(s.kind)}};
    if (!s.location.empty()) js["location"] = s.location;
    j["stops"].push_back(js);
  }
  j["rides"] = json::array();
  for (const auto& r : inst.rides) {
    json jr = {{"id", r.id}, {"line_id", r.line_id}, {"stops", r.stops}, {"departures", r.departures},
               {"segment_minutes", r.segment_minutes}};
    jr["stations"] = json::array();
    for (const auto& seg : r.stations) {
      json js = json::array();
      for (const auto& a : seg) {
        js.push_back({{"id", a.station}, {"in_minutes", a.in_minutes}, {"out_minutes", a.out_minutes}});
      }
      jr["stations"].push_back(js);
    }
    if (!r.windows.empty()) {
      jr["windows"] = json::array();
      for (const auto& w : r.windows) jr["windows"].push_back({w.e, w.l});
    }
    j["rides"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_instance(inst);
}

Instance filter_stations(const Instance& inst) {
  Instance out = inst;
  for (auto& r : out.rides) {
    for (std::size_t s = 0; s < r.stations.size() && s < r.segment_minutes.size(); ++s) {
      auto& accs = r.stations[s];
      const Minutes direct = r.segment_minutes[s];
      accs.erase(std::remove_if(accs.begin(), accs.end(),
                                [&](const StationAccess& a) {
                                  return a.in_minutes + a.out_minutes - direct > inst.zeta;
                                }),
                 accs.end());
    }
  }
  return out;
}

namespace {

// Sub-instance with the given rides, keeping referenced stops in original order.
Instance subset(const Instance& inst, const std::vector<std::size_t>& ride_idx, const std::string& suffix) {
  Instance out;
  out.name = inst.name.empty() ? suffix : inst.name + "/" + suffix;
  out.legal = inst.legal;
  out.theta_tw = inst.theta_tw;
  out.zeta = inst.zeta;
  out.ell = inst.ell;
  out.exchange_policy = inst.exchange_policy;
  std::set<std::string> used;
  for (std::size_t i : ride_idx) {
    const auto& r = inst.rides[i];
    out.rides.push_back(r);
    used.insert(r.stops.begin(), r.stops.end());
    for (const auto& seg : r.stations) {
      for (const auto& a : seg) used.insert(a.station);
    }
  }
  for (const auto& s : inst.stops) {
    if (used.count(s.id)) out.stops.push_back(s);
  }
  out.warnings = coverage_warnings(out);
  return out;
}

}  // namespace

std::vector<Instance> decompose(const Instance& inst) {
  const std::size_t n = inst.rides.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, std::size_t> owner;
  auto touch = [&](const std::string& stop, std::size_t ride) {
    auto [it, fresh] = owner.emplace(stop, ride);
    if (!fresh) {
      std::size_t a = find(it->second), b = find(ride);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : inst.rides[i].stops) touch(s, i);
    for (const auto& seg : inst.rides[i].stations) {
      for (const auto& a : seg) touch(a.station, i);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<Instance> out;
  int k = 0;
  for (const auto& [root, rides] : groups) out.push_back(subset(inst, rides, "c" + std::to_string(k++)));
  return out;
}

std::vector<Instance> split_by_line(const Instance& inst) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < inst.rides.size(); ++i) {
    const auto& line = inst.rides[i].line_id;
    if (!groups.count(line)) order.push_back(line);
    groups[line].push_back(i);
  }
  std::vector<Instance> out;
  for (const auto& line : order) {
    Instance sub = subset(inst, groups[line], line);
    if (order.size() == 1) sub.name = inst.name;
    out.push_back(std::move(sub));
  }
  return out;
}

}  // namespace drsync
