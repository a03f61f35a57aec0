#include <random>
#include <stdexcept>

#include "drsync/instance.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  // Inclusive range; plain modulo keeps results identical across platforms.
  int uniform(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

struct Line {
  std::vector<std::string> stops;
  std::vector<Minutes> drive;
  std::vector<std::vector<StationAccess>> stations;
};

}  // namespace

std::string to_string(OverlapProfile p) {
  switch (p) {
    case OverlapProfile::sequential: return "sequential";
    case OverlapProfile::parallel: return "parallel";
    case OverlapProfile::mixed: return "mixed";
    case OverlapProfile::hub: return "hub";
  }
  return "?";
}

OverlapProfile parse_overlap(const std::string& s) {
  if (s == "sequential") return OverlapProfile::sequential;
  if (s == "parallel") return OverlapProfile::parallel;
  if (s == "mixed") return OverlapProfile::mixed;
  if (s == "hub") return OverlapProfile::hub;
  throw std::invalid_argument("unknown overlap profile '" + s + "'");
}

GeneratedInstance generate_synthetic(const GeneratorConfig& c, std::uint64_t seed) {
  if (c.n_lines < 1 || c.rides_per_line < 1 || c.segments_per_ride < 1 || c.stations_per_segment < 0) {
    throw std::invalid_argument("generator: counts must be positive");
  }
  if (c.drive_min < 5 || c.drive_max < c.drive_min) {
    throw std::invalid_argument("generator: drive-time range must satisfy 5 <= min <= max");
  }
  if (c.drive_max > c.legal.t_cs && c.stations_per_segment == 0) {
    throw std::invalid_argument("generator: segments longer than t_cs need a station");
  }
  if (c.drive_max > 2 * c.legal.t_cs - c.zeta) {
    throw std::invalid_argument("generator: drive_max too long to split at one station");
  }
  Rng rng(seed);
  Instance inst;
  inst.name = "syn-" + std::to_string(seed);
  inst.legal = c.legal;
  inst.theta_tw = c.theta_tw;
  inst.zeta = c.zeta;
  inst.ell = c.ell;
  inst.exchange_policy = c.policy;

  auto add_stop = [&](const std::string& id, StopKind kind) {
    if (inst.stop_index(id) < 0) inst.stops.push_back({id, kind, id});
  };

  std::vector<Line> lines;
  for (int l = 0; l < c.n_lines; ++l) {
    Line line;
    const std::string prefix = "L" + std::to_string(l + 1);
    for (int i = 0; i <= c.segments_per_ride; ++i) {
      std::string id = (c.overlap == OverlapProfile::hub && i == 0) ? "HUB" : prefix + "S" + std::to_string(i);
      add_stop(id, StopKind::customer);
      line.stops.push_back(id);
    }
    for (int i = 0; i < c.segments_per_ride; ++i) {
      const Minutes d = rng.uniform(c.drive_min / 5, c.drive_max / 5) * 5;
      line.drive.push_back(d);
      std::vector<StationAccess> acc;
      for (int j = 0; j < c.stations_per_segment; ++j) {
        const std::string id = prefix + "X" + std::to_string(i) + std::to_string(j);
        add_stop(id, StopKind::station);
        const Minutes detour = rng.uniform(1, c.zeta + 5);
        Minutes in = rng.uniform((d + 2) / 3, (2 * d) / 3);
        if (in < 1) in = 1;
        Minutes out = d + detour - in;
        // Long segments must be splittable under t_cs.
        if (d > c.legal.t_cs) {
          in = (d + detour) / 2;
          out = d + detour - in;
        }
        acc.push_back({id, in, out});
      }
      line.stations.push_back(std::move(acc));
    }
    lines.push_back(std::move(line));
  }

  int ride_no = 0;
  for (int l = 0; l < c.n_lines; ++l) {
    const Line& line = lines[l];
    Minutes line_start = c.day_start;
    if (c.overlap == OverlapProfile::mixed || c.overlap == OverlapProfile::hub) {
      line_start += rng.uniform(0, 48) * 5;
    } else if (c.overlap == OverlapProfile::parallel) {
      line_start += rng.uniform(0, 4) * 5;
    }
    Minutes t = line_start;
    for (int k = 0; k < c.rides_per_line; ++k) {
      const bool reverse = k % 2 == 1;
      Ride r;
      r.id = "R" + std::to_string(++ride_no);
      r.line_id = "L" + std::to_string(l + 1);
      const std::size_t n = line.stops.size();
      for (std::size_t i = 0; i < n; ++i) r.stops.push_back(line.stops[reverse ? n - 1 - i : i]);
      for (std::size_t s = 0; s + 1 < n; ++s) {
        const std::size_t src = reverse ? n - 2 - s : s;
        r.segment_minutes.push_back(line.drive[src]);
        std::vector<StationAccess> acc = line.stations[src];
        if (reverse) {
          for (auto& a : acc) std::swap(a.in_minutes, a.out_minutes);
        }
        r.stations.push_back(std::move(acc));
      }
      Minutes dep = t;
      if (c.overlap == OverlapProfile::parallel) dep = line_start + rng.uniform(0, 4) * 5;
      if (c.overlap == OverlapProfile::mixed || c.overlap == OverlapProfile::hub) {
        dep = t + rng.uniform(0, 12) * 5;
      }
      r.departures.push_back(dep);
      for (Minutes d : r.segment_minutes) r.departures.push_back(r.departures.back() + d);
      const Minutes arrival = r.departures.back();
      if (c.overlap == OverlapProfile::sequential) t = arrival + rng.uniform(0, 12) * 5;
      else if (c.overlap != OverlapProfile::parallel) t = dep + (arrival - dep) / 2;
      inst.rides.push_back(std::move(r));
    }
  }

  auto problems = validate(inst);
  if (!problems.empty()) throw ValidationError(problems);
  GeneratedInstance out;
  out.arc_count = build_graph(inst).arcs().size();
  out.size_class = size_class_for(out.arc_count);
  out.instance = std::move(inst);
  return out;
}

}  // namespace drsync
