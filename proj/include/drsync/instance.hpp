#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsync {

/// All times are integer minutes from midnight of the planning day.
using Minutes = int;

/// Hours-of-service limits for a single day of driving.
struct LegalParams {
  Minutes t_cs = 270;  // max continuous steering
  Minutes t_b = 45;    // min break
  Minutes t_ds = 660;  // max daily steering
  Minutes t_dw = 780;  // max daily working time

  bool operator==(const LegalParams&) const = default;
};

enum class StopKind { customer, station };

/// Where drivers may change buses.
///  - none: drivers board and leave a bus only at the first and last stop
///    of its ride (teams on board may swap the wheel at customer stops)
///  - regular_stops: exchanges at any customer stop, stations disabled
///  - regular_and_intermediate: exchanges at customer stops and stations
enum class ExchangePolicy { none, regular_stops, regular_and_intermediate };

struct Stop {
  std::string id;
  StopKind kind = StopKind::customer;
  std::string location;  // opaque, informational only

  bool operator==(const Stop&) const = default;
};

struct StationAccess {
  std::string station;
  Minutes in_minutes = 0;   // previous customer stop -> station
  Minutes out_minutes = 0;  // station -> next customer stop

  bool operator==(const StationAccess&) const = default;
};

struct TimeWindow {
  Minutes e = 0;
  Minutes l = 0;

  bool operator==(const TimeWindow&) const = default;
};

struct Ride {
  std::string id;
  std::string line_id;
  std::vector<std::string> stops;             // customer stop ids, pickup first
  std::vector<Minutes> departures;            // scheduled minute per stop
  std::vector<Minutes> segment_minutes;       // direct drive time per segment
  std::vector<std::vector<StationAccess>> stations;  // per segment
  std::vector<TimeWindow> windows;            // optional explicit windows

  std::size_t segment_count() const { return stops.size() < 2 ? 0 : stops.size() - 1; }

  bool operator==(const Ride&) const = default;
};

struct Instance {
  std::string name;
  LegalParams legal;
  Minutes theta_tw = 10;
  Minutes zeta = 10;
  Minutes ell = 10;
  ExchangePolicy exchange_policy = ExchangePolicy::regular_and_intermediate;
  std::vector<Stop> stops;
  std::vector<Ride> rides;
  // Loader diagnostics that do not invalidate the instance.
  std::vector<std::string> warnings;

  /// Index of the stop with this id, or -1.
  int stop_index(const std::string& id) const;

  bool operator==(const Instance& o) const {
    return name == o.name && legal == o.legal && theta_tw == o.theta_tw && zeta == o.zeta &&
           ell == o.ell && exchange_policy == o.exchange_policy && stops == o.stops &&
           rides == o.rides;
  }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised with every violated invariant, one per line in what().
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

std::string to_string(ExchangePolicy p);
ExchangePolicy parse_policy(const std::string& s);

/// Every violated invariant of the instance; empty when valid.
std::vector<std::string> validate(const Instance& inst);

/// Soft problems: direct segments above t_cs with no usable station.
std::vector<std::string> coverage_warnings(const Instance& inst);

Instance parse_instance(const std::string& json_text);
Instance load_instance(const std::filesystem::path& path);
std::string dump_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// Window per customer stop: [tau - theta/2, tau + theta/2].
std::vector<TimeWindow> derive_time_windows(const Ride& ride, Minutes theta_tw);

/// Windows actually used for a ride: explicit ones when given, else derived.
std::vector<TimeWindow> ride_windows(const Ride& ride, Minutes theta_tw);

/// Copy of the instance keeping only stations whose detour
/// (in + out - direct) is within zeta.
Instance filter_stations(const Instance& inst);

/// Connected components of the ride/stop sharing graph.
std::vector<Instance> decompose(const Instance& inst);

/// One sub-instance per line, in order of first appearance.
std::vector<Instance> split_by_line(const Instance& inst);

// --- synthetic generation -------------------------------------------------

enum class OverlapProfile { sequential, parallel, mixed, hub };

struct GeneratorConfig {
  int n_lines = 1;
  int rides_per_line = 2;
  int segments_per_ride = 2;
  int stations_per_segment = 1;
  Minutes drive_min = 30;
  Minutes drive_max = 120;
  OverlapProfile overlap = OverlapProfile::mixed;
  Minutes day_start = 360;
  Minutes theta_tw = 10;
  Minutes zeta = 10;
  Minutes ell = 10;
  ExchangePolicy policy = ExchangePolicy::regular_and_intermediate;
  LegalParams legal;
};

struct GeneratedInstance {
  Instance instance;
  std::size_t arc_count = 0;
  std::string size_class;
};

/// Deterministic for a fixed seed on every platform (own integer sampling).
GeneratedInstance generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

std::string to_string(OverlapProfile p);
OverlapProfile parse_overlap(const std::string& s);

}  // namespace drsync
