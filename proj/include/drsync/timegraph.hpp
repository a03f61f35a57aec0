#pragma once

#include <string>
#include <vector>

#include "drsync/instance.hpp"

namespace drsync {

enum class ArcFamily { depot, steering, deadhead, waiting };

/// Role of a steering (or deadhead) arc within its ride segment.
enum class LegKind { none, direct, to_station, from_station };

constexpr int kNoLocation = -1;

/// A (location, minute) copy. The two depot endpoints have no time.
struct TimedNode {
  int id = 0;
  int location = kNoLocation;  // index into Instance::stops
  Minutes time = 0;
  bool is_source = false;
  bool is_sink = false;

  bool is_depot() const { return is_source || is_sink; }
};

struct TimedArc {
  int id = 0;
  int from = 0;
  int to = 0;
  int mode = 0;  // 1 = steering
  ArcFamily family = ArcFamily::depot;
  Minutes duration = 0;
  // Continuous-steering consumption. Break-length waits and deadheads carry
  // -t_cs, i.e. a full renewal.
  Minutes consumption = 0;
  int ride = -1;
  int segment = -1;
  LegKind leg = LegKind::none;
  int station = kNoLocation;  // station location for to/from_station legs
  int twin = -1;              // steering <-> deadhead partner
};

enum class CutKind { out, in, out_steering, in_steering };

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t arcs = 0;
  std::string size_class;
};

std::string size_class_for(std::size_t arc_count);

/// Node copies before any arc exists.
struct NodeExpansion {
  std::vector<TimedNode> nodes;             // source, sink, then timed copies
  std::vector<std::vector<int>> t_map;      // per location, ascending time
  std::vector<std::vector<std::vector<int>>> stop_copies;  // [ride][pos]
  // [ride][segment] -> (station location, station node) pairs
  std::vector<std::vector<std::vector<std::pair<int, int>>>> station_copies;
};

class TimeGraph;
TimeGraph assemble_graph(const Instance& inst, NodeExpansion nodes, std::vector<TimedArc> arcs);

/// Time-expanded multigraph. Nodes are unique per (location, time); arcs
/// carry the ride segment they serve.
class TimeGraph {
 public:
  static constexpr int kSource = 0;
  static constexpr int kSink = 1;

  const std::vector<TimedNode>& nodes() const { return nodes_; }
  const std::vector<TimedArc>& arcs() const { return arcs_; }
  const TimedNode& node(int id) const { return nodes_[id]; }
  const TimedArc& arc(int id) const { return arcs_[id]; }

  /// Timed copies of a location, ascending by time.
  const std::vector<int>& copies(int location) const { return t_map_[location]; }
  /// Customer copies of stop `pos` of ride `ride`, ascending by time.
  const std::vector<int>& stop_copies(int ride, int pos) const { return stop_copies_[ride][pos]; }
  /// Steering arcs serving a ride segment.
  const std::vector<int>& segment_arcs(int ride, int segment) const { return segment_arcs_[ride][segment]; }
  const std::vector<int>& out_arcs(int node) const { return out_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }

  /// Node at (location, time) or -1.
  int find_node(int location, Minutes time) const;

  /// Arc ids of a cut around the copies of `base`; base "depot" is the
  /// source/sink pair. Throws std::out_of_range for unknown ids.
  std::vector<int> cut(const std::string& base, CutKind kind) const;

  GraphStats stats() const;

  std::size_t location_count() const { return t_map_.size(); }
  std::size_t ride_count() const { return stop_copies_.size(); }
  std::size_t stop_count(int ride) const { return stop_copies_[ride].size(); }
  const std::string& location_name(int location) const { return location_names_[location]; }

  std::string to_json() const;
  std::string to_dot() const;

 private:
  friend TimeGraph assemble_graph(const Instance&, NodeExpansion, std::vector<TimedArc>);
  std::vector<std::string> location_names_;
  std::vector<TimedNode> nodes_;
  std::vector<TimedArc> arcs_;
  std::vector<std::vector<int>> t_map_;
  std::vector<std::vector<std::vector<int>>> stop_copies_;
  std::vector<std::vector<std::vector<int>>> segment_arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

/// Customer copies at {e, e+ell, ..., l}; station copies at predecessor
/// copy + in-drive, kept only when some successor copy is reachable.
NodeExpansion expand_nodes(const Instance& inst);

/// Steering/deadhead pairs, waiting chains and depot arcs over the nodes.
std::vector<TimedArc> build_arcs(const Instance& inst, const NodeExpansion& nodes);

/// Build the graph of an instance. Stations are pre-filtered by zeta and
/// dropped entirely unless the policy is regular_and_intermediate.
TimeGraph build_graph(const Instance& inst);

GraphStats graph_stats(const TimeGraph& g);

}  // namespace drsync
