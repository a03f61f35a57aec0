#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "drsync/instance.hpp"
#include "drsync/solution.hpp"
#include "drsync/timegraph.hpp"

namespace drsync {

struct OracleLimits {
  std::size_t max_arcs = 300;
  std::size_t max_rides = 4;
};

struct OracleResult {
  bool feasible = false;
  int optimum = -1;  // -1 when infeasible
  Solution witness;
  std::uint64_t explored = 0;
  double elapsed = 0;
};

/// The instance is beyond the exhaustive limits.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive optimum: every departure grid choice, every station choice,
/// every driver assignment. Witness routes refer to build_graph(inst).
OracleResult brute_force(const Instance& inst, const OracleLimits& limits = {});

std::string oracle_to_json(const OracleResult& r, const Instance& inst, const TimeGraph& g);

}  // namespace drsync
