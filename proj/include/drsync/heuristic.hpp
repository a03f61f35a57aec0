#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "drsync/plan.hpp"

namespace drsync {

using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) with 53 random bits.
double unit_draw(Rng& rng);

/// Independent stream for (seed, iteration, operator).
Rng substream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t op);

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Station-free plan at the earliest departures; a segment falls back to its
/// shortest-detour station only when no direct leg exists.
Plan initial_plan(const Instance& inst, const TimeGraph& g);

/// Greedy construction. Throws ConstructionError when a segment cannot be
/// driven at all.
Schedule construct_schedule(const Instance& inst, const TimeGraph& g);
Solution construct(const Instance& inst, const TimeGraph& g);

/// Driver routes for a changed plan: greedy assignment, then elimination.
std::optional<Schedule> recompute(const Instance& inst, const TimeGraph& g, const Plan& plan);

enum class SearchMode { composite, vnd };

std::string to_string(SearchMode m);
SearchMode parse_search_mode(const std::string& s);

struct SearchConfig {
  double mu = 0.2;
  int mu_min = 2;
  double p = 3.0;
  double deadline = 10.0;  // seconds
  SearchMode mode = SearchMode::composite;
  std::uint64_t seed = 1;
  int max_iterations = 10000;
};

struct Candidate {
  Schedule schedule;
  int f = 0;
  Minutes theta = 0;
  std::uint64_t hash = 0;
};

Candidate make_candidate(Schedule s, const Instance& inst, const TimeGraph& g);
std::uint64_t schedule_hash(const Schedule& s);

/// Lexicographic order: fewer drivers, then more unused working time.
bool better(const Candidate& a, const Candidate& b);

/// Sort by theta descending (hash breaks ties) and keep
/// max(ceil(mu n), min(mu_min, n)) entries.
std::vector<Candidate> rank_and_truncate(std::vector<Candidate> candidates, double mu, int mu_min);

/// floor(y^p * n), clamped to n - 1.
std::size_t perturbed_select(std::size_t n, double p, double y);
std::size_t perturbed_select(std::size_t n, double p, Rng& rng);

enum class Operator { reassign, postpone, prepone, insert_random, insert_shortest, insert_sync, remove_stop };
constexpr int kOperatorCount = 7;
std::string to_string(Operator op);

std::vector<Schedule> operator_reassign_segments(const Schedule& s, const Instance& inst, const TimeGraph& g);
std::vector<Schedule> operator_shift(const Schedule& s, const Instance& inst, const TimeGraph& g, Minutes delta);
std::vector<Schedule> operator_postpone(const Schedule& s, const Instance& inst, const TimeGraph& g);
std::vector<Schedule> operator_prepone(const Schedule& s, const Instance& inst, const TimeGraph& g);
std::vector<Schedule> operator_insert_stop(const Schedule& s, const Instance& inst, const TimeGraph& g,
                                           Operator which, Rng& rng, double p);
std::vector<Schedule> operator_remove_stop(const Schedule& s, const Instance& inst, const TimeGraph& g);

std::vector<Schedule> apply_operator(Operator op, const Schedule& s, const Instance& inst, const TimeGraph& g,
                                     Rng& rng, double p);

/// Called with every accepted solution (the start included).
using TrajectoryHook = std::function<void(const Candidate&)>;

Schedule local_search(const Schedule& start, const SearchConfig& cfg, const Instance& inst, const TimeGraph& g,
                      const TrajectoryHook& hook = {});
Solution local_search(const Solution& start, const SearchConfig& cfg, const Instance& inst, const TimeGraph& g);

}  // namespace drsync
