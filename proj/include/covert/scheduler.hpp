#pragma once

// Slot-level simulator of the sensing -> decision loop: each time slot every
// base station senses the q frequency slots, updates its per-slot occupancy
// belief and assigns a frequency to each of its users.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covert/rng.hpp"

namespace covert::scheduler {

enum class PolicyKind { greedy_belief, random_hop };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct GridConfig {
  int q = 64;
  int p = 1000;                       ///< time slots per episode
  int L = 8;
  int m = 1;                          ///< base stations; must equal users_per_bs.size()
  std::vector<int> users_per_bs{4};
  std::vector<int> jammed_slots;      ///< static jammer, frequency indices
  double external_occupancy_prob = 0.0;
  double sense_miss_prob = 0.0;
  double sense_fa_prob = 0.0;
  double persistence = 0.8;           ///< belief model: P(slot keeps its state)
  double initial_belief = 0.5;
  bool distinct_within_block = false; ///< no frequency reuse inside a data block
  bool shared_control_matrix = false; ///< later BSs see earlier BSs' picks
  bool random_hop_uses_beliefs = false;
  bool greedy_random_ties = true;     ///< false: ties go to the lowest index

  int total_users() const;
  /// Throws PreconditionError on L > p, k > q, bad probabilities, etc.
  void validate() const;
};

struct Occupant {
  enum class Kind { free, jammer, external, user };
  Kind kind = Kind::free;
  int user = -1;

  bool operator==(const Occupant&) const = default;
};

std::string to_string(const Occupant& occupant);

/// One row per time slot, q cells per row. A cell holds a single tag:
/// jammer over external over the lowest user id.
using OccupancyRow = std::vector<Occupant>;
using OccupancyGrid = std::vector<OccupancyRow>;

/// Posterior probability, per frequency slot, that a non-legitimate source
/// occupies it.
using BeliefState = std::vector<double>;

/// true = observed occupied.
using Observation = std::vector<bool>;

/// Frequency per served user; nullopt = not transmitting this slot.
using Allocation = std::vector<std::optional<int>>;

struct EpisodeStats {
  std::uint64_t collisions = 0;       ///< cells with >= 2 legitimate users
  std::uint64_t jammer_hits = 0;      ///< transmissions on jammed or external cells
  std::uint64_t hop_violations = 0;   ///< same frequency in consecutive slots
  std::uint64_t blocks_delivered = 0; ///< runs of L clean transmissions
  std::uint64_t transmissions = 0;
  std::uint64_t overloads = 0;        ///< user-slots left unassigned
  double pattern_entropy = 0.0;       ///< bits, averaged over users that transmitted

  double jammer_hit_rate() const;     ///< jammer_hits / transmissions
  bool operator==(const EpisodeStats&) const = default;
};

/// Thrown by decide() when candidates run out; `partial` holds the users that
/// did get a slot.
class OverloadError : public std::runtime_error {
 public:
  OverloadError(const std::string& what, Allocation partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Allocation& partial() const { return partial_; }

 private:
  Allocation partial_;
};

/// Inputs to one BS decision.
struct DecisionContext {
  const BeliefState& beliefs;
  const Allocation& previous;               ///< last slot's frequency per user
  const std::vector<std::vector<int>>& block_history;  ///< frequencies in the current block
  const std::vector<bool>& blocked;         ///< slots taken by other BSs (shared mode)
  const GridConfig& cfg;
};

/// Pluggable decision rule, e.g. a learned agent.
using DecisionFn = std::function<Allocation(const DecisionContext&, CounterRng&)>;

struct Policy {
  PolicyKind kind = PolicyKind::greedy_belief;
  DecisionFn custom;  ///< used instead of `kind` when set

  Policy() = default;
  Policy(PolicyKind k) : kind(k) {}  // NOLINT(google-explicit-constructor)
  Policy(DecisionFn fn) : custom(std::move(fn)) {}  // NOLINT(google-explicit-constructor)
};

/// Occupied cells seen as occupied with prob 1 - sense_miss_prob, free cells
/// with prob sense_fa_prob; user tags count as free (they are legitimate).
Observation sense(const OccupancyRow& truth, const GridConfig& cfg, CounterRng& rng);

/// Two-state Markov predict step with `persistence`, then Bayes correction
/// with the sensing likelihoods.
BeliefState update_beliefs(const BeliefState& beliefs, const Observation& obs,
                           const GridConfig& cfg);

/// Assigns distinct frequencies to the users of one BS, never repeating a
/// user's previous frequency. Throws OverloadError if some user has no slot.
Allocation decide(const DecisionContext& ctx, PolicyKind policy, CounterRng& rng);

/// Runs cfg.p time slots. Overloads are counted, not thrown. When `trace` is
/// non-null it receives the full occupancy grid.
EpisodeStats run_episode(const GridConfig& cfg, const Policy& policy, const RngSpec& rng,
                         OccupancyGrid* trace = nullptr);

/// time_slot,freq_slot,occupant_tag with one row per cell.
void write_trace_csv(std::ostream& out, const OccupancyGrid& grid);

/// key=value per line, fixed field order.
void write_stats(std::ostream& out, const EpisodeStats& stats);

}  // namespace covert::scheduler
