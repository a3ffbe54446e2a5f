#include "covert/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "covert/errors.hpp"
#include "covert/format.hpp"

namespace covert::scheduler {

namespace {

constexpr std::uint64_t kTagExternal = 0x45580000;
constexpr std::uint64_t kTagSense = 0x53450000;
constexpr std::uint64_t kTagDecide = 0x44450000;

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

bool is_foreign(const Occupant& cell) {
  return cell.kind == Occupant::Kind::jammer || cell.kind == Occupant::Kind::external;
}

double entropy_bits(const std::vector<std::uint64_t>& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0ULL));
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double share = static_cast<double>(c) / total;
    h -= share * std::log2(share);
  }
  return h;
}

}  // namespace

std::string to_string(PolicyKind kind) {
  return kind == PolicyKind::greedy_belief ? "greedy_belief" : "random_hop";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "greedy_belief" || name == "greedy") return PolicyKind::greedy_belief;
  if (name == "random_hop" || name == "random") return PolicyKind::random_hop;
  throw DomainError("unknown policy '" + name + "'");
}

int GridConfig::total_users() const {
  return std::accumulate(users_per_bs.begin(), users_per_bs.end(), 0);
}

void GridConfig::validate() const {
  if (q < 1) throw PreconditionError("q must be >= 1");
  if (p < 1) throw PreconditionError("p must be >= 1");
  if (L < 1 || L > p) throw PreconditionError("L must satisfy 1 <= L <= p");
  if (m < 1 || static_cast<std::size_t>(m) != users_per_bs.size()) {
    throw PreconditionError("users_per_bs must list one count per base station (m entries)");
  }
  for (int users : users_per_bs) {
    if (users < 0) throw PreconditionError("users_per_bs entries must be >= 0");
  }
  if (total_users() > q) throw PreconditionError("total users k must not exceed q");
  for (int f : jammed_slots) {
    if (f < 0 || f >= q) throw PreconditionError("jammed slot index out of range");
  }
  if (!is_probability(external_occupancy_prob) || !is_probability(sense_miss_prob) ||
      !is_probability(sense_fa_prob) || !is_probability(persistence) ||
      !is_probability(initial_belief)) {
    throw PreconditionError("probabilities must lie in [0, 1]");
  }
}

std::string to_string(const Occupant& occupant) {
  switch (occupant.kind) {
    case Occupant::Kind::free: return "free";
    case Occupant::Kind::jammer: return "jammer";
    case Occupant::Kind::external: return "external";
    case Occupant::Kind::user: return "user:" + std::to_string(occupant.user);
  }
  return "free";
}

double EpisodeStats::jammer_hit_rate() const {
  return transmissions == 0 ? 0.0
                            : static_cast<double>(jammer_hits) / static_cast<double>(transmissions);
}

Observation sense(const OccupancyRow& truth, const GridConfig& cfg, CounterRng& rng) {
  Observation obs(truth.size());
  for (std::size_t f = 0; f < truth.size(); ++f) {
    const double u = rng.uniform();
    obs[f] = is_foreign(truth[f]) ? u < 1.0 - cfg.sense_miss_prob : u < cfg.sense_fa_prob;
  }
  return obs;
}

BeliefState update_beliefs(const BeliefState& beliefs, const Observation& obs,
                           const GridConfig& cfg) {
  if (beliefs.size() != obs.size()) throw DomainError("belief / observation size mismatch");
  const double stay = cfg.persistence;
  BeliefState out(beliefs.size());
  for (std::size_t f = 0; f < beliefs.size(); ++f) {
    const double prior = beliefs[f] * stay + (1.0 - beliefs[f]) * (1.0 - stay);
    const double like_occupied = obs[f] ? 1.0 - cfg.sense_miss_prob : cfg.sense_miss_prob;
    const double like_free = obs[f] ? cfg.sense_fa_prob : 1.0 - cfg.sense_fa_prob;
    const double occupied = prior * like_occupied;
    const double denom = occupied + (1.0 - prior) * like_free;
    out[f] = denom > 0.0 ? occupied / denom : (obs[f] ? 1.0 : 0.0);
  }
  return out;
}

Allocation decide(const DecisionContext& ctx, PolicyKind policy, CounterRng& rng) {
  const auto& cfg = ctx.cfg;
  const int q = static_cast<int>(ctx.beliefs.size());
  std::vector<bool> taken = ctx.blocked;
  taken.resize(q, false);

  Allocation alloc(ctx.previous.size());
  bool short_of_slots = false;
  std::vector<int> candidates;
  candidates.reserve(q);
  for (std::size_t u = 0; u < ctx.previous.size(); ++u) {
    candidates.clear();
    for (int f = 0; f < q; ++f) {
      if (taken[f] || ctx.previous[u] == f) continue;
      if (cfg.distinct_within_block && u < ctx.block_history.size()) {
        const auto& used = ctx.block_history[u];
        if (std::find(used.begin(), used.end(), f) != used.end()) continue;
      }
      if (policy == PolicyKind::random_hop && cfg.random_hop_uses_beliefs &&
          ctx.beliefs[f] >= 0.5) {
        continue;
      }
      candidates.push_back(f);
    }
    if (candidates.empty()) {
      short_of_slots = true;
      continue;
    }

    int choice;
    if (policy == PolicyKind::greedy_belief) {
      double best = ctx.beliefs[candidates.front()];
      for (int f : candidates) best = std::min(best, ctx.beliefs[f]);
      std::erase_if(candidates, [&](int f) { return ctx.beliefs[f] != best; });
      choice = cfg.greedy_random_ties ? candidates[rng.below(candidates.size())]
                                      : candidates.front();
    } else {
      choice = candidates[rng.below(candidates.size())];
    }
    alloc[u] = choice;
    taken[choice] = true;
  }
  if (short_of_slots) throw OverloadError("not enough candidate slots for every user", alloc);
  return alloc;
}

EpisodeStats run_episode(const GridConfig& cfg, const Policy& policy, const RngSpec& rng,
                         OccupancyGrid* trace) {
  cfg.validate();
  const CounterRng base(rng);
  const int q = cfg.q;
  const int bs_count = cfg.m;
  const int users = cfg.total_users();

  std::vector<int> first_user(bs_count + 1, 0);
  for (int b = 0; b < bs_count; ++b) first_user[b + 1] = first_user[b] + cfg.users_per_bs[b];

  std::vector<bool> jammed(q, false);
  for (int f : cfg.jammed_slots) jammed[f] = true;

  std::vector<BeliefState> beliefs(bs_count, BeliefState(q, cfg.initial_belief));
  std::vector<Allocation> previous(bs_count);
  std::vector<std::vector<std::vector<int>>> history(bs_count);
  for (int b = 0; b < bs_count; ++b) {
    previous[b].assign(cfg.users_per_bs[b], std::nullopt);
    history[b].assign(cfg.users_per_bs[b], {});
  }
  std::vector<std::vector<std::uint64_t>> usage(users, std::vector<std::uint64_t>(q, 0));
  const std::vector<bool> nothing_blocked(q, false);

  if (trace) {
    trace->clear();
    trace->reserve(cfg.p);
  }

  EpisodeStats stats;
  OccupancyRow truth(q);
  std::vector<Allocation> current(bs_count);
  std::vector<int> load(q);
  std::vector<int> lowest_user(q);

  for (int t = 0; t < cfg.p; ++t) {
    CounterRng external = base.substream(kTagExternal).substream(t);
    for (int f = 0; f < q; ++f) {
      const bool busy = external.bernoulli(cfg.external_occupancy_prob);
      truth[f] = jammed[f] ? Occupant{Occupant::Kind::jammer, -1}
                 : busy    ? Occupant{Occupant::Kind::external, -1}
                           : Occupant{};
    }

    std::vector<bool> blocked(q, false);
    for (int b = 0; b < bs_count; ++b) {
      CounterRng sensing = base.substream(kTagSense).substream(b).substream(t);
      beliefs[b] = update_beliefs(beliefs[b], sense(truth, cfg, sensing), cfg);

      const DecisionContext ctx{beliefs[b], previous[b], history[b],
                                cfg.shared_control_matrix ? blocked : nothing_blocked, cfg};
      CounterRng deciding = base.substream(kTagDecide).substream(b).substream(t);
      try {
        current[b] = policy.custom ? policy.custom(ctx, deciding) : decide(ctx, policy.kind, deciding);
      } catch (const OverloadError& e) {
        current[b] = e.partial();
      }
      if (current[b].size() != previous[b].size()) {
        throw PreconditionError("decision rule returned the wrong number of users");
      }
      for (const auto& f : current[b]) {
        if (f && (*f < 0 || *f >= q)) throw PreconditionError("decision rule chose an invalid slot");
        if (f) blocked[*f] = true;
      }
    }

    std::fill(load.begin(), load.end(), 0);
    std::fill(lowest_user.begin(), lowest_user.end(), -1);
    for (int b = 0; b < bs_count; ++b) {
      for (std::size_t i = 0; i < current[b].size(); ++i) {
        if (!current[b][i]) continue;
        const int f = *current[b][i];
        const int id = first_user[b] + static_cast<int>(i);
        ++load[f];
        if (lowest_user[f] < 0 || id < lowest_user[f]) lowest_user[f] = id;
      }
    }
    for (int f = 0; f < q; ++f) {
      if (load[f] >= 2) ++stats.collisions;
    }

    for (int b = 0; b < bs_count; ++b) {
      for (std::size_t i = 0; i < current[b].size(); ++i) {
        const auto& choice = current[b][i];
        auto& block = history[b][i];
        if (!choice) {
          ++stats.overloads;
          block.clear();
          previous[b][i].reset();
          continue;
        }
        const int f = *choice;
        const int id = first_user[b] + static_cast<int>(i);
        ++stats.transmissions;
        ++usage[id][f];
        if (previous[b][i] == f) ++stats.hop_violations;
        const bool hit = is_foreign(truth[f]);
        if (hit) ++stats.jammer_hits;
        if (!hit && load[f] == 1) {
          block.push_back(f);
          if (static_cast<int>(block.size()) == cfg.L) {
            ++stats.blocks_delivered;
            block.clear();
          }
        } else {
          block.clear();
        }
        previous[b][i] = f;
      }
    }

    if (trace) {
      OccupancyRow row = truth;
      for (int f = 0; f < q; ++f) {
        if (row[f].kind == Occupant::Kind::free && lowest_user[f] >= 0) {
          row[f] = {Occupant::Kind::user, lowest_user[f]};
        }
      }
      trace->push_back(std::move(row));
    }
  }

  double entropy_sum = 0.0;
  int active = 0;
  for (const auto& counts : usage) {
    if (std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) continue;
    entropy_sum += entropy_bits(counts);
    ++active;
  }
  stats.pattern_entropy = active > 0 ? entropy_sum / active : 0.0;
  return stats;
}

void write_trace_csv(std::ostream& out, const OccupancyGrid& grid) {
  out << "time_slot,freq_slot,occupant_tag\n";
  for (std::size_t t = 0; t < grid.size(); ++t) {
    for (std::size_t f = 0; f < grid[t].size(); ++f) {
      out << t << ',' << f << ',' << to_string(grid[t][f]) << '\n';
    }
  }
}

void write_stats(std::ostream& out, const EpisodeStats& stats) {
  out << "collisions=" << stats.collisions << '\n'
      << "jammer_hits=" << stats.jammer_hits << '\n'
      << "hop_violations=" << stats.hop_violations << '\n'
      << "blocks_delivered=" << stats.blocks_delivered << '\n'
      << "transmissions=" << stats.transmissions << '\n'
      << "overloads=" << stats.overloads << '\n'
      << "pattern_entropy=" << format_double(stats.pattern_entropy) << '\n';
}

}  // namespace covert::scheduler
