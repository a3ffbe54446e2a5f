#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "covert/errors.hpp"
#include "covert/scheduler.hpp"

using namespace covert;
using namespace covert::scheduler;

namespace {

OccupancyRow row_with(int q, std::initializer_list<int> jammed) {
  OccupancyRow row(q);
  for (int f : jammed) row[f] = {Occupant::Kind::jammer, -1};
  return row;
}

GridConfig single_bs(int users, std::vector<int> jammed = {}) {
  GridConfig cfg;
  cfg.users_per_bs = {users};
  cfg.jammed_slots = std::move(jammed);
  return cfg;
}

// Batch-means standard error of per-slot collision counts from a trace.
struct SlotSeries {
  double mean;
  double std_error;
};

SlotSeries collisions_per_slot(const GridConfig& cfg, const RngSpec& rng, int batches) {
  const int per_batch = cfg.p / batches;
  std::vector<double> means;
  GridConfig chunk = cfg;
  chunk.p = per_batch;
  for (int b = 0; b < batches; ++b) {
    const auto stats = run_episode(chunk, PolicyKind::random_hop, {rng.seed, rng.stream * 1000 + b});
    means.push_back(static_cast<double>(stats.collisions) / per_batch);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= batches;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= batches - 1;
  return {mean, std::sqrt(var / batches)};
}

}  // namespace

TEST_CASE("perfect sensing observes the truth") {
  GridConfig cfg;
  cfg.q = 8;
  auto truth = row_with(8, {1, 5});
  truth[3] = {Occupant::Kind::external, -1};
  truth[6] = {Occupant::Kind::user, 2};
  CounterRng rng({1, 0});
  const auto obs = sense(truth, cfg, rng);
  for (int f = 0; f < 8; ++f) CHECK(obs[f] == (f == 1 || f == 3 || f == 5));
}

TEST_CASE("false alarms on free slots") {
  GridConfig cfg;
  cfg.q = 16;
  cfg.sense_fa_prob = 1.0;
  CounterRng rng({1, 0});
  for (bool seen : sense(OccupancyRow(16), cfg, rng)) CHECK(seen);

  cfg.sense_fa_prob = 0.1;
  const int rounds = 625;
  int hits = 0;
  for (int r = 0; r < rounds; ++r) {
    CounterRng draw = CounterRng({4, 0}).substream(r);
    for (bool seen : sense(OccupancyRow(16), cfg, draw)) hits += seen;
  }
  const double n = rounds * 16.0;
  const double rate = hits / n;
  CHECK(std::abs(rate - 0.1) <= 3.0 * std::sqrt(0.1 * 0.9 / n));
}

TEST_CASE("perfect sensing collapses beliefs") {
  GridConfig cfg;
  cfg.q = 4;
  const auto post = update_beliefs({0.5, 0.5, 0.3, 0.9}, {true, false, true, false}, cfg);
  CHECK(post == BeliefState{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("uninformative sensing leaves the predicted prior unchanged") {
  GridConfig cfg;
  cfg.q = 3;
  cfg.sense_miss_prob = 0.7;
  cfg.sense_fa_prob = 0.3;
  const BeliefState prior{0.5, 0.1, 0.95};
  for (bool seen : {true, false}) {
    const auto post = update_beliefs(prior, {seen, seen, seen}, cfg);
    for (int f = 0; f < 3; ++f) {
      const double predicted = prior[f] * 0.8 + (1 - prior[f]) * 0.2;
      CHECK(post[f] == doctest::Approx(predicted).epsilon(1e-14));
    }
  }
}

TEST_CASE("repeated occupied observations follow the closed-form Bayes recursion") {
  GridConfig cfg;
  cfg.q = 1;
  cfg.sense_miss_prob = 0.1;
  cfg.sense_fa_prob = 0.1;
  for (double stay : {0.8, 1.0}) {
    cfg.persistence = stay;
    BeliefState b{0.5};
    double expected = 0.5;
    for (int step = 0; step < 60; ++step) {
      const double predicted = expected * stay + (1 - expected) * (1 - stay);
      const double next = predicted * 0.9 / (predicted * 0.9 + (1 - predicted) * 0.1);
      const auto post = update_beliefs(b, {true}, cfg);
      CHECK(post[0] == doctest::Approx(next).epsilon(1e-13));
      CHECK(post[0] >= b[0]);
      b = post;
      expected = next;
    }
    if (stay == 1.0) CHECK(b[0] > 1.0 - 1e-12);
  }
}

TEST_CASE("decide: single user, one believed-free slot") {
  GridConfig cfg = single_bs(1);
  cfg.q = 4;
  const BeliefState beliefs{1.0, 1.0, 0.0, 1.0};
  const Allocation previous{std::nullopt};
  const std::vector<std::vector<int>> history(1);
  const std::vector<bool> blocked(4, false);
  CounterRng rng({1, 0});
  for (auto kind : {PolicyKind::greedy_belief}) {
    const auto alloc = decide({beliefs, previous, history, blocked, cfg}, kind, rng);
    CHECK(alloc[0] == 2);
  }
  cfg.random_hop_uses_beliefs = true;
  const auto alloc = decide({beliefs, previous, history, blocked, cfg}, PolicyKind::random_hop, rng);
  CHECK(alloc[0] == 2);
}

TEST_CASE("decide: distinct slots, previous frequency excluded, lowest belief first") {
  GridConfig cfg = single_bs(3);
  cfg.q = 6;
  const BeliefState beliefs{0.9, 0.1, 0.2, 0.05, 0.7, 0.3};
  const Allocation previous{3, std::nullopt, 1};
  const std::vector<std::vector<int>> history(3);
  const std::vector<bool> blocked(6, false);
  CounterRng rng({1, 0});
  const auto alloc = decide({beliefs, previous, history, blocked, cfg}, PolicyKind::greedy_belief, rng);
  CHECK(alloc == Allocation{1, 3, 2});

  cfg.greedy_random_ties = false;
  const BeliefState flat(6, 0.0);
  const auto lowest = decide({flat, previous, history, blocked, cfg}, PolicyKind::greedy_belief, rng);
  CHECK(lowest == Allocation{0, 1, 2});
}

TEST_CASE("decide: overload reports the partial allocation") {
  GridConfig cfg = single_bs(3);
  cfg.q = 3;
  const BeliefState beliefs(3, 0.0);
  const Allocation previous{0, 1, 2};
  const std::vector<std::vector<int>> history(3);
  const std::vector<bool> blocked{false, false, true};
  CounterRng rng({1, 0});
  try {
    decide({beliefs, previous, history, blocked, cfg}, PolicyKind::random_hop, rng);
    FAIL("expected OverloadError");
  } catch (const OverloadError& e) {
    const auto& partial = e.partial();
    REQUIRE(partial.size() == 3);
    CHECK(partial[0] == 1);
    CHECK(partial[1] == 0);
    CHECK_FALSE(partial[2].has_value());
  }
}

TEST_CASE("grid config validation") {
  const auto rejects = [](auto mutate) {
    GridConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
  };
  rejects([](auto& c) { c.L = 2000; });
  rejects([](auto& c) { c.users_per_bs = {65}; });
  rejects([](auto& c) { c.m = 2; });
  rejects([](auto& c) { c.jammed_slots = {64}; });
  rejects([](auto& c) { c.sense_miss_prob = 1.5; });
  rejects([](auto& c) { c.persistence = -0.1; });
  CHECK_NOTHROW(GridConfig{}.validate());
}

TEST_CASE("perfect sensing, single BS, static jammer: no collisions, hits or hop violations") {
  for (auto kind : {PolicyKind::greedy_belief, PolicyKind::random_hop}) {
    auto cfg = single_bs(8, {0, 1, 2, 3});
    if (kind == PolicyKind::random_hop) cfg.random_hop_uses_beliefs = true;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto stats = run_episode(cfg, kind, {seed, 0});
      CHECK(stats.collisions == 0);
      CHECK(stats.jammer_hits == 0);
      CHECK(stats.hop_violations == 0);
      CHECK(stats.overloads == 0);
      CHECK(stats.transmissions == 8000);
      CHECK(stats.blocks_delivered == 1000);
    }
  }
}

TEST_CASE("hop violations stay zero under both policies with noise and externals") {
  auto cfg = single_bs(6, {5});
  cfg.sense_miss_prob = 0.2;
  cfg.sense_fa_prob = 0.05;
  cfg.external_occupancy_prob = 0.1;
  for (auto kind : {PolicyKind::greedy_belief, PolicyKind::random_hop}) {
    const auto stats = run_episode(cfg, kind, {8, 0});
    CHECK(stats.hop_violations == 0);
    CHECK(stats.collisions == 0);
    CHECK(stats.pattern_entropy >= 0.0);
    CHECK(stats.pattern_entropy <= std::log2(64.0));
  }
}

TEST_CASE("episodes are deterministic") {
  auto cfg = single_bs(8, {0, 1});
  cfg.sense_miss_prob = 0.1;
  cfg.external_occupancy_prob = 0.05;
  for (auto kind : {PolicyKind::greedy_belief, PolicyKind::random_hop}) {
    CHECK(run_episode(cfg, kind, {5, 3}) == run_episode(cfg, kind, {5, 3}));
  }
  CHECK_FALSE(run_episode(cfg, PolicyKind::random_hop, {5, 3}) ==
              run_episode(cfg, PolicyKind::random_hop, {6, 3}));
}

TEST_CASE("noisy sensing: greedy beats blind random hopping on jammer hits") {
  auto cfg = single_bs(8, {10, 20, 30, 40});
  cfg.sense_miss_prob = 0.1;
  const int episodes = 5;
  std::uint64_t greedy_hits = 0;
  std::uint64_t random_hits = 0;
  std::uint64_t random_tx = 0;
  for (int e = 0; e < episodes; ++e) {
    const RngSpec rng{77, static_cast<std::uint64_t>(e)};
    const auto g = run_episode(cfg, PolicyKind::greedy_belief, rng);
    const auto r = run_episode(cfg, PolicyKind::random_hop, rng);
    CHECK(g.jammer_hit_rate() < r.jammer_hit_rate());
    greedy_hits += g.jammer_hits;
    random_hits += r.jammer_hits;
    random_tx += r.transmissions;
  }
  // Blind stationary baseline 4/64 (uniform over the 63 non-previous slots).
  const double rate = static_cast<double>(random_hits) / random_tx;
  CHECK(std::abs(rate - 1.0 / 16) <= 3.0 * std::sqrt((1.0 / 16) * (15.0 / 16) / random_tx));
  CHECK(greedy_hits < random_hits);
}

TEST_CASE("random hop pattern entropy approaches log2(q - 1)") {
  auto cfg = single_bs(4);
  cfg.p = 10'000;
  const auto stats = run_episode(cfg, PolicyKind::random_hop, {21, 0});
  CHECK(std::abs(stats.pattern_entropy - std::log2(63.0)) < 0.1);
}

TEST_CASE("two independent BSs collide at the combinatorial rate") {
  GridConfig cfg;
  cfg.q = 8;
  cfg.L = 2;
  cfg.m = 2;
  cfg.users_per_bs = {2, 2};
  cfg.p = 20'000;
  // Each BS's slot pair is stationary-uniform: E|A ∩ B| = 2 * 2 / 8.
  const auto series = collisions_per_slot(cfg, {31, 1}, 20);
  CHECK(std::abs(series.mean - 0.5) <= 3.0 * series.std_error);
}

TEST_CASE("shared control matrix removes inter-BS collisions") {
  GridConfig cfg;
  cfg.q = 8;
  cfg.m = 2;
  cfg.users_per_bs = {2, 2};
  cfg.shared_control_matrix = true;
  for (auto kind : {PolicyKind::greedy_belief, PolicyKind::random_hop}) {
    const auto stats = run_episode(cfg, kind, {4, 0});
    CHECK(stats.collisions == 0);
    CHECK(stats.hop_violations == 0);
  }
}

TEST_CASE("distinct-within-block never reuses a frequency inside a block") {
  auto cfg = single_bs(2);
  cfg.q = 12;
  cfg.L = 4;
  cfg.p = 400;
  cfg.distinct_within_block = true;
  OccupancyGrid trace;
  const auto stats = run_episode(cfg, PolicyKind::random_hop, {2, 0}, &trace);
  CHECK(stats.blocks_delivered == 200);
  for (int user = 0; user < 2; ++user) {
    for (int block = 0; block < 100; ++block) {
      std::set<int> used;
      for (int t = block * 4; t < block * 4 + 4; ++t) {
        for (int f = 0; f < 12; ++f) {
          if (trace[t][f] == Occupant{Occupant::Kind::user, user}) used.insert(f);
        }
      }
      CHECK(used.size() == 4);
    }
  }
}

TEST_CASE("overloads are counted, not thrown") {
  auto cfg = single_bs(2);
  cfg.q = 2;
  cfg.L = 1;
  cfg.p = 200;
  const auto stats = run_episode(cfg, PolicyKind::random_hop, {3, 0});
  CHECK(stats.overloads + stats.transmissions == 400);
  CHECK(stats.hop_violations == 0);
}

TEST_CASE("custom decision rules plug in") {
  auto cfg = single_bs(1);
  cfg.q = 4;
  cfg.p = 10;
  const Policy fixed([](const DecisionContext& ctx, CounterRng&) {
    return Allocation(ctx.previous.size(), 2);
  });
  const auto stats = run_episode(cfg, fixed, {1, 0});
  CHECK(stats.transmissions == 10);
  CHECK(stats.hop_violations == 9);
  CHECK(stats.pattern_entropy == 0.0);

  const Policy broken([](const DecisionContext&, CounterRng&) { return Allocation{}; });
  CHECK_THROWS_AS(run_episode(cfg, broken, {1, 0}), PreconditionError);
}

TEST_CASE("trace tags and CSV export") {
  GridConfig cfg;
  cfg.q = 4;
  cfg.L = 1;
  cfg.p = 3;
  cfg.m = 2;
  cfg.users_per_bs = {1, 1};
  cfg.jammed_slots = {0};
  cfg.greedy_random_ties = false;
  OccupancyGrid trace;
  run_episode(cfg, Policy([](const DecisionContext&, CounterRng&) { return Allocation{0}; }), {1, 0},
              &trace);
  REQUIRE(trace.size() == 3);
  CHECK(trace[0][0].kind == Occupant::Kind::jammer);

  run_episode(cfg, PolicyKind::greedy_belief, {1, 0}, &trace);
  // Both BSs pick the lowest-index unjammed slot: cell holds the lower id.
  CHECK(trace[0][1] == Occupant{Occupant::Kind::user, 0});

  std::ostringstream csv;
  write_trace_csv(csv, trace);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "time_slot,freq_slot,occupant_tag");
  std::getline(lines, line);
  CHECK(line == "0,0,jammer");
  std::getline(lines, line);
  CHECK(line == "0,1,user:0");
  int rows = 2;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("stats key-value record") {
  EpisodeStats stats;
  stats.collisions = 3;
  stats.pattern_entropy = 1.0 / 3.0;
  std::ostringstream out;
  write_stats(out, stats);
  CHECK(out.str() ==
        "collisions=3\njammer_hits=0\nhop_violations=0\nblocks_delivered=0\ntransmissions=0\n"
        "overloads=0\npattern_entropy=0.3333333333\n");
}

TEST_CASE("policy names") {
  CHECK(policy_kind_from_string("greedy_belief") == PolicyKind::greedy_belief);
  CHECK(policy_kind_from_string(to_string(PolicyKind::random_hop)) == PolicyKind::random_hop);
  CHECK_THROWS_AS(policy_kind_from_string("ddqn"), DomainError);
}
