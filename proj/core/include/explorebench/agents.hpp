#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/oracle.hpp"
#include "explorebench/rng.hpp"

namespace explorebench {

/// Uniform choice over `legal`. Throws std::invalid_argument when empty.
const ObjectRef& random_walk_choice(std::span<const ObjectRef> legal, Rng& rng);

/// Knowledge available at a decision point: all past episodes plus the
/// running episode up to and including the current observation.
KnowledgeGraph current_knowledge(const DecisionContext& ctx, const WorldIndex& index);

/// Base for scripted policies: seeds a fresh generator per episode from
/// (run seed, episode index), so runs resume deterministically.
class SeededPolicy : public Policy {
 public:
  explicit SeededPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  void begin_episode(int episode_index) override;

 protected:
  Rng& rng() { return rng_; }
  const WorldIndex& index_for(const WorldSpec& world);

 private:
  std::uint64_t seed_;
  Rng rng_;
  const WorldSpec* indexed_world_ = nullptr;
  std::unique_ptr<WorldIndex> index_;
};

class RandomWalkPolicy final : public SeededPolicy {
 public:
  using SeededPolicy::SeededPolicy;

  std::string name() const override { return "random_walk"; }
  std::string kind() const override { return "random_walk"; }
  Decision decide(const DecisionContext& ctx) override;
};

/// Cross-episode frontier search. Heads for the nearest room that still has
/// a seen but untraversed door, moving over traversed doors only, provided
/// the door can be reached within the remaining budget. Picks up co-located
/// balls while that cannot end the episode (fewer than two collected).
/// Without a reachable frontier it acts uniformly at random.
class SystematicExplorerPolicy final : public SeededPolicy {
 public:
  using SeededPolicy::SeededPolicy;

  std::string name() const override { return "systematic_explorer"; }
  std::string kind() const override { return "systematic_explorer"; }
  Decision decide(const DecisionContext& ctx) override;
};

/// Scripted exploiter. At the first decision of each episode it solves the
/// orienteering problem on its knowledge (past episodes plus the start
/// observation) and walks the optimal route. Once the route is done, or when
/// no known ball is reachable, it only walks through doors. It prefers known
/// doors from which the remaining budget can run out in a room without an
/// uncollected ball, since such a room would force an unplanned pickup, and
/// otherwise tries untraversed doors at random.
class GreedyExploiterPolicy final : public SeededPolicy {
 public:
  using SeededPolicy::SeededPolicy;

  std::string name() const override { return "greedy_exploiter"; }
  std::string kind() const override { return "greedy_exploiter"; }
  void begin_episode(int episode_index) override;
  Decision decide(const DecisionContext& ctx) override;

  /// Value of the plan made for the current episode.
  int planned_value() const { return planned_value_; }

 private:
  ObjectRef after_route_door(const DecisionContext& ctx, const WorldIndex& index);

  bool planned_ = false;
  int planned_value_ = 0;
  std::vector<ObjectRef> route_;
  std::size_t cursor_ = 0;
};

/// Constructs a scripted policy by kind name ("random_walk",
/// "systematic_explorer", "greedy_exploiter").
std::unique_ptr<Policy> make_scripted_policy(const std::string& kind, std::uint64_t seed);

}  // namespace explorebench
