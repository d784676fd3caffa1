#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "explorebench/explorebench.hpp"

namespace explorebench::testing {

/// Hand-built 5x5 world matching the rooms of the sample transcript: start
/// r0_1, budget 8, and the transcript's doors and balls in their listed
/// order. Every other lattice door gets a palette name outside the
/// transcript.
WorldSpec transcript_world();

/// Replies an LLM would give to reproduce the sample transcript: episode 1
/// in full, then the first three actions of episode 2.
std::vector<std::string> transcript_episode1_replies();
std::vector<std::string> transcript_episode2_replies();

/// Plays a fixed action list, one action per decision. Running past its end
/// throws std::out_of_range.
class SequencePolicy final : public Policy {
 public:
  explicit SequencePolicy(std::vector<ObjectRef> actions) : actions_(std::move(actions)) {}

  std::string name() const override { return "sequence"; }
  std::string kind() const override { return "sequence"; }
  Decision decide(const DecisionContext&) override { return Decision{actions_.at(next_++), {}}; }

 private:
  std::vector<ObjectRef> actions_;
  std::size_t next_ = 0;
};

ObjectRef door(const std::string& color);
ObjectRef ball(const std::string& color);

/// Runs `episodes` episodes of `policy` and returns the history.
History run_episodes(const WorldSpec& world, Policy& policy, int episodes);

/// Directory under the build tree for files written by a test; emptied.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace explorebench::testing
