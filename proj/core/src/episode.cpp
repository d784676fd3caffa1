#include "explorebench/episode.hpp"

#include <algorithm>
#include <numeric>

namespace explorebench {

int Trajectory::episode_return() const {
  return std::accumulate(events.begin(), events.end(), 0,
                         [](int acc, const Event& e) { return acc + e.reward; });
}

std::pair<EpisodeState, Observation> EpisodeEngine::reset() const {
  EpisodeState state;
  state.world_id = world_->world_id;
  state.current_room = world_->start_room;
  Observation obs = observe(state);
  state.done = finished(state);
  return {std::move(state), std::move(obs)};
}

Observation EpisodeEngine::observe(const EpisodeState& state) const {
  Observation obs{state.current_room, {}};
  for (const auto& ref : world_->view_of(state.current_room, state.entered_via)) {
    if (ref.kind == ObjectKind::ball && state.collected.contains(ref.color)) continue;
    obs.visible.push_back(ref);
  }
  return obs;
}

bool EpisodeEngine::finished(const EpisodeState& state) const {
  if (state.balls_collected >= world_->max_balls_per_episode) return true;
  if (state.doors_used < world_->door_budget) return false;
  const auto& here = world_->objects_in(state.current_room);
  return std::none_of(here.begin(), here.end(), [&](const ObjectRef& ref) {
    return ref.kind == ObjectKind::ball && !state.collected.contains(ref.color);
  });
}

std::vector<ObjectRef> EpisodeEngine::legal_actions(const EpisodeState& state) const {
  if (state.done) throw std::logic_error("legal_actions called on a finished episode");
  const bool budget_spent = state.doors_used >= world_->door_budget;
  std::vector<ObjectRef> legal;
  for (const auto& ref : world_->view_of(state.current_room, state.entered_via)) {
    if (ref.kind == ObjectKind::ball && state.collected.contains(ref.color)) continue;
    if (ref.kind == ObjectKind::door && budget_spent) continue;
    legal.push_back(ref);
  }
  return legal;
}

StepResult EpisodeEngine::step(const EpisodeState& state, const ObjectRef& action) const {
  if (state.done) throw IllegalActionError("episode already finished");
  const auto legal = legal_actions(state);
  if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
    throw IllegalActionError("'" + to_string(action) + "' is not available in room " +
                             to_string(state.current_room));
  }
  StepResult result{state, {}, 0, false};
  EpisodeState& next = result.state;
  if (action.kind == ObjectKind::door) {
    next.current_room = index_.door(action.color)->other_side(state.current_room);
    ++next.doors_used;
    next.entered_via = action.color;
  } else {
    result.reward = index_.ball(action.color)->reward;
    next.collected.insert(action.color);
    ++next.balls_collected;
    next.episode_return += result.reward;
  }
  next.done = finished(next);
  result.done = next.done;
  result.observation = observe(next);
  return result;
}

History append_history(History history, Trajectory trajectory) {
  const auto expected = static_cast<int>(history.size()) + 1;
  if (trajectory.episode_index != expected) {
    throw std::invalid_argument("trajectory index " + std::to_string(trajectory.episode_index) +
                                " does not follow history of length " +
                                std::to_string(history.size()));
  }
  history.trajectories.push_back(std::move(trajectory));
  return history;
}

Trajectory run_episode(const EpisodeEngine& engine, Policy& policy, const History& history,
                       int total_episodes, const StepObserver& observer) {
  Trajectory trajectory;
  trajectory.episode_index = static_cast<int>(history.size()) + 1;
  policy.begin_episode(trajectory.episode_index);

  auto [state, obs] = engine.reset();
  while (!state.done) {
    const auto legal = engine.legal_actions(state);
    trajectory.final_observation = obs;
    const DecisionContext ctx{engine.world(), history, trajectory, state, obs, legal,
                              total_episodes};
    Decision decision = policy.decide(ctx);
    StepResult result = engine.step(state, decision.action);
    trajectory.events.push_back(Event{std::move(obs), decision.action, result.reward});
    if (observer) observer(trajectory.events.back(), result.state, result.observation, decision.diagnostics);
    state = std::move(result.state);
    obs = std::move(result.observation);
  }
  trajectory.final_observation = std::move(obs);
  return trajectory;
}

int reward_of(const WorldIndex& index, const ObjectRef& ref) {
  if (ref.kind == ObjectKind::door) return 0;
  const Ball* b = index.ball(ref.color);
  return b ? b->reward : 0;
}

}  // namespace explorebench
