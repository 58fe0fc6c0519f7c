#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "uiadapt/context.hpp"
#include "uiadapt/mdp.hpp"
#include "uiadapt/reward.hpp"
#include "uiadapt/rng.hpp"
#include "uiadapt/user_sim.hpp"

namespace uiadapt {

/// Bounded random walk on ambient brightness plus random indoor/outdoor flips.
struct DriftConfig {
  double brightness_step = 0.1;
  double location_flip_prob = 0.05;

  void validate() const;
  bool frozen() const { return brightness_step == 0.0 && location_flip_prob == 0.0; }
  bool operator==(const DriftConfig&) const = default;
};

struct EnvConfig {
  std::size_t horizon = 20;
  std::size_t tasks_per_step = 3;
  RewardWeights weights;
  Discretization discretization;
  DriftConfig drift;
  /// nullopt: a uniformly random (layout, theme, font) at every reset.
  std::optional<UiConfig> initial_ui;
  int item_count = 6;  // used when initial_ui is random
  SimUserProfile profile;
  PlatformState platform;
  ActorState actor;
  /// nullopt: uniform in [0, 1] at every reset.
  std::optional<double> initial_brightness;
  /// nullopt: uniform at every reset.
  std::optional<Location> initial_location;
  /// Score c3 with 1 - failure probability instead of sampled successes.
  bool expected_success = false;

  void validate() const;

  /// True when every step is a deterministic function of (UI, action): no
  /// drift, no noise, expected success, memoryless emotion (inertia 0) and a
  /// fixed initial context.
  bool is_deterministic() const;

  /// Deterministic clone pinned to one ambient context.
  EnvConfig frozen(double ambient_brightness, Location location) const;

  /// The default environment frozen at ambient 0.85 outdoors.
  static EnvConfig frozen_default();

  bool operator==(const EnvConfig&) const = default;
};

/// Noise-free, memoryless evaluation of the four criteria for a UI in a fixed
/// context. Durations carry no noise, success is scored by its expectation
/// and valence sits at the steady state of the UI's penalty.
class RewardModel {
 public:
  explicit RewardModel(const EnvConfig& cfg);

  Criteria criteria(const UiConfig& ui, const EnvironmentState& env) const;
  RewardBreakdown reward(const UiConfig& ui, const EnvironmentState& env) const;

  /// Valence a memoryless user settles at after a step on `ui`.
  double steady_valence(const UiConfig& ui, const EnvironmentState& env) const;

  const TimeBounds& bounds() const noexcept { return bounds_; }
  const RewardWeights& weights() const noexcept { return weights_; }

 private:
  SimUserProfile profile_;
  PlatformState platform_;
  RewardWeights weights_;
  std::size_t tasks_per_step_;
  TimeBounds bounds_;
};

struct StepInfo {
  ContextState context;  // context the tasks ran in (before drift)
  ContextState next_context;
  UiConfig previous_ui;
  AdaptationAction action = AdaptationAction::NoAdapt;
  InteractionTelemetry telemetry;
};

struct StepResult {
  StateIndex observation = 0;
  RewardBreakdown reward;
  bool done = false;
  StepInfo info;
};

struct ResetResult {
  StateIndex observation = 0;
  ContextState context;
};

EnvironmentState drift_environment(const EnvironmentState& env, const DriftConfig& drift, Rng& rng);

/// Drifts only the environment subspace; ui, actor and platform are copied.
ContextState drift_context(const ContextState& ctx, const DriftConfig& drift, Rng& rng);

/// Episodic UI adaptation environment. One step applies one adaptation and
/// then runs `tasks_per_step` simulated tasks on the adapted UI.
///
/// reset(seed) derives independent streams "init", "drift", "tasks" and
/// "emotion" from the seed (see derive_seed).
class UiAdaptationEnv {
 public:
  explicit UiAdaptationEnv(EnvConfig cfg);

  ResetResult reset(std::uint64_t seed);

  /// Starts an episode from an explicit context instead of sampling one.
  ResetResult reset_to(std::uint64_t seed, const ContextState& start);

  /// Throws Error(EpisodeFinished) after the final step.
  StepResult step(AdaptationAction action);

  const EnvConfig& config() const noexcept { return cfg_; }
  const RewardModel& model() const noexcept { return model_; }
  const ContextState& context() const noexcept { return ctx_; }
  StateIndex observation() const { return encode_state(ctx_, cfg_.discretization); }
  std::size_t step_count() const noexcept { return step_; }
  bool done() const noexcept { return done_; }
  std::size_t num_states() const { return cfg_.discretization.state_count(); }

 private:
  void seed_streams(std::uint64_t seed);

  EnvConfig cfg_;
  RewardModel model_;
  SimUserProfile user_;
  ContextState ctx_;
  std::size_t step_ = 0;
  bool done_ = true;
  Rng drift_rng_;
  Rng task_rng_;
  Rng emotion_rng_;
};

/// The deterministic environment as an explicit 12-state MDP: state i is
/// all_ui_configs()[i] in the frozen context, action j is action_set()[j].
struct FrozenMdp {
  EnumeratedMdp mdp{kNumUiConfigs, kNumActions};
  std::array<UiConfig, kNumUiConfigs> uis{};
  std::array<ContextState, kNumUiConfigs> contexts{};
  /// Tabular index of each MDP state (the context after a step lands there).
  std::array<StateIndex, kNumUiConfigs> tabular_index{};
};

/// Throws Error(Contract) unless cfg.is_deterministic().
FrozenMdp enumerate_mdp(const EnvConfig& cfg);

}  // namespace uiadapt
