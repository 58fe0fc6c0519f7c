#include "uiadapt/env.hpp"

#include <algorithm>
#include <cmath>

#include "uiadapt/error.hpp"

namespace uiadapt {

void DriftConfig::validate() const {
  if (!(brightness_step >= 0.0)) fail(ErrorKind::Config, "brightness_step must be >= 0");
  if (!(location_flip_prob >= 0.0 && location_flip_prob <= 1.0)) {
    fail(ErrorKind::Config, "location_flip_prob must lie in [0, 1]");
  }
}

void EnvConfig::validate() const {
  if (horizon < 1) fail(ErrorKind::Config, "horizon must be >= 1");
  if (tasks_per_step < 1) fail(ErrorKind::Config, "tasks_per_step must be >= 1");
  discretization.validate();
  drift.validate();
  if (initial_ui) uiadapt::validate(*initial_ui);
  if (item_count < 1) fail(ErrorKind::Config, "item_count must be >= 1");
  profile.validate();
  uiadapt::validate(platform);
  uiadapt::validate(actor);
  if (initial_brightness && !(*initial_brightness >= 0.0 && *initial_brightness <= 1.0)) {
    fail(ErrorKind::Config, "initial_brightness must lie in [0, 1]");
  }
}

bool EnvConfig::is_deterministic() const {
  return drift.frozen() && profile.noise.duration_sigma == 0.0 &&
         profile.noise.emotion_sigma == 0.0 && expected_success &&
         profile.emotion_inertia == 0.0 && initial_brightness.has_value() &&
         initial_location.has_value();
}

EnvConfig EnvConfig::frozen(double ambient_brightness, Location location) const {
  EnvConfig out = *this;
  out.drift = DriftConfig{0.0, 0.0};
  out.profile.noise = SimNoise{0.0, 0.0};
  out.profile.emotion_inertia = 0.0;
  out.expected_success = true;
  out.initial_brightness = ambient_brightness;
  out.initial_location = location;
  return out;
}

EnvConfig EnvConfig::frozen_default() { return EnvConfig{}.frozen(0.85, Location::Outdoor); }

// ---------------------------------------------------------------------------

RewardModel::RewardModel(const EnvConfig& cfg)
    : profile_(cfg.profile),
      platform_(cfg.platform),
      weights_(cfg.weights),
      tasks_per_step_(cfg.tasks_per_step) {
  const int items = cfg.initial_ui ? cfg.initial_ui->item_count : cfg.item_count;
  bounds_ = time_bounds(profile_.coeffs, platform_, items);
}

double RewardModel::steady_valence(const UiConfig& ui, const EnvironmentState& env) const {
  const PenaltyBreakdown p = task_penalties(profile_, ui, platform_, env);
  const std::vector<TaskOutcome> outcomes(tasks_per_step_,
                                          TaskOutcome{1.0, true, p.total() - 1.0});
  return std::clamp(emotion_target(mean_penalty(outcomes)), -1.0, 1.0);
}

Criteria RewardModel::criteria(const UiConfig& ui, const EnvironmentState& env) const {
  // Mirrors the arithmetic of UiAdaptationEnv::step with noise switched off
  // so that both paths agree bit for bit.
  const double d = noise_free_duration(profile_, ui, platform_, env);
  InteractionTelemetry t;
  t.task_times.assign(tasks_per_step_, d);
  t.successes.assign(tasks_per_step_, true);
  const UsabilityScores u = usability_scores(t, bounds_.t_min, bounds_.t_max);

  Criteria c{};
  c[0] = preference_similarity(ui, profile_.preference, env);
  c[1] = u.time_score;
  c[2] = 1.0 - failure_probability(profile_, ui, platform_, env);
  c[3] = emotion_score(steady_valence(ui, env));
  return c;
}

RewardBreakdown RewardModel::reward(const UiConfig& ui, const EnvironmentState& env) const {
  return compute_reward(criteria(ui, env), weights_);
}

// ---------------------------------------------------------------------------

EnvironmentState drift_environment(const EnvironmentState& env, const DriftConfig& drift,
                                   Rng& rng) {
  const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  const double magnitude = uniform01(rng) * drift.brightness_step;
  const bool flip = uniform01(rng) < drift.location_flip_prob;

  EnvironmentState out = env;
  out.ambient_brightness = std::clamp(env.ambient_brightness + sign * magnitude, 0.0, 1.0);
  if (flip) {
    out.location = env.location == Location::Indoor ? Location::Outdoor : Location::Indoor;
  }
  return out;
}

ContextState drift_context(const ContextState& ctx, const DriftConfig& drift, Rng& rng) {
  ContextState out = ctx;
  out.environment = drift_environment(ctx.environment, drift, rng);
  return out;
}

// ---------------------------------------------------------------------------

UiAdaptationEnv::UiAdaptationEnv(EnvConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))), model_(cfg_), user_(cfg_.profile) {}

void UiAdaptationEnv::seed_streams(std::uint64_t seed) {
  drift_rng_ = make_stream(seed, "drift");
  task_rng_ = make_stream(seed, "tasks");
  emotion_rng_ = make_stream(seed, "emotion");
}

ResetResult UiAdaptationEnv::reset(std::uint64_t seed) {
  Rng init = make_stream(seed, "init");
  ContextState start;
  if (cfg_.initial_ui) {
    start.ui = *cfg_.initial_ui;
  } else {
    start.ui = all_ui_configs(cfg_.item_count)[uniform_index(init, kNumUiConfigs)];
  }
  start.actor = cfg_.actor;
  start.platform = cfg_.platform;
  start.environment.ambient_brightness =
      cfg_.initial_brightness ? *cfg_.initial_brightness : uniform01(init);
  start.environment.location =
      cfg_.initial_location ? *cfg_.initial_location
                            : static_cast<Location>(uniform_index(init, 2));
  return reset_to(seed, start);
}

ResetResult UiAdaptationEnv::reset_to(std::uint64_t seed, const ContextState& start) {
  validate(start.ui);
  validate(start.environment);
  seed_streams(seed);
  user_ = cfg_.profile;
  user_.valence = 0.0;
  ctx_ = start;
  ctx_.actor.emotion_valence = user_.valence;
  step_ = 0;
  done_ = false;
  return ResetResult{observation(), ctx_};
}

StepResult UiAdaptationEnv::step(AdaptationAction action) {
  if (done_) fail(ErrorKind::EpisodeFinished, "step() called on a finished episode");

  StepResult out;
  out.info.previous_ui = ctx_.ui;
  out.info.action = action;

  ctx_.ui = apply_action(ctx_.ui, action);
  out.info.telemetry = simulate_step(user_, ctx_.ui, ctx_.platform, ctx_.environment,
                                     cfg_.tasks_per_step, task_rng_, emotion_rng_);
  ctx_.actor.emotion_valence = user_.valence;

  const TimeBounds& tb = model_.bounds();
  const UsabilityScores u = usability_scores(out.info.telemetry, tb.t_min, tb.t_max);
  Criteria c{};
  c[0] = preference_similarity(ctx_.ui, user_.preference, ctx_.environment);
  c[1] = u.time_score;
  c[2] = cfg_.expected_success
             ? 1.0 - failure_probability(user_, ctx_.ui, ctx_.platform, ctx_.environment)
             : u.success_rate;
  c[3] = emotion_score(out.info.telemetry.reported_valence);
  out.reward = compute_reward(c, cfg_.weights);
  out.info.context = ctx_;

  ctx_ = drift_context(ctx_, cfg_.drift, drift_rng_);
  out.info.next_context = ctx_;

  ++step_;
  done_ = step_ >= cfg_.horizon;
  out.done = done_;
  out.observation = observation();
  return out;
}

// ---------------------------------------------------------------------------

FrozenMdp enumerate_mdp(const EnvConfig& cfg) {
  cfg.validate();
  if (!cfg.is_deterministic()) {
    fail(ErrorKind::Contract,
         "enumerate_mdp needs a deterministic config (no drift, no noise, expected success, "
         "emotion_inertia 0, fixed initial context)");
  }
  const RewardModel model(cfg);
  const int items = cfg.initial_ui ? cfg.initial_ui->item_count : cfg.item_count;
  EnvironmentState env;
  env.ambient_brightness = *cfg.initial_brightness;
  env.location = *cfg.initial_location;

  FrozenMdp out;
  out.uis = all_ui_configs(items);
  for (std::size_t i = 0; i < kNumUiConfigs; ++i) {
    ContextState& ctx = out.contexts[i];
    ctx.ui = out.uis[i];
    ctx.actor = cfg.actor;
    ctx.actor.emotion_valence = model.steady_valence(ctx.ui, env);
    ctx.platform = cfg.platform;
    ctx.environment = env;
    out.tabular_index[i] = encode_state(ctx, cfg.discretization);
  }
  for (std::size_t i = 0; i < kNumUiConfigs; ++i) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      const UiConfig next = apply_action(out.uis[i], action_at(a));
      out.mdp.probability(i, a, ui_config_index(next)) = 1.0;
      out.mdp.reward(i, a) = model.reward(next, env).total;
    }
  }
  out.mdp.validate();
  return out;
}

}  // namespace uiadapt
