#include <cmath>
#include <set>

#include "doctest.h"
#include "uiadapt/env.hpp"
#include "uiadapt/error.hpp"

using namespace uiadapt;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("reset") {
  UiAdaptationEnv env(EnvConfig{});

  SUBCASE("same seed gives the same trajectory") {
    UiAdaptationEnv other(EnvConfig{});
    const ResetResult a = env.reset(5), b = other.reset(5);
    CHECK(a.observation == b.observation);
    CHECK(a.context == b.context);
    for (int i = 0; i < 20; ++i) {
      const StepResult x = env.step(action_at(i % 8)), y = other.step(action_at(i % 8));
      CHECK(x.observation == y.observation);
      CHECK(x.reward.total == y.reward.total);
      CHECK(x.info.telemetry.task_times == y.info.telemetry.task_times);
    }
  }

  SUBCASE("fixed initial UI") {
    EnvConfig cfg;
    cfg.initial_ui = UiConfig{Layout::List, Theme::Dark, FontSize::Small, 6};
    UiAdaptationEnv fixed(cfg);
    const ResetResult r = fixed.reset(3);
    const DiscreteState ds = decode_tabular(r.observation, cfg.discretization);
    CHECK(ds.buckets[0] == 1);
    CHECK(ds.buckets[1] == 1);
    CHECK(ds.buckets[2] == 0);
    CHECK(r.context.ui == *cfg.initial_ui);
  }

  SUBCASE("seeds spread the initial brightness") {
    std::set<double> seen;
    for (std::uint64_t s = 0; s < 100; ++s) seen.insert(env.reset(s).context.environment.ambient_brightness);
    CHECK(seen.size() >= 95);
  }
}

TEST_CASE("step") {
  EnvConfig cfg;
  UiAdaptationEnv env(cfg);
  env.reset(1);

  SUBCASE("NoAdapt keeps the UI") {
    const UiConfig before = env.context().ui;
    const StepResult r = env.step(AdaptationAction::NoAdapt);
    CHECK(r.info.context.ui == before);
    CHECK(r.info.previous_ui == before);
  }

  SUBCASE("horizon 1 finishes after one step") {
    cfg.horizon = 1;
    UiAdaptationEnv one(cfg);
    one.reset(0);
    CHECK(one.step(AdaptationAction::NoAdapt).done);
    CHECK(kind_of([&] { one.step(AdaptationAction::NoAdapt); }) == ErrorKind::EpisodeFinished);
  }

  SUBCASE("telemetry length and reward range") {
    for (int i = 0; i < 20; ++i) {
      const StepResult r = env.step(action_at(static_cast<std::size_t>(i) % 8));
      CHECK(r.info.telemetry.task_times.size() == cfg.tasks_per_step);
      CHECK(r.reward.total >= 0.0);
      CHECK(r.reward.total <= 1.0);
      CHECK(r.done == (i == 19));
    }
  }
}

TEST_CASE("preferred UI beats the anti-preferred UI") {
  EnvConfig cfg;
  cfg.profile.noise = {0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // The preferred UI tracks the drifting ambient, so pick setters each step.
    auto run = [&](bool preferred) {
      UiAdaptationEnv sim(cfg);
      sim.reset(seed);
      double sum = 0.0;
      while (!sim.done()) {
        const UiConfig want =
            preferred_ui(cfg.profile.preference, sim.context().environment, cfg.item_count);
        UiConfig target = want;
        if (!preferred) {
          target.layout = want.layout == Layout::Grid ? Layout::List : Layout::Grid;
          target.theme = want.theme == Theme::Light ? Theme::Dark : Theme::Light;
          target.font_size = want.font_size == FontSize::Small ? FontSize::Big : FontSize::Small;
        }
        const UiConfig& ui = sim.context().ui;
        AdaptationAction a = AdaptationAction::NoAdapt;
        if (ui.layout != target.layout) {
          a = target.layout == Layout::Grid ? AdaptationAction::SetLayoutGrid
                                            : AdaptationAction::SetLayoutList;
        } else if (ui.theme != target.theme) {
          a = target.theme == Theme::Light ? AdaptationAction::SetThemeLight
                                           : AdaptationAction::SetThemeDark;
        } else if (ui.font_size != target.font_size) {
          a = target.font_size == FontSize::Small ? AdaptationAction::SetFontSmall
              : target.font_size == FontSize::Big ? AdaptationAction::SetFontBig
                                                  : AdaptationAction::SetFontDefault;
        }
        sum += sim.step(a).reward.total;
      }
      return sum / static_cast<double>(cfg.horizon);
    };
    CHECK(run(true) >= run(false));
  }
}

TEST_CASE("drift") {
  Rng rng(3);
  const ContextState ctx;
  CHECK(drift_context(ctx, {0.0, 0.0}, rng) == ctx);

  EnvironmentState e{Location::Indoor, 0.5};
  const DriftConfig wide{0.6, 0.5};
  for (int i = 0; i < 100000; ++i) {
    e = drift_environment(e, wide, rng);
    REQUIRE(e.ambient_brightness >= 0.0);
    REQUIRE(e.ambient_brightness <= 1.0);
  }

  EnvironmentState f{Location::Indoor, 0.5};
  for (int i = 0; i < 10; ++i) {
    const EnvironmentState next = drift_environment(f, {0.1, 1.0}, rng);
    CHECK(next.location != f.location);
    f = next;
  }
}

TEST_CASE("frozen environment as an explicit MDP") {
  const EnvConfig cfg = EnvConfig::frozen_default();
  CHECK(cfg.is_deterministic());
  const FrozenMdp fm = enumerate_mdp(cfg);
  CHECK(fm.mdp.num_states() == 12);
  CHECK(fm.mdp.num_actions() == 8);

  for (std::size_t s = 0; s < 12; ++s) {
    for (std::size_t a = 0; a < 8; ++a) {
      int ones = 0;
      for (std::size_t t = 0; t < 12; ++t) {
        const double p = fm.mdp.probability(s, a, t);
        CHECK((p == 0.0 || p == 1.0));
        ones += p == 1.0;
      }
      CHECK(ones == 1);
    }
  }

  SUBCASE("kernel matches step() for every state and action") {
    UiAdaptationEnv env(cfg);
    for (std::size_t s = 0; s < 12; ++s) {
      for (std::size_t a = 0; a < 8; ++a) {
        env.reset_to(0, fm.contexts[s]);
        const StepResult r = env.step(action_at(a));
        const std::size_t next = ui_config_index(r.info.context.ui);
        CHECK(fm.mdp.probability(s, a, next) == 1.0);
        CHECK(r.reward.total == fm.mdp.reward(s, a));
        CHECK(r.observation == fm.tabular_index[next]);
      }
    }
  }

  CHECK(kind_of([] { enumerate_mdp(EnvConfig{}); }) == ErrorKind::Contract);
}

TEST_CASE("reward model agrees with a noise-free step") {
  EnvConfig cfg = EnvConfig{}.frozen(0.3, Location::Indoor);
  const RewardModel model(cfg);
  UiAdaptationEnv env(cfg);
  for (const UiConfig& ui : all_ui_configs(cfg.item_count)) {
    ContextState start;
    start.ui = ui;
    start.environment = {Location::Indoor, 0.3};
    env.reset_to(0, start);
    const StepResult r = env.step(AdaptationAction::NoAdapt);
    CHECK(r.reward.c == model.criteria(ui, start.environment));
  }
}

TEST_CASE("config validation") {
  EnvConfig cfg;
  cfg.horizon = 0;
  CHECK(kind_of([&] { UiAdaptationEnv env(cfg); }) == ErrorKind::Config);
  cfg = {};
  cfg.drift.location_flip_prob = 2.0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
}
