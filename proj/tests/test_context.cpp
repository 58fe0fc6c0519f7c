#include <algorithm>
#include <set>

#include "doctest.h"
#include "uiadapt/context.hpp"
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

TEST_CASE("action set has eight distinct actions with NoAdapt last") {
  const auto& acts = action_set();
  CHECK(acts.size() == 8);
  CHECK(acts.back() == AdaptationAction::NoAdapt);
  std::set<AdaptationAction> unique(acts.begin(), acts.end());
  CHECK(unique.size() == 8);
  for (std::size_t i = 0; i < acts.size(); ++i) CHECK(action_index(acts[i]) == i);
  CHECK(kind_of([] { action_at(8); }) == ErrorKind::Range);
}

TEST_CASE("setters are absolute") {
  const UiConfig glf{Layout::Grid, Theme::Light, FontSize::Default, 6};
  const UiConfig ldb{Layout::List, Theme::Dark, FontSize::Big, 6};
  const UiConfig gls{Layout::Grid, Theme::Light, FontSize::Small, 6};

  CHECK(apply_action(glf, AdaptationAction::SetLayoutList) ==
        UiConfig{Layout::List, Theme::Light, FontSize::Default, 6});
  CHECK(apply_action(ldb, AdaptationAction::NoAdapt) == ldb);
  CHECK(apply_action(gls, AdaptationAction::SetFontSmall) == gls);

  // Every setter is idempotent and touches one dimension.
  for (const UiConfig& ui : all_ui_configs(9)) {
    for (AdaptationAction a : action_set()) {
      const UiConfig once = apply_action(ui, a);
      CHECK(apply_action(once, a) == once);
      int changed = (once.layout != ui.layout) + (once.theme != ui.theme) +
                    (once.font_size != ui.font_size);
      CHECK(changed <= 1);
      CHECK(once.item_count == 9);
    }
  }
}

TEST_CASE("enum names round trip and reject unknown names") {
  for (AdaptationAction a : action_set()) CHECK(parse_enum<AdaptationAction>(to_string(a)) == a);
  CHECK(parse_enum<Location>("Outdoor") == Location::Outdoor);
  CHECK(kind_of([] { parse_enum<Theme>("Sepia"); }) == ErrorKind::Validation);
}

TEST_CASE("ui configs enumerate in mixed-radix order") {
  const auto uis = all_ui_configs(6);
  for (std::size_t i = 0; i < uis.size(); ++i) {
    const std::size_t expect = static_cast<std::size_t>(uis[i].layout) * 6 +
                               static_cast<std::size_t>(uis[i].theme) * 3 +
                               static_cast<std::size_t>(uis[i].font_size);
    CHECK(expect == i);
    CHECK(ui_config_index(uis[i]) == i);
  }
}

TEST_CASE("bin_of puts a boundary in the bin above it") {
  const std::vector<double> b{0.5, 0.7};
  CHECK(bin_of(0.0, b) == 0);
  CHECK(bin_of(0.4999, b) == 0);
  CHECK(bin_of(0.5, b) == 1);
  CHECK(bin_of(0.7, b) == 2);
  CHECK(bin_of(1.0, b) == 2);
}

TEST_CASE("default discretization") {
  const Discretization d;
  CHECK(d.state_count() == 108);

  // Exhaustive enumeration of distinct indices over representative contexts.
  std::set<StateIndex> seen;
  for (const UiConfig& ui : all_ui_configs(6)) {
    for (double v : {-0.9, 0.0, 0.9}) {
      for (double b : {0.1, 0.6, 0.9}) {
        ContextState ctx;
        ctx.ui = ui;
        ctx.actor.emotion_valence = v;
        ctx.environment.ambient_brightness = b;
        seen.insert(encode_state(ctx, d));
      }
    }
  }
  CHECK(seen.size() == 108);
  CHECK(*seen.rbegin() == 107);

  SUBCASE("all first buckets encode to zero") {
    ContextState ctx;
    ctx.ui = {Layout::Grid, Theme::Light, FontSize::Small, 6};
    ctx.actor.emotion_valence = -1.0;
    ctx.environment.ambient_brightness = 0.0;
    CHECK(encode_state(ctx, d) == 0);
    const DiscreteState zero = decode_tabular(0, d);
    CHECK(zero.buckets == std::vector<std::size_t>(5, 0));
  }

  SUBCASE("non-tabular dimensions do not change the index") {
    ContextState a;
    ContextState b = a;
    b.actor.age_bucket = AgeBucket::Senior;
    b.platform.screen_class = ScreenClass::Phone;
    b.environment.location = Location::Outdoor;
    CHECK(encode_state(a, d) == encode_state(b, d));
  }

  SUBCASE("decode and encode round trip over every index") {
    const std::vector<std::size_t> radix{2, 2, 3, 3, 3};
    for (StateIndex s = 0; s < d.state_count(); ++s) {
      const DiscreteState ds = decode_tabular(s, d);
      CHECK(encode_buckets(ds, d) == s);
      // Independent mixed-radix recomputation.
      std::size_t idx = 0;
      for (std::size_t k = 0; k < radix.size(); ++k) idx = idx * radix[k] + ds.buckets[k];
      CHECK(idx == s);
      CHECK(encode_state(representative_context(ds, d), d) == s);
    }
  }

  CHECK(kind_of([&] { decode_tabular(108, d); }) == ErrorKind::Range);
}

TEST_CASE("custom tabular dimensions multiply cardinalities") {
  Discretization d;
  d.tabular_dims = {TabularDim::Layout, TabularDim::Location, TabularDim::AgeBucket};
  CHECK(d.state_count() == 2 * 2 * 3);
  d.brightness_boundaries = {0.7, 0.5};
  CHECK(kind_of([&] { d.validate(); }) == ErrorKind::Config);
}

TEST_CASE("context validation") {
  ContextState ctx;
  CHECK_NOTHROW(validate(ctx));
  ctx.environment.ambient_brightness = 1.5;
  CHECK(kind_of([&] { validate(ctx); }) == ErrorKind::Domain);
  ctx.environment.ambient_brightness = 0.5;
  ctx.actor.emotion_valence = -2.0;
  CHECK(kind_of([&] { validate(ctx); }) == ErrorKind::Domain);
}

TEST_CASE("key/value text round trip") {
  ContextState ctx;
  ctx.ui = {Layout::List, Theme::Dark, FontSize::Big, 9};
  ctx.actor = {AgeBucket::Senior, -0.25, Experience::Novice};
  ctx.platform = {ScreenClass::Phone, 0.3, "android"};
  ctx.environment = {Location::Outdoor, 0.875};
  CHECK(context_from_kv(to_kv(ctx)) == ctx);
  CHECK(ui_from_kv(to_kv(ctx.ui)) == ctx.ui);
}
