#include "uiadapt/user_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "uiadapt/error.hpp"

namespace uiadapt {

void HciCoefficients::validate() const {
  if (!(fitts_a >= 0.0 && hick_c >= 0.0)) fail(ErrorKind::Domain, "HCI intercepts must be >= 0");
  if (!(fitts_b > 0.0 && hick_d > 0.0)) fail(ErrorKind::Domain, "HCI slopes must be > 0");
}

void SimUserProfile::validate() const {
  preference.validate();
  coeffs.validate();
  if (static_cast<std::size_t>(acuity) >= enum_cardinality<Acuity>()) {
    fail(ErrorKind::Domain, "invalid acuity");
  }
  if (!(error_base >= 0.0 && error_base <= 1.0)) fail(ErrorKind::Domain, "error_base outside [0, 1]");
  if (!(emotion_inertia >= 0.0 && emotion_inertia <= 1.0)) {
    fail(ErrorKind::Domain, "emotion_inertia outside [0, 1]");
  }
  if (!(valence >= -1.0 && valence <= 1.0)) fail(ErrorKind::Domain, "valence outside [-1, 1]");
  if (!(noise.duration_sigma >= 0.0 && noise.emotion_sigma >= 0.0)) {
    fail(ErrorKind::Domain, "noise scales must be >= 0");
  }
}

double fitts_time(double distance, double width, const HciCoefficients& coeffs) {
  if (!(distance > 0.0) || !(width > 0.0)) {
    fail(ErrorKind::Domain, "Fitts distance and width must be positive");
  }
  return coeffs.fitts_a + coeffs.fitts_b * std::log2(distance / width + 1.0);
}

double hick_time(int n_options, const HciCoefficients& coeffs) {
  if (n_options < 1) fail(ErrorKind::Domain, "Hick-Hyman needs at least one option");
  return coeffs.hick_c + coeffs.hick_d * std::log2(static_cast<double>(n_options) + 1.0);
}

namespace {

struct GeometryRow {
  double grid_width;
  double list_width;
  double base_distance;
  double grid_pitch;
  double list_pitch;
};

constexpr std::array<GeometryRow, 3> kGeometry{{
    {1.50, 0.75, 3.0, 0.6, 1.2},  // Phone
    {2.00, 1.00, 4.0, 0.5, 1.0},  // Tablet
    {2.50, 1.25, 5.0, 0.4, 0.8},  // Desktop
}};

// [acuity][screen]
constexpr std::array<std::array<FontSize, 3>, 3> kMinimumFont{{
    {FontSize::Big, FontSize::Big, FontSize::Default},        // Low
    {FontSize::Default, FontSize::Default, FontSize::Small},  // Normal
    {FontSize::Small, FontSize::Small, FontSize::Small},      // High
}};

}  // namespace

LayoutGeometry layout_geometry(Layout layout, ScreenClass screen, int item_count) {
  const GeometryRow& row = kGeometry[static_cast<std::size_t>(screen)];
  const double n = static_cast<double>(item_count);
  if (layout == Layout::Grid) return {row.base_distance + row.grid_pitch * n, row.grid_width};
  return {row.base_distance + row.list_pitch * n, row.list_width};
}

FontSize minimum_legible_font(Acuity acuity, ScreenClass screen) {
  return kMinimumFont[static_cast<std::size_t>(acuity)][static_cast<std::size_t>(screen)];
}

double legibility_multiplier(FontSize font, Acuity acuity, ScreenClass screen) {
  const int need = static_cast<int>(minimum_legible_font(acuity, screen));
  const int have = static_cast<int>(font);
  return 1.0 + kLegibilityStep * static_cast<double>(std::max(0, need - have));
}

double glare_multiplier(Theme theme, double ambient_brightness) {
  const bool glare = (theme == Theme::Dark && ambient_brightness >= kGlareDarkThreshold) ||
                     (theme == Theme::Light && ambient_brightness <= kGlareLightThreshold);
  return glare ? kGlareMultiplier : 1.0;
}

double preference_multiplier(const UiConfig& ui, const PreferenceProfile& p,
                             const EnvironmentState& env) {
  double m = 1.0;
  if (ui.layout != p.preferred_layout) m *= kPreferenceMismatchMultiplier;
  if (ui.theme != resolve_theme(p, env)) m *= kPreferenceMismatchMultiplier;
  if (ui.font_size != p.preferred_font) m *= kPreferenceMismatchMultiplier;
  return m;
}

PenaltyBreakdown task_penalties(const SimUserProfile& u, const UiConfig& ui,
                                const PlatformState& plat, const EnvironmentState& env) {
  PenaltyBreakdown p;
  p.legibility = legibility_multiplier(ui.font_size, u.acuity, plat.screen_class);
  p.glare = glare_multiplier(ui.theme, env.ambient_brightness);
  p.preference = preference_multiplier(ui, u.preference, env);
  return p;
}

double base_task_time(const UiConfig& ui, const HciCoefficients& coeffs,
                      const PlatformState& plat) {
  const LayoutGeometry g = layout_geometry(ui.layout, plat.screen_class, ui.item_count);
  return hick_time(ui.item_count, coeffs) + fitts_time(g.distance, g.width, coeffs);
}

double noise_free_duration(const SimUserProfile& u, const UiConfig& ui,
                           const PlatformState& plat, const EnvironmentState& env) {
  return base_task_time(ui, u.coeffs, plat) * task_penalties(u, ui, plat, env).total();
}

double failure_probability(const SimUserProfile& u, const UiConfig& ui,
                           const PlatformState& plat, const EnvironmentState& env) {
  const PenaltyBreakdown p = task_penalties(u, ui, plat, env);
  return std::min(1.0, u.error_base * p.legibility * p.glare);
}

TimeBounds time_bounds(const HciCoefficients& coeffs, const PlatformState& plat, int item_count) {
  UiConfig grid{Layout::Grid, Theme::Light, FontSize::Default, item_count};
  UiConfig list{Layout::List, Theme::Light, FontSize::Default, item_count};
  const double a = base_task_time(grid, coeffs, plat);
  const double b = base_task_time(list, coeffs, plat);
  const double worst_penalty = (1.0 + 2.0 * kLegibilityStep) * kGlareMultiplier *
                               kPreferenceMismatchMultiplier * kPreferenceMismatchMultiplier *
                               kPreferenceMismatchMultiplier;
  return TimeBounds{std::min(a, b), std::max(a, b) * worst_penalty};
}

TaskOutcome simulate_task(const SimUserProfile& u, const UiConfig& ui, const PlatformState& plat,
                          const EnvironmentState& env, Rng& rng) {
  const PenaltyBreakdown p = task_penalties(u, ui, plat, env);
  const double base = base_task_time(ui, u.coeffs, plat);
  // Both draws happen whatever the noise level so stream positions do not
  // depend on configuration.
  const double z = standard_normal(rng);
  const double u01 = uniform01(rng);

  TaskOutcome out;
  out.duration = base * p.total() * std::exp(u.noise.duration_sigma * z);
  out.success = !(u01 < std::min(1.0, u.error_base * p.legibility * p.glare));
  out.penalty_applied = p.total() - 1.0;
  return out;
}

double emotion_target(double mean_penalty) {
  return std::clamp(1.0 - 2.0 * (mean_penalty - 1.0), -1.0, 1.0);
}

double mean_penalty(std::span<const TaskOutcome> outcomes) {
  if (outcomes.empty()) fail(ErrorKind::EmptyInput, "no task outcomes");
  double sum = 0.0;
  for (const TaskOutcome& o : outcomes) sum += 1.0 + o.penalty_applied;
  return sum / static_cast<double>(outcomes.size());
}

double update_emotion(SimUserProfile& u, double mean_penalty, Rng& rng) {
  if (!(mean_penalty >= 1.0)) fail(ErrorKind::Domain, "mean penalty must be >= 1");
  const double z = standard_normal(rng);
  const double target = emotion_target(mean_penalty);
  const double next = u.emotion_inertia * u.valence + (1.0 - u.emotion_inertia) * target +
                      u.noise.emotion_sigma * z;
  u.valence = std::clamp(next, -1.0, 1.0);
  return u.valence;
}

InteractionTelemetry simulate_step(SimUserProfile& u, const UiConfig& ui,
                                   const PlatformState& plat, const EnvironmentState& env,
                                   std::size_t k, Rng& task_rng, Rng& emotion_rng) {
  if (k == 0) fail(ErrorKind::Domain, "tasks per step must be >= 1");
  std::vector<TaskOutcome> outcomes;
  outcomes.reserve(k);
  for (std::size_t i = 0; i < k; ++i) outcomes.push_back(simulate_task(u, ui, plat, env, task_rng));

  InteractionTelemetry t;
  t.task_times.reserve(k);
  t.successes.reserve(k);
  for (const TaskOutcome& o : outcomes) {
    t.task_times.push_back(o.duration);
    t.successes.push_back(o.success);
  }
  t.reported_valence = update_emotion(u, mean_penalty(outcomes), emotion_rng);
  return t;
}

InteractionTelemetry simulate_step(SimUserProfile& u, const UiConfig& ui,
                                   const PlatformState& plat, const EnvironmentState& env,
                                   std::size_t k, Rng& rng) {
  return simulate_step(u, ui, plat, env, k, rng, rng);
}

}  // namespace uiadapt
