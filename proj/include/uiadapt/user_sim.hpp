#pragma once

#include <span>
#include <string>
#include <vector>

#include "uiadapt/context.hpp"
#include "uiadapt/reward.hpp"
#include "uiadapt/rng.hpp"

namespace uiadapt {

/// Fitts: a + b log2(D/W + 1). Hick-Hyman: c + d log2(n + 1).
struct HciCoefficients {
  double fitts_a = 0.1;   // s
  double fitts_b = 0.15;  // s/bit
  double hick_c = 0.2;    // s
  double hick_d = 0.15;   // s/bit

  void validate() const;
  bool operator==(const HciCoefficients&) const = default;
};

enum class Acuity : std::uint8_t { Low, Normal, High };

template <>
struct EnumNames<Acuity> {
  static constexpr std::array<std::string_view, 3> names{"Low", "Normal", "High"};
};

/// Noise scales. Setting both to zero makes every simulation call a pure
/// function of its inputs.
struct SimNoise {
  double duration_sigma = 0.1;  // log-normal spread of task durations
  double emotion_sigma = 0.05;  // gaussian noise on the valence update

  bool operator==(const SimNoise&) const = default;
};

struct SimUserProfile {
  std::string name = "default";
  PreferenceProfile preference;
  HciCoefficients coeffs;
  Acuity acuity = Acuity::Normal;
  double error_base = 0.02;
  double emotion_inertia = 0.7;
  double valence = 0.0;  // mutable emotional state
  SimNoise noise;

  void validate() const;
  bool operator==(const SimUserProfile&) const = default;
};

struct TaskOutcome {
  double duration = 0.0;
  bool success = true;
  /// Product of the penalty multipliers minus one (0 for an unpenalized task).
  double penalty_applied = 0.0;
};

/// Throws Error(Domain) for non-positive distance or width.
double fitts_time(double distance, double width, const HciCoefficients& coeffs);

/// Throws Error(Domain) for n_options == 0.
double hick_time(int n_options, const HciCoefficients& coeffs);

struct LayoutGeometry {
  double distance = 0.0;
  double width = 0.0;
};

/// Mean pointing distance and target width of the atomic "locate and select a
/// named item" task, in item-pitch units:
///
///   screen   grid W  list W  base D  grid pitch  list pitch
///   Phone    1.50    0.75    3.0     0.6         1.2
///   Tablet   2.00    1.00    4.0     0.5         1.0
///   Desktop  2.50    1.25    5.0     0.4         0.8
///
/// D = base + pitch * item_count. Grid always has the shorter distance and
/// the wider target.
LayoutGeometry layout_geometry(Layout layout, ScreenClass screen, int item_count);

inline constexpr double kGlareMultiplier = 1.25;
inline constexpr double kGlareDarkThreshold = 0.7;   // Dark theme glares at ambient >= this
inline constexpr double kGlareLightThreshold = 0.2;  // Light theme glares at ambient <= this
inline constexpr double kLegibilityStep = 0.15;
inline constexpr double kPreferenceMismatchMultiplier = 1.4;

/// Smallest comfortably legible font for an acuity on a screen class.
FontSize minimum_legible_font(Acuity acuity, ScreenClass screen);

/// 1 + 0.15 per font step below minimum_legible_font().
double legibility_multiplier(FontSize font, Acuity acuity, ScreenClass screen);

double glare_multiplier(Theme theme, double ambient_brightness);

/// 1.4 per dimension (layout, resolved theme, font) that differs from the
/// profile's preferences.
double preference_multiplier(const UiConfig& ui, const PreferenceProfile& p,
                             const EnvironmentState& env);

struct PenaltyBreakdown {
  double legibility = 1.0;
  double glare = 1.0;
  double preference = 1.0;

  double total() const { return legibility * glare * preference; }
};

PenaltyBreakdown task_penalties(const SimUserProfile& u, const UiConfig& ui,
                                const PlatformState& plat, const EnvironmentState& env);

/// hick_time(item_count) + fitts_time(layout geometry).
double base_task_time(const UiConfig& ui, const HciCoefficients& coeffs,
                      const PlatformState& plat);

/// Task duration with noise removed.
double noise_free_duration(const SimUserProfile& u, const UiConfig& ui,
                           const PlatformState& plat, const EnvironmentState& env);

/// min(1, error_base * legibility * glare).
double failure_probability(const SimUserProfile& u, const UiConfig& ui,
                           const PlatformState& plat, const EnvironmentState& env);

struct TimeBounds {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Reference bounds for the time score: t_min is the fastest unpenalized
/// layout, t_max the slowest layout under every penalty at its maximum.
TimeBounds time_bounds(const HciCoefficients& coeffs, const PlatformState& plat, int item_count);

TaskOutcome simulate_task(const SimUserProfile& u, const UiConfig& ui, const PlatformState& plat,
                          const EnvironmentState& env, Rng& rng);

/// Steady-state valence for a mean penalty: clamp(1 - 2 (penalty - 1), -1, 1).
double emotion_target(double mean_penalty);

/// Mean of (1 + penalty_applied) over the outcomes.
double mean_penalty(std::span<const TaskOutcome> outcomes);

/// valence <- inertia * valence + (1 - inertia) * target + N(0, sigma),
/// clamped to [-1, 1]. Mutates and returns u.valence.
double update_emotion(SimUserProfile& u, double mean_penalty, Rng& rng);

/// Runs k tasks on `task_rng`, then updates the emotion on `emotion_rng`.
/// Throws Error(Domain) for k == 0.
InteractionTelemetry simulate_step(SimUserProfile& u, const UiConfig& ui,
                                   const PlatformState& plat, const EnvironmentState& env,
                                   std::size_t k, Rng& task_rng, Rng& emotion_rng);

/// Single-stream convenience overload.
InteractionTelemetry simulate_step(SimUserProfile& u, const UiConfig& ui,
                                   const PlatformState& plat, const EnvironmentState& env,
                                   std::size_t k, Rng& rng);

}  // namespace uiadapt
