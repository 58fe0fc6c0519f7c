#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "uiadapt/context.hpp"

namespace uiadapt {

/// Reward criteria, in the order they enter the weighted sum.
enum class Criterion : std::uint8_t { Preference, Time, Success, Emotion };

template <>
struct EnumNames<Criterion> {
  static constexpr std::array<std::string_view, 4> names{"preference", "time", "success",
                                                         "emotion"};
};

inline constexpr std::size_t kNumCriteria = 4;

/// c1 preference similarity, c2 time score, c3 success rate, c4 emotion score.
using Criteria = std::array<double, kNumCriteria>;

/// Non-negative weights on the simplex. The only ways to build one are the
/// checked factory, the normalizing helper and (for tests) `unchecked`.
class RewardWeights {
 public:
  /// Uniform (0.25, 0.25, 0.25, 0.25).
  RewardWeights();

  /// Throws Error(Validation) unless every w >= 0 and |sum - 1| <= 1e-9.
  static RewardWeights make(const std::array<double, kNumCriteria>& w);

  /// Scales a non-negative vector onto the simplex. Throws Error(Validation)
  /// when any entry is negative or the sum is not positive.
  static RewardWeights normalized(const std::array<double, kNumCriteria>& raw);

  /// Bypasses the simplex check. Only for tests that probe scale invariance.
  static RewardWeights unchecked(const std::array<double, kNumCriteria>& w);

  const std::array<double, kNumCriteria>& values() const noexcept { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

  bool operator==(const RewardWeights&) const = default;

 private:
  explicit RewardWeights(const std::array<double, kNumCriteria>& w) : w_(w) {}

  std::array<double, kNumCriteria> w_;
};

struct RewardBreakdown {
  Criteria c{};
  RewardWeights weights;
  double total = 0.0;
};

/// Total = w1 c1 + w2 c2 + w3 c3 + w4 c4. Throws Error(Domain) when a
/// criterion leaves [0, 1].
RewardBreakdown compute_reward(const Criteria& c, const RewardWeights& w);

// ---------------------------------------------------------------------------

struct PreferenceProfile {
  Layout preferred_layout = Layout::List;
  FontSize preferred_font = FontSize::Big;
  /// nullopt: follow ambient (Dark below `theme_threshold`, else Light).
  std::optional<Theme> fixed_theme;
  double theme_threshold = 0.5;

  void validate() const;
  bool operator==(const PreferenceProfile&) const = default;
};

Theme resolve_theme(const PreferenceProfile& p, const EnvironmentState& env);

/// The UI the profile asks for in this environment.
UiConfig preferred_ui(const PreferenceProfile& p, const EnvironmentState& env, int item_count);

/// Fraction of {layout, resolved theme, font} that match, in {0, 1/3, 2/3, 1}.
double preference_similarity(const UiConfig& ui, const PreferenceProfile& p,
                             const EnvironmentState& env);

struct InteractionTelemetry {
  std::vector<double> task_times;  // seconds
  std::vector<bool> successes;
  double reported_valence = 0.0;

  std::size_t tasks_attempted() const { return task_times.size(); }
  void validate() const;
};

struct UsabilityScores {
  double time_score = 0.0;
  double success_rate = 0.0;
};

/// time_score = clamp((t_max - mean) / (t_max - t_min), 0, 1).
/// Throws Error(EmptyInput) for an empty telemetry.
UsabilityScores usability_scores(const InteractionTelemetry& t, double t_min, double t_max);

/// (valence + 1) / 2. Throws Error(Domain) outside [-1, 1].
double emotion_score(double valence);

}  // namespace uiadapt
