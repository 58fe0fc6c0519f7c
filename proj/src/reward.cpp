#include "uiadapt/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uiadapt/error.hpp"

namespace uiadapt {

RewardWeights::RewardWeights() : w_{0.25, 0.25, 0.25, 0.25} {}

RewardWeights RewardWeights::make(const std::array<double, kNumCriteria>& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      fail(ErrorKind::Validation,
           "weight '" + std::string(to_string(static_cast<Criterion>(i))) + "' must be >= 0");
    }
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "weights must sum to 1 (got " << sum << ")";
    fail(ErrorKind::Validation, os.str());
  }
  return RewardWeights(w);
}

RewardWeights RewardWeights::normalized(const std::array<double, kNumCriteria>& raw) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    if (!(raw[i] >= 0.0) || !std::isfinite(raw[i])) {
      fail(ErrorKind::Validation,
           "weight '" + std::string(to_string(static_cast<Criterion>(i))) + "' must be >= 0");
    }
    sum += raw[i];
  }
  if (!(sum > 0.0)) fail(ErrorKind::Validation, "weights must not all be zero");
  std::array<double, kNumCriteria> w{};
  for (std::size_t i = 0; i < kNumCriteria; ++i) w[i] = raw[i] / sum;
  return RewardWeights(w);
}

RewardWeights RewardWeights::unchecked(const std::array<double, kNumCriteria>& w) {
  return RewardWeights(w);
}

RewardBreakdown compute_reward(const Criteria& c, const RewardWeights& w) {
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    if (!(c[i] >= 0.0 && c[i] <= 1.0)) {
      std::ostringstream os;
      os << "criterion " << to_string(static_cast<Criterion>(i)) << " = " << c[i]
         << " outside [0, 1]";
      fail(ErrorKind::Domain, os.str());
    }
  }
  RewardBreakdown out;
  out.c = c;
  out.weights = w;
  out.total = w[0] * c[0] + w[1] * c[1] + w[2] * c[2] + w[3] * c[3];
  return out;
}

void PreferenceProfile::validate() const {
  if (static_cast<std::size_t>(preferred_layout) >= enum_cardinality<Layout>() ||
      static_cast<std::size_t>(preferred_font) >= enum_cardinality<FontSize>() ||
      (fixed_theme && static_cast<std::size_t>(*fixed_theme) >= enum_cardinality<Theme>())) {
    fail(ErrorKind::Domain, "invalid preference enum");
  }
  if (!(theme_threshold > 0.0 && theme_threshold < 1.0)) {
    fail(ErrorKind::Domain, "theme_threshold must lie in (0, 1)");
  }
}

Theme resolve_theme(const PreferenceProfile& p, const EnvironmentState& env) {
  if (p.fixed_theme) return *p.fixed_theme;
  return env.ambient_brightness < p.theme_threshold ? Theme::Dark : Theme::Light;
}

UiConfig preferred_ui(const PreferenceProfile& p, const EnvironmentState& env, int item_count) {
  return UiConfig{p.preferred_layout, resolve_theme(p, env), p.preferred_font, item_count};
}

double preference_similarity(const UiConfig& ui, const PreferenceProfile& p,
                             const EnvironmentState& env) {
  int matches = 0;
  if (ui.layout == p.preferred_layout) ++matches;
  if (ui.theme == resolve_theme(p, env)) ++matches;
  if (ui.font_size == p.preferred_font) ++matches;
  return static_cast<double>(matches) / 3.0;
}

void InteractionTelemetry::validate() const {
  if (successes.size() != task_times.size()) {
    fail(ErrorKind::Validation, "task_times and successes differ in length");
  }
  for (double t : task_times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      fail(ErrorKind::Validation, "task_times must be positive");
    }
  }
  if (!(reported_valence >= -1.0 && reported_valence <= 1.0)) {
    fail(ErrorKind::Validation, "reported_valence outside [-1, 1]");
  }
}

UsabilityScores usability_scores(const InteractionTelemetry& t, double t_min, double t_max) {
  if (t.tasks_attempted() == 0) fail(ErrorKind::EmptyInput, "telemetry has no tasks");
  t.validate();
  if (!(t_min > 0.0 && t_min < t_max)) {
    fail(ErrorKind::Domain, "time bounds must satisfy 0 < t_min < t_max");
  }
  double sum = 0.0;
  for (double d : t.task_times) sum += d;
  const double mean = sum / static_cast<double>(t.task_times.size());
  const auto ok = std::count(t.successes.begin(), t.successes.end(), true);

  UsabilityScores out;
  out.time_score = std::clamp((t_max - mean) / (t_max - t_min), 0.0, 1.0);
  out.success_rate = static_cast<double>(ok) / static_cast<double>(t.tasks_attempted());
  return out;
}

double emotion_score(double valence) {
  if (!(valence >= -1.0 && valence <= 1.0)) {
    fail(ErrorKind::Domain, "valence outside [-1, 1]");
  }
  return (valence + 1.0) / 2.0;
}

}  // namespace uiadapt
