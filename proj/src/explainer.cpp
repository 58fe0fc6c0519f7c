#include "uiadapt/explainer.hpp"

#include <array>
#include <cstdio>

#include "uiadapt/error.hpp"

namespace uiadapt {

namespace {

constexpr std::array<const char*, kNumActions> kActionPhrase{
    "Switched to the grid layout",   "Switched to the list layout",
    "Switched to the light theme",   "Switched to the dark theme",
    "Switched to the small font",    "Switched to the default font",
    "Switched to the big font",      "Kept the current interface",
};

constexpr std::array<const char*, kNumCriteria> kReasonPhrase{
    "it matches your preferences more closely",
    "it should make tasks faster",
    "it should reduce selection errors",
    "it should make the interaction more pleasant",
};

constexpr std::array<const char*, kNumCriteria> kCriterionLabel{
    "preference", "task time", "success", "emotion"};

// Attributions below this are treated as no change.
constexpr double kAttributionEpsilon = 1e-12;

}  // namespace

std::string render_explanation(AdaptationAction chosen, std::optional<Criterion> dominant,
                               double attribution, double q_margin) {
  char buf[256];
  const char* action = kActionPhrase[action_index(chosen)];
  if (dominant) {
    const auto k = static_cast<std::size_t>(*dominant);
    std::snprintf(buf, sizeof buf, "%s because %s (%s +%.3f, value margin %.3f).", action,
                  kReasonPhrase[k], kCriterionLabel[k], attribution, q_margin);
  } else if (chosen == AdaptationAction::NoAdapt) {
    std::snprintf(buf, sizeof buf,
                  "%s because no adaptation is expected to improve it right now "
                  "(value margin %.3f).",
                  action, q_margin);
  } else {
    std::snprintf(buf, sizeof buf,
                  "%s because the learned policy expects it to pay off over the next "
                  "interactions, although no criterion improves immediately (value margin %.3f).",
                  action, q_margin);
  }
  return buf;
}

Explanation explain(std::span<const double> q, const ContextState& ctx, AdaptationAction chosen,
                    const RewardModel& model) {
  if (q.size() != kNumActions) fail(ErrorKind::Range, "q-vector must have 8 entries");
  Explanation out;
  out.chosen = chosen;

  const std::size_t ci = action_index(chosen);
  std::size_t runner = ci == 0 ? 1 : 0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (i != ci && q[i] > q[runner]) runner = i;
  }
  out.runner_up = action_at(runner);
  out.q_margin = q[ci] - q[runner];

  const Criteria adapted = model.criteria(apply_action(ctx.ui, chosen), ctx.environment);
  const Criteria kept = model.criteria(apply_action(ctx.ui, AdaptationAction::NoAdapt),
                                       ctx.environment);
  double best = kAttributionEpsilon;
  for (std::size_t k = 0; k < kNumCriteria; ++k) {
    out.component_attribution[k] = adapted[k] - kept[k];
    if (out.component_attribution[k] > best) {
      best = out.component_attribution[k];
      out.dominant = static_cast<Criterion>(k);
    }
  }
  const double shown =
      out.dominant ? out.component_attribution[static_cast<std::size_t>(*out.dominant)] : 0.0;
  out.text = render_explanation(chosen, out.dominant, shown, out.q_margin);
  return out;
}

Explanation explain(const QTable& table, StateIndex s, const ContextState& ctx,
                    AdaptationAction chosen, const RewardModel& model) {
  return explain(table.row(s), ctx, chosen, model);
}

Explanation explain(const ApproxAgent& agent, StateIndex s, const ContextState& ctx,
                    AdaptationAction chosen, const RewardModel& model) {
  const QVector q = agent.predict(s);
  return explain(std::span<const double>(q), ctx, chosen, model);
}

}  // namespace uiadapt
