#pragma once

#include <optional>
#include <span>
#include <string>

#include "uiadapt/agents.hpp"
#include "uiadapt/approx_agent.hpp"
#include "uiadapt/env.hpp"
#include "uiadapt/reward.hpp"

namespace uiadapt {

struct Explanation {
  AdaptationAction chosen = AdaptationAction::NoAdapt;
  AdaptationAction runner_up = AdaptationAction::NoAdapt;
  double q_margin = 0.0;     // Q(s, chosen) - Q(s, runner_up)
  Criteria component_attribution{};  // c(chosen) - c(NoAdapt), noise-free model
  std::optional<Criterion> dominant;  // largest positive attribution, if any
  std::string text;
};

/// Justifies `chosen` in context `ctx` from the action values `q` of the
/// encoded state and the noise-free criteria of the adapted UI against
/// keeping the current one.
Explanation explain(std::span<const double> q, const ContextState& ctx, AdaptationAction chosen,
                    const RewardModel& model);

Explanation explain(const QTable& table, StateIndex s, const ContextState& ctx,
                    AdaptationAction chosen, const RewardModel& model);

Explanation explain(const ApproxAgent& agent, StateIndex s, const ContextState& ctx,
                    AdaptationAction chosen, const RewardModel& model);

/// Renders the fixed template for (action, dominant component). Total over
/// all 8 x 5 combinations.
std::string render_explanation(AdaptationAction chosen, std::optional<Criterion> dominant,
                               double attribution, double q_margin);

}  // namespace uiadapt
