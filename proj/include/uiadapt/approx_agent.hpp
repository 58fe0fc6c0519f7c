#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "uiadapt/agents.hpp"
#include "uiadapt/context.hpp"

namespace uiadapt {

struct ApproxConfig {
  bool hidden_layer = false;
  std::size_t hidden_width = 16;
  double step_size = 0.01;
  double init_scale = 0.5;  // hidden weights drawn from U(-scale, scale)

  void validate() const;
  bool operator==(const ApproxConfig&) const = default;
};

using QVector = std::array<double, kNumActions>;

/// Action-value approximator over factored one-hot features: one block per
/// tabular dimension, concatenated, no cross terms. Without a hidden layer
/// Q(s, .) = W phi(s) + b; with one, Q(s, .) = V tanh(U phi(s) + c) + b.
///
/// Parameters flatten as [W (8 x F), b (8)] or [U (H x F), c (H), V (8 x H),
/// b (8)], row-major.
class ApproxAgent {
 public:
  ApproxAgent(const Discretization& d, ApproxConfig config, std::uint64_t init_seed);

  const ApproxConfig& config() const noexcept { return config_; }
  const Discretization& discretization() const noexcept { return disc_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::size_t num_states() const noexcept { return num_states_; }

  /// Indices of the active one-hot features of s.
  std::vector<std::size_t> active_features(StateIndex s) const;

  /// Dense feature vector of s.
  std::vector<double> features(StateIndex s) const;

  QVector predict(StateIndex s) const;

  /// r + gamma * max_a' Q(s', a'), or r when done.
  double td_target(const Transition& t, const LearningParams& p) const;

  /// 0.5 * (target - Q(s, a))^2 at the current parameters.
  double loss(StateIndex s, AdaptationAction a, double target) const;

  /// Gradient of loss(s, a, target) with respect to the flattened parameters.
  std::vector<double> loss_gradient(StateIndex s, AdaptationAction a, double target) const;

  /// One semi-gradient step with the TD target held fixed. Returns the loss
  /// before the step. Throws Error(Divergence) on a non-finite loss or
  /// parameter.
  double update(const Transition& t, const LearningParams& p);

  std::span<const double> parameters() const noexcept { return params_; }
  void set_parameters(std::span<const double> params);

  std::vector<AdaptationAction> greedy_policy() const;

 private:
  struct Forward {
    QVector q{};
    std::vector<double> hidden;  // tanh activations, empty without hidden layer
  };

  Forward forward(StateIndex s) const;

  Discretization disc_;
  ApproxConfig config_;
  std::size_t num_states_ = 0;
  std::size_t feature_dim_ = 0;
  std::vector<std::size_t> block_offsets_;
  std::vector<double> params_;
};

QVector approx_predict(const ApproxAgent& agent, StateIndex s);
double approx_update(ApproxAgent& agent, const Transition& t, const LearningParams& p);

// Snapshot text layout:
//   uiadapt-approx v1
//   hidden <0|1> width <H> step <step_size> params <P>
//   dims <k> <dim names...>
//   emotion <n> <boundaries...>
//   brightness <n> <boundaries...>
//   <P values, %.17g, one per line>
void save_snapshot(const ApproxAgent& agent, std::ostream& out);
ApproxAgent load_approx(std::istream& in);

}  // namespace uiadapt
