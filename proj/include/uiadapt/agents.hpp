#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "uiadapt/context.hpp"
#include "uiadapt/rng.hpp"

namespace uiadapt {

struct LearningParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::size_t epsilon_decay_episodes = 300;

  void validate() const;

  /// Linear decay from epsilon_start to epsilon_end over
  /// epsilon_decay_episodes, constant afterwards.
  double epsilon(std::size_t episode) const;

  bool operator==(const LearningParams&) const = default;
};

/// Dense [num_states x 8] action-value table with visit counts.
class QTable {
 public:
  QTable(std::size_t num_states, double initial_value);

  /// Initialized to the reward bound 1 / (1 - gamma).
  static QTable optimistic(std::size_t num_states, const LearningParams& params);

  std::size_t num_states() const noexcept { return num_states_; }

  double value(StateIndex s, AdaptationAction a) const;
  double& value(StateIndex s, AdaptationAction a);
  std::uint64_t visits(StateIndex s, AdaptationAction a) const;
  void record_visit(StateIndex s, AdaptationAction a);
  void set_visits(StateIndex s, AdaptationAction a, std::uint64_t n);

  /// The 8 action values of state s. Throws Error(Range) for s out of range.
  std::span<const double> row(StateIndex s) const;

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::uint64_t>& visit_counts() const noexcept { return visits_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t offset(StateIndex s, AdaptationAction a) const;

  std::size_t num_states_;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

struct Transition {
  StateIndex s = 0;
  AdaptationAction a = AdaptationAction::NoAdapt;
  double r = 0.0;
  StateIndex s_next = 0;
  std::optional<AdaptationAction> a_next;
  bool done = false;
};

/// Epsilon-greedy: uniform with probability epsilon, otherwise an argmax with
/// ties broken uniformly at random.
AdaptationAction select_action(std::span<const double> q, double epsilon, Rng& rng);

/// Argmax with the lowest index winning ties.
AdaptationAction greedy_action(std::span<const double> q);

std::vector<AdaptationAction> greedy_policy(const QTable& table);

/// Probability of each action under epsilon-greedy, splitting the greedy
/// mass evenly over tied maximizers.
std::array<double, kNumActions> epsilon_greedy_probabilities(std::span<const double> q,
                                                             double epsilon);

// Each update changes exactly entry (t.s, t.a), increments its visit count
// and returns the new value.

double q_learning_update(QTable& table, const Transition& t, const LearningParams& p);

/// Throws Error(Contract) when a_next is missing on a non-terminal transition.
double sarsa_update(QTable& table, const Transition& t, const LearningParams& p);

double expected_sarsa_update(QTable& table, const Transition& t, const LearningParams& p,
                             double epsilon);

// Snapshot text layout:
//   uiadapt-qtable v1
//   states <N> actions 8
//   <N lines of 8 values, row-major, %.17g>
//   visits
//   <N lines of 8 counts>
void save_snapshot(const QTable& table, std::ostream& out);
QTable load_qtable(std::istream& in);

}  // namespace uiadapt
