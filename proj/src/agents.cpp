#include "uiadapt/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "uiadapt/error.hpp"

namespace uiadapt {

void LearningParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Config, "alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorKind::Config, "gamma must lie in [0, 1)");
  if (!(epsilon_start > 0.0 && epsilon_start <= 1.0)) {
    fail(ErrorKind::Config, "epsilon_start must lie in (0, 1]");
  }
  if (!(epsilon_end >= 0.0 && epsilon_end < 1.0)) {
    fail(ErrorKind::Config, "epsilon_end must lie in [0, 1)");
  }
  if (epsilon_end > epsilon_start) fail(ErrorKind::Config, "epsilon_end must be <= epsilon_start");
  if (epsilon_decay_episodes == 0) fail(ErrorKind::Config, "epsilon_decay_episodes must be >= 1");
}

double LearningParams::epsilon(std::size_t episode) const {
  if (episode >= epsilon_decay_episodes) return epsilon_end;
  const double frac = static_cast<double>(episode) / static_cast<double>(epsilon_decay_episodes);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

QTable::QTable(std::size_t num_states, double initial_value)
    : num_states_(num_states),
      values_(num_states * kNumActions, initial_value),
      visits_(num_states * kNumActions, 0) {
  if (num_states == 0) fail(ErrorKind::Config, "Q-table needs at least one state");
  if (!std::isfinite(initial_value)) fail(ErrorKind::Config, "Q-table initial value must be finite");
}

QTable QTable::optimistic(std::size_t num_states, const LearningParams& params) {
  return QTable(num_states, 1.0 / (1.0 - params.gamma));
}

std::size_t QTable::offset(StateIndex s, AdaptationAction a) const {
  if (s >= num_states_) {
    fail(ErrorKind::Range, "state " + std::to_string(s) + " outside Q-table of " +
                               std::to_string(num_states_) + " states");
  }
  const std::size_t ai = action_index(a);
  if (ai >= kNumActions) fail(ErrorKind::Range, "action out of range");
  return s * kNumActions + ai;
}

double QTable::value(StateIndex s, AdaptationAction a) const { return values_[offset(s, a)]; }
double& QTable::value(StateIndex s, AdaptationAction a) { return values_[offset(s, a)]; }
std::uint64_t QTable::visits(StateIndex s, AdaptationAction a) const { return visits_[offset(s, a)]; }
void QTable::record_visit(StateIndex s, AdaptationAction a) { ++visits_[offset(s, a)]; }
void QTable::set_visits(StateIndex s, AdaptationAction a, std::uint64_t n) {
  visits_[offset(s, a)] = n;
}

std::span<const double> QTable::row(StateIndex s) const {
  return std::span<const double>(values_).subspan(offset(s, AdaptationAction::SetLayoutGrid),
                                                  kNumActions);
}

// ---------------------------------------------------------------------------

AdaptationAction select_action(std::span<const double> q, double epsilon, Rng& rng) {
  if (q.size() != kNumActions) fail(ErrorKind::Range, "q-vector must have 8 entries");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail(ErrorKind::Domain, "epsilon outside [0, 1]");
  if (uniform01(rng) < epsilon) return action_at(uniform_index(rng, kNumActions));

  const double best = *std::max_element(q.begin(), q.end());
  std::array<std::size_t, kNumActions> ties{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (q[i] == best) ties[n++] = i;
  }
  return action_at(n == 1 ? ties[0] : ties[uniform_index(rng, n)]);
}

AdaptationAction greedy_action(std::span<const double> q) {
  if (q.size() != kNumActions) fail(ErrorKind::Range, "q-vector must have 8 entries");
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumActions; ++i) {
    if (q[i] > q[best]) best = i;
  }
  return action_at(best);
}

std::vector<AdaptationAction> greedy_policy(const QTable& table) {
  std::vector<AdaptationAction> out(table.num_states());
  for (StateIndex s = 0; s < table.num_states(); ++s) out[s] = greedy_action(table.row(s));
  return out;
}

std::array<double, kNumActions> epsilon_greedy_probabilities(std::span<const double> q,
                                                             double epsilon) {
  if (q.size() != kNumActions) fail(ErrorKind::Range, "q-vector must have 8 entries");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail(ErrorKind::Domain, "epsilon outside [0, 1]");
  const double best = *std::max_element(q.begin(), q.end());
  const auto ties = static_cast<double>(std::count(q.begin(), q.end(), best));
  std::array<double, kNumActions> pi{};
  for (std::size_t i = 0; i < kNumActions; ++i) {
    pi[i] = epsilon / static_cast<double>(kNumActions);
    if (q[i] == best) pi[i] += (1.0 - epsilon) / ties;
  }
  return pi;
}

namespace {

void check_transition(const QTable& table, const Transition& t) {
  if (t.s >= table.num_states() || t.s_next >= table.num_states()) {
    fail(ErrorKind::Range, "transition state index outside Q-table");
  }
  if (!std::isfinite(t.r)) fail(ErrorKind::Domain, "reward must be finite");
}

double apply_target(QTable& table, const Transition& t, const LearningParams& p,
                    double bootstrap) {
  const double target = t.r + p.gamma * bootstrap;
  double& q = table.value(t.s, t.a);
  q += p.alpha * (target - q);
  table.record_visit(t.s, t.a);
  return q;
}

}  // namespace

double q_learning_update(QTable& table, const Transition& t, const LearningParams& p) {
  check_transition(table, t);
  double bootstrap = 0.0;
  if (!t.done) {
    const auto next = table.row(t.s_next);
    bootstrap = *std::max_element(next.begin(), next.end());
  }
  return apply_target(table, t, p, bootstrap);
}

double sarsa_update(QTable& table, const Transition& t, const LearningParams& p) {
  check_transition(table, t);
  double bootstrap = 0.0;
  if (!t.done) {
    if (!t.a_next) fail(ErrorKind::Contract, "SARSA needs a_next on non-terminal transitions");
    bootstrap = table.value(t.s_next, *t.a_next);
  }
  return apply_target(table, t, p, bootstrap);
}

double expected_sarsa_update(QTable& table, const Transition& t, const LearningParams& p,
                             double epsilon) {
  check_transition(table, t);
  double bootstrap = 0.0;
  if (!t.done) {
    const auto next = table.row(t.s_next);
    const auto pi = epsilon_greedy_probabilities(next, epsilon);
    for (std::size_t i = 0; i < kNumActions; ++i) bootstrap += pi[i] * next[i];
  }
  return apply_target(table, t, p, bootstrap);
}

// ---------------------------------------------------------------------------

void save_snapshot(const QTable& table, std::ostream& out) {
  char buf[40];
  out << "uiadapt-qtable v1\n";
  out << "states " << table.num_states() << " actions " << kNumActions << "\n";
  for (StateIndex s = 0; s < table.num_states(); ++s) {
    const auto row = table.row(s);
    for (std::size_t a = 0; a < kNumActions; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", row[a]);
      out << (a ? " " : "") << buf;
    }
    out << "\n";
  }
  out << "visits\n";
  for (StateIndex s = 0; s < table.num_states(); ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      out << (a ? " " : "") << table.visits(s, action_at(a));
    }
    out << "\n";
  }
}

QTable load_qtable(std::istream& in) {
  std::string magic, version, states_kw, actions_kw;
  std::size_t states = 0, actions = 0;
  if (!(in >> magic >> version) || magic != "uiadapt-qtable" || version != "v1") {
    fail(ErrorKind::Validation, "not a uiadapt-qtable v1 snapshot");
  }
  if (!(in >> states_kw >> states >> actions_kw >> actions) || states_kw != "states" ||
      actions_kw != "actions" || actions != kNumActions || states == 0) {
    fail(ErrorKind::Validation, "malformed Q-table snapshot header");
  }
  QTable table(states, 0.0);
  for (StateIndex s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      std::string token;
      if (!(in >> token)) fail(ErrorKind::Validation, "truncated Q-table snapshot");
      double v = 0.0;
      try {
        v = std::stod(token);
      } catch (const std::exception&) {
        fail(ErrorKind::Validation, "bad value in Q-table snapshot: " + token);
      }
      if (!std::isfinite(v)) fail(ErrorKind::Validation, "non-finite value in Q-table snapshot");
      table.value(s, action_at(a)) = v;
    }
  }
  std::string visits_kw;
  if (!(in >> visits_kw) || visits_kw != "visits") {
    fail(ErrorKind::Validation, "Q-table snapshot is missing its visits block");
  }
  for (StateIndex s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      std::uint64_t n = 0;
      if (!(in >> n)) fail(ErrorKind::Validation, "truncated visits block");
      table.set_visits(s, action_at(a), n);
    }
  }
  return table;
}

}  // namespace uiadapt
