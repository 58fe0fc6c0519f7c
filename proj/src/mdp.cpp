#include "uiadapt/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uiadapt/error.hpp"

namespace uiadapt {

EnumeratedMdp::EnumeratedMdp(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      kernel_(num_states * num_actions * num_states, 0.0),
      rewards_(num_states * num_actions, 0.0) {
  if (num_states == 0 || num_actions == 0) {
    fail(ErrorKind::Model, "MDP needs at least one state and one action");
  }
}

double& EnumeratedMdp::probability(std::size_t s, std::size_t a, std::size_t s_next) {
  return kernel_.at((s * num_actions_ + a) * num_states_ + s_next);
}

double EnumeratedMdp::probability(std::size_t s, std::size_t a, std::size_t s_next) const {
  return kernel_.at((s * num_actions_ + a) * num_states_ + s_next);
}

double& EnumeratedMdp::reward(std::size_t s, std::size_t a) {
  return rewards_.at(s * num_actions_ + a);
}

double EnumeratedMdp::reward(std::size_t s, std::size_t a) const {
  return rewards_.at(s * num_actions_ + a);
}

void EnumeratedMdp::validate() const {
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t a = 0; a < num_actions_; ++a) {
      if (!std::isfinite(reward(s, a))) fail(ErrorKind::Model, "non-finite reward");
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < num_states_; ++s2) {
        const double p = probability(s, a, s2);
        if (!(p >= 0.0)) fail(ErrorKind::Model, "negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorKind::Model, "transition row (" + std::to_string(s) + ", " +
                                   std::to_string(a) + ") does not sum to 1");
      }
    }
  }
}

std::vector<double> q_from_values(const EnumeratedMdp& mdp, const std::vector<double>& values,
                                  double gamma) {
  const std::size_t ns = mdp.num_states();
  const std::size_t na = mdp.num_actions();
  std::vector<double> q(ns * na, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      double expected = 0.0;
      for (std::size_t s2 = 0; s2 < ns; ++s2) expected += mdp.probability(s, a, s2) * values[s2];
      q[s * na + a] = mdp.reward(s, a) + gamma * expected;
    }
  }
  return q;
}

namespace {

std::vector<double> backup(const EnumeratedMdp& mdp, const std::vector<double>& values,
                           double gamma) {
  const std::size_t na = mdp.num_actions();
  const std::vector<double> q = q_from_values(mdp, values, gamma);
  std::vector<double> next(mdp.num_states());
  for (std::size_t s = 0; s < next.size(); ++s) {
    next[s] = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(s * na),
                                q.begin() + static_cast<std::ptrdiff_t>((s + 1) * na));
  }
  return next;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

double bellman_residual(const EnumeratedMdp& mdp, const std::vector<double>& values,
                        double gamma) {
  if (values.size() != mdp.num_states()) fail(ErrorKind::Range, "value vector has wrong length");
  return max_abs_diff(backup(mdp, values, gamma), values);
}

ExactSolution solve_exact(const EnumeratedMdp& mdp, double gamma, double tol) {
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorKind::Domain, "gamma must lie in [0, 1)");
  if (!(tol > 0.0)) fail(ErrorKind::Domain, "tol must be > 0");
  mdp.validate();

  constexpr std::size_t kMaxIterations = 1'000'000;
  ExactSolution sol;
  sol.values.assign(mdp.num_states(), 0.0);
  for (;;) {
    std::vector<double> next = backup(mdp, sol.values, gamma);
    sol.residual = max_abs_diff(next, sol.values);
    if (sol.residual < tol) break;
    if (++sol.iterations >= kMaxIterations) {
      fail(ErrorKind::Model, "value iteration did not reach the tolerance");
    }
    sol.values = std::move(next);
  }

  const std::size_t na = mdp.num_actions();
  sol.q = q_from_values(mdp, sol.values, gamma);
  sol.policy.assign(mdp.num_states(), 0);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < na; ++a) {
      if (sol.q[s * na + a] > sol.q[s * na + best]) best = a;
    }
    sol.policy[s] = best;
  }
  return sol;
}

bool is_optimal_action(const ExactSolution& sol, std::size_t num_actions, std::size_t s,
                       std::size_t a, double tol) {
  const auto first = sol.q.begin() + static_cast<std::ptrdiff_t>(s * num_actions);
  const double best = *std::max_element(first, first + static_cast<std::ptrdiff_t>(num_actions));
  return sol.q.at(s * num_actions + a) >= best - tol;
}

}  // namespace uiadapt
