#pragma once

#include <cstddef>
#include <vector>

namespace uiadapt {

/// Finite MDP with an explicit kernel P[s][a][s'] and expected rewards R[s][a].
class EnumeratedMdp {
 public:
  EnumeratedMdp(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  double& probability(std::size_t s, std::size_t a, std::size_t s_next);
  double probability(std::size_t s, std::size_t a, std::size_t s_next) const;
  double& reward(std::size_t s, std::size_t a);
  double reward(std::size_t s, std::size_t a) const;

  /// Throws Error(Model) unless every row is non-negative and sums to 1
  /// within 1e-9.
  void validate() const;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> kernel_;
  std::vector<double> rewards_;
};

struct ExactSolution {
  std::vector<double> values;        // V*
  std::vector<std::size_t> policy;   // greedy action, lowest index on ties
  std::vector<double> q;             // Q*, [s * num_actions + a]
  std::size_t iterations = 0;
  double residual = 0.0;             // ||T V - V||_inf of `values`
};

/// Q(s, a) = R(s, a) + gamma * sum_s' P(s'|s, a) V(s').
std::vector<double> q_from_values(const EnumeratedMdp& mdp, const std::vector<double>& values,
                                  double gamma);

/// max-norm of T V - V.
double bellman_residual(const EnumeratedMdp& mdp, const std::vector<double>& values, double gamma);

/// Value iteration from V = 0 until the Bellman residual of the returned
/// values is below tol. Throws Error(Domain) for gamma outside [0, 1) or
/// tol <= 0, Error(Model) for a non-stochastic kernel.
ExactSolution solve_exact(const EnumeratedMdp& mdp, double gamma, double tol);

/// True when action a is within tol of the best action value in state s.
bool is_optimal_action(const ExactSolution& sol, std::size_t num_actions, std::size_t s,
                       std::size_t a, double tol = 1e-9);

}  // namespace uiadapt
