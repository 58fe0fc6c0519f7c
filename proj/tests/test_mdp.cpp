#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "uiadapt/error.hpp"
#include "uiadapt/mdp.hpp"

using namespace uiadapt;

namespace {

EnumeratedMdp random_mdp(std::size_t n, std::size_t m, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EnumeratedMdp mdp(n, m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      double sum = 0.0;
      std::vector<double> row(n);
      for (double& p : row) sum += (p = u(g) < 0.3 ? u(g) : 0.0);
      if (sum == 0.0) row[s] = sum = 1.0;
      for (std::size_t t = 0; t < n; ++t) mdp.probability(s, a, t) = row[t] / sum;
      mdp.reward(s, a) = u(g);
    }
  }
  return mdp;
}

// Bellman backup written out independently of the library.
double residual(const EnumeratedMdp& mdp, const std::vector<double>& v, double g) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    double best = -INFINITY;
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      double q = mdp.reward(s, a);
      for (std::size_t t = 0; t < mdp.num_states(); ++t) q += g * mdp.probability(s, a, t) * v[t];
      best = std::max(best, q);
    }
    worst = std::max(worst, std::abs(best - v[s]));
  }
  return worst;
}

}  // namespace

TEST_CASE("single state closed form") {
  EnumeratedMdp mdp(1, 1);
  mdp.probability(0, 0, 0) = 1.0;
  mdp.reward(0, 0) = 1.0;
  const ExactSolution sol = solve_exact(mdp, 0.9, 1e-12);
  CHECK(std::abs(sol.values[0] - 10.0) <= 1e-9);
  CHECK(sol.policy[0] == 0);
}

TEST_CASE("zero rewards give zero values") {
  std::mt19937_64 g(1);
  EnumeratedMdp mdp = random_mdp(6, 3, g);
  for (std::size_t s = 0; s < 6; ++s) {
    for (std::size_t a = 0; a < 3; ++a) mdp.reward(s, a) = 0.0;
  }
  const ExactSolution sol = solve_exact(mdp, 0.95, 1e-10);
  for (double v : sol.values) CHECK(v == 0.0);
}

TEST_CASE("random MDPs solve below the tolerance") {
  std::mt19937_64 g(2024);
  for (int i = 0; i < 20; ++i) {
    const EnumeratedMdp mdp = random_mdp(20, 4, g);
    const double tol = 1e-8;
    const ExactSolution sol = solve_exact(mdp, 0.9, tol);
    CHECK(residual(mdp, sol.values, 0.9) < tol);
    CHECK(bellman_residual(mdp, sol.values, 0.9) == doctest::Approx(sol.residual));
    // Policy and Q are consistent with the values.
    const std::vector<double> q = q_from_values(mdp, sol.values, 0.9);
    CHECK(q == sol.q);
    for (std::size_t s = 0; s < 20; ++s) {
      const auto row = q.begin() + static_cast<std::ptrdiff_t>(s * 4);
      const auto best = std::max_element(row, row + 4);
      CHECK(sol.policy[s] == static_cast<std::size_t>(best - row));
      CHECK(is_optimal_action(sol, 4, s, sol.policy[s]));
    }
  }
}

TEST_CASE("ties resolve to the lowest action") {
  EnumeratedMdp mdp(1, 3);
  for (std::size_t a = 0; a < 3; ++a) {
    mdp.probability(0, a, 0) = 1.0;
    mdp.reward(0, a) = a == 0 ? 0.5 : 1.0;
  }
  const ExactSolution sol = solve_exact(mdp, 0.5, 1e-12);
  CHECK(sol.policy[0] == 1);
  CHECK(is_optimal_action(sol, 3, 0, 2));
  CHECK_FALSE(is_optimal_action(sol, 3, 0, 0));
}

TEST_CASE("invalid inputs") {
  EnumeratedMdp mdp(2, 1);
  mdp.probability(0, 0, 1) = 1.0;
  mdp.probability(1, 0, 1) = 0.5;
  CHECK_THROWS_AS(mdp.validate(), Error);
  try {
    solve_exact(mdp, 0.9, 1e-6);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Model);
  }
  mdp.probability(1, 0, 1) = 1.0;
  try {
    solve_exact(mdp, 1.0, 1e-6);
    FAIL("gamma 1 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  try {
    solve_exact(mdp, 0.9, 0.0);
    FAIL("tol 0 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}
