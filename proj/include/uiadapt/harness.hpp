#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uiadapt/agents.hpp"
#include "uiadapt/approx_agent.hpp"
#include "uiadapt/env.hpp"
#include "uiadapt/json_io.hpp"
#include "uiadapt/mdp.hpp"
#include "uiadapt/traces.hpp"

namespace uiadapt {

enum class AgentKind : std::uint8_t {
  QLearning,
  Sarsa,
  ExpectedSarsa,
  Approx,
  RandomBaseline,
  OracleBaseline,
};

template <>
struct EnumNames<AgentKind> {
  static constexpr std::array<std::string_view, 6> names{
      "QLearning", "Sarsa", "ExpectedSarsa", "Approx", "RandomBaseline", "OracleBaseline"};
};

struct ExperimentConfig {
  std::string name;  // defaults to the agent kind
  EnvConfig env;
  AgentKind agent = AgentKind::QLearning;
  LearningParams params;
  ApproxConfig approx;
  std::size_t episodes = 500;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t eval_every = 10;
  /// Worker threads for seed replicas; 0 picks the hardware concurrency.
  /// Results do not depend on it.
  std::size_t threads = 0;

  void validate() const;
  std::string label() const;
};

/// Context in which greedy policies are evaluated: a frozen clone of the
/// environment pinned to one (brightness, location).
struct EvalContext {
  double ambient_brightness = 0.0;
  Location location = Location::Indoor;
};

/// The fixed context itself when the config pins one, otherwise brightness
/// {0.1, 0.35, 0.6, 0.85} crossed with both locations.
std::vector<EvalContext> eval_contexts(const EnvConfig& cfg);

/// Solves the frozen MDP of a context on demand. Contexts with the same
/// reward table share one solution.
class OraclePlanner {
 public:
  OraclePlanner(EnvConfig cfg, double gamma);

  /// Optimal action for `ui` when the environment stays at `env`.
  AdaptationAction action(const UiConfig& ui, const EnvironmentState& env);

  const ExactSolution& solution(const EnvironmentState& env);

 private:
  EnvConfig cfg_;
  double gamma_;
  std::map<std::vector<double>, ExactSolution> cache_;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> train_curve;                // mean step reward per episode
  std::vector<std::optional<double>> eval_curve;  // set every eval_every episodes and at the end
  /// Oracle agreement of the greedy policy at the same checkpoints.
  std::vector<std::optional<double>> agreement_curve;
  std::optional<double> final_eval;
  /// Mean c1..c4 over all training steps; used as engagement/satisfaction
  /// proxies.
  Criteria component_means{};
  /// Greedy action for every tabular state.
  std::vector<AdaptationAction> final_policy;
  /// Fraction of frozen-MDP states (over all eval contexts) whose policy
  /// action is optimal.
  std::optional<double> oracle_agreement;
  bool diverged = false;
  std::string diagnostic;
  /// Final agent snapshot text (Q-table or approximator); empty for the
  /// baselines. Not part of the exported result.
  std::string snapshot;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;  // in config.seeds order
  bool partial = false;
  double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Trains one replica. Exposed for tests; run_experiment calls it per seed.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

using PolicyFn = std::function<AdaptationAction(StateIndex, const ContextState&)>;

/// Mean per-step reward over rollouts from every UI in every eval context.
/// When `traces` is given, every step is appended to it (source "eval",
/// one episode number per rollout).
double evaluate_policy(const EnvConfig& env, const PolicyFn& policy,
                       std::vector<TraceRecord>* traces = nullptr);

/// Fraction of frozen-MDP states, pooled over eval contexts, where
/// policy[tabular_index] is an optimal action.
double oracle_agreement(const EnvConfig& env, const std::vector<AdaptationAction>& policy,
                        double gamma);

struct AgentSummary {
  std::string name;
  AgentKind agent = AgentKind::QLearning;
  std::vector<double> mean_curve;  // across seeds, per episode
  std::vector<double> sd_curve;    // sample standard deviation (0 for one seed)
  double aulc = 0.0;               // mean of mean_curve
  double final_eval_mean = 0.0;
  double final_eval_sd = 0.0;
  double oracle_agreement = 0.0;   // mean over seeds
  Criteria component_means{};
  bool partial = false;
};

struct ComparisonReport {
  std::vector<AgentSummary> agents;      // in config order
  std::vector<std::size_t> ranking;      // indices into agents, best AULC first
  /// agreement[i][j]: mean over seeds of the fraction of tabular states where
  /// agents i and j choose the same greedy action.
  std::vector<std::vector<double>> agreement;
  std::vector<ExperimentResult> results;
};

/// Aggregates results that were run with one env and one seed list.
/// Throws Error(Config) otherwise. Aggregation walks seeds in sorted order so
/// permuting the seed list leaves the aggregates unchanged.
ComparisonReport summarize(std::vector<ExperimentResult> results);

/// Runs every config and summarizes. Needs at least two configs.
ComparisonReport compare_agents(const std::vector<ExperimentConfig>& cfgs);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

enum class ExportFormat : std::uint8_t { Csv, Text };

template <>
struct EnumNames<ExportFormat> {
  static constexpr std::array<std::string_view, 2> names{"csv", "text"};
};

/// One row per (agent, seed, episode); eval_reward is empty on episodes
/// without an evaluation. Header: agent,seed,episode,train_reward,eval_reward
std::string results_to_csv(const std::vector<ExperimentResult>& results);

struct CurveRow {
  std::string agent;
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  double train_reward = 0.0;
  std::optional<double> eval_reward;
  bool operator==(const CurveRow&) const = default;
};

std::vector<CurveRow> curve_rows(const std::vector<ExperimentResult>& results);
std::vector<CurveRow> parse_results_csv(std::string_view text);

Json to_json(const ExperimentConfig& cfg);
Json to_json(const SeedResult& r);
Json to_json(const ExperimentResult& r);
Json to_json(const ComparisonReport& r);
ExperimentResult experiment_result_from_json(const Json& j, const std::string& path = "result");

/// {"v": 1, "name": ..., "agent": ..., "episodes": ..., "seeds": [...],
///  "eval_every": ..., "threads": ..., "env": {...}, "params": {...},
///  "approx": {...}}
ExperimentConfig experiment_config_from_json(const Json& j,
                                             const std::string& path = "experiment");

/// {"v": 1, shared keys as above except agent/params/approx/name,
///  "agents": [{"name", "agent", "params", "approx"}, ...]}
std::vector<ExperimentConfig> compare_config_from_json(const Json& j,
                                                       const std::string& path = "compare");

/// Writes `<stem>.csv` or `<stem>.json` under `dir`. Returns the path.
std::filesystem::path export_results(const std::vector<ExperimentResult>& results,
                                     const std::filesystem::path& dir, std::string_view stem,
                                     ExportFormat format);

}  // namespace uiadapt
