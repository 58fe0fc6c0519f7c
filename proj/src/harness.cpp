#include "uiadapt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include "uiadapt/error.hpp"

namespace uiadapt {

void ExperimentConfig::validate() const {
  env.validate();
  params.validate();
  approx.validate();
  if (episodes < 1) fail(ErrorKind::Config, "episodes must be >= 1");
  if (seeds.empty()) fail(ErrorKind::Config, "seeds must not be empty");
  if (eval_every < 1) fail(ErrorKind::Config, "eval_every must be >= 1");
}

std::string ExperimentConfig::label() const {
  return name.empty() ? std::string(to_string(agent)) : name;
}

std::vector<EvalContext> eval_contexts(const EnvConfig& cfg) {
  std::vector<double> levels{0.1, 0.35, 0.6, 0.85};
  if (cfg.initial_brightness) levels = {*cfg.initial_brightness};
  std::vector<Location> places{Location::Indoor, Location::Outdoor};
  if (cfg.initial_location) places = {*cfg.initial_location};
  std::vector<EvalContext> out;
  for (double b : levels) {
    for (Location l : places) out.push_back(EvalContext{b, l});
  }
  return out;
}

// ---------------------------------------------------------------------------

OraclePlanner::OraclePlanner(EnvConfig cfg, double gamma) : cfg_(std::move(cfg)), gamma_(gamma) {}

const ExactSolution& OraclePlanner::solution(const EnvironmentState& env) {
  const EnvConfig frozen = cfg_.frozen(env.ambient_brightness, env.location);
  const RewardModel model(frozen);
  const int items = cfg_.initial_ui ? cfg_.initial_ui->item_count : cfg_.item_count;
  std::vector<double> key;
  for (const UiConfig& ui : all_ui_configs(items)) key.push_back(model.reward(ui, env).total);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, solve_exact(enumerate_mdp(frozen).mdp, gamma_, 1e-10)).first;
  }
  return it->second;
}

AdaptationAction OraclePlanner::action(const UiConfig& ui, const EnvironmentState& env) {
  return action_at(solution(env).policy[ui_config_index(ui)]);
}

// ---------------------------------------------------------------------------

namespace {

bool finite_table(const QTable& t) {
  return std::all_of(t.values().begin(), t.values().end(),
                     [](double v) { return std::isfinite(v); });
}

// Per-seed learner state; only the members relevant to the agent kind are used.
struct Learner {
  AgentKind kind;
  LearningParams params;
  QTable table;
  std::optional<ApproxAgent> approx;
  std::optional<OraclePlanner> oracle;
  Rng explore;

  Learner(const ExperimentConfig& cfg, std::uint64_t seed)
      : kind(cfg.agent),
        params(cfg.params),
        table(QTable::optimistic(cfg.env.discretization.state_count(), cfg.params)),
        explore(make_stream(seed, "explore")) {
    if (kind == AgentKind::Approx) {
      approx.emplace(cfg.env.discretization, cfg.approx, derive_seed(seed, "approx-init"));
    }
    if (kind == AgentKind::OracleBaseline) oracle.emplace(cfg.env, cfg.params.gamma);
  }

  QVector q(StateIndex s) const {
    if (approx) return approx->predict(s);
    QVector out{};
    const auto row = table.row(s);
    std::copy(row.begin(), row.end(), out.begin());
    return out;
  }

  AdaptationAction act(StateIndex s, const ContextState& ctx, double epsilon) {
    switch (kind) {
      case AgentKind::RandomBaseline:
        return action_at(uniform_index(explore, kNumActions));
      case AgentKind::OracleBaseline:
        return oracle->action(ctx.ui, ctx.environment);
      default: {
        const QVector v = q(s);
        return select_action(v, epsilon, explore);
      }
    }
  }

  void learn(const Transition& t, double epsilon) {
    switch (kind) {
      case AgentKind::QLearning:
        q_learning_update(table, t, params);
        break;
      case AgentKind::Sarsa:
        sarsa_update(table, t, params);
        break;
      case AgentKind::ExpectedSarsa:
        expected_sarsa_update(table, t, params, epsilon);
        break;
      case AgentKind::Approx:
        approx->update(t, params);
        break;
      default:
        return;
    }
    if (kind != AgentKind::Approx && !std::isfinite(table.value(t.s, t.a))) {
      fail(ErrorKind::Divergence, "non-finite action value at state " + std::to_string(t.s));
    }
  }

  bool uses_next_action() const { return kind == AgentKind::Sarsa; }
};

// Greedy policy of the learner over every tabular state.
std::vector<AdaptationAction> final_policy(Learner& learner, const ExperimentConfig& cfg,
                                           std::uint64_t seed) {
  const Discretization& d = cfg.env.discretization;
  const std::size_t n = d.state_count();
  std::vector<AdaptationAction> out(n);
  if (learner.kind == AgentKind::RandomBaseline) {
    Rng rng = make_stream(seed, "policy");
    for (auto& a : out) a = action_at(uniform_index(rng, kNumActions));
  } else if (learner.kind == AgentKind::OracleBaseline) {
    const int items = cfg.env.initial_ui ? cfg.env.initial_ui->item_count : cfg.env.item_count;
    for (StateIndex s = 0; s < n; ++s) {
      ContextState base;
      base.ui.item_count = items;
      base.actor = cfg.env.actor;
      base.platform = cfg.env.platform;
      const ContextState ctx = representative_context(decode_tabular(s, d), d, base);
      out[s] = learner.oracle->action(ctx.ui, ctx.environment);
    }
  } else {
    for (StateIndex s = 0; s < n; ++s) out[s] = greedy_action(learner.q(s));
  }
  return out;
}

PolicyFn eval_policy(Learner& learner, std::uint64_t seed,
                     std::shared_ptr<Rng>& random_stream) {
  switch (learner.kind) {
    case AgentKind::RandomBaseline:
      random_stream = std::make_shared<Rng>(make_stream(seed, "eval"));
      return [rng = random_stream](StateIndex, const ContextState&) {
        return action_at(uniform_index(*rng, kNumActions));
      };
    case AgentKind::OracleBaseline:
      return [&learner](StateIndex, const ContextState& ctx) {
        return learner.oracle->action(ctx.ui, ctx.environment);
      };
    default:
      return [&learner](StateIndex s, const ContextState&) { return greedy_action(learner.q(s)); };
  }
}

}  // namespace

double evaluate_policy(const EnvConfig& env, const PolicyFn& policy,
                       std::vector<TraceRecord>* traces) {
  const int items = env.initial_ui ? env.initial_ui->item_count : env.item_count;
  double total = 0.0;
  std::size_t rollouts = 0;
  for (const EvalContext& ec : eval_contexts(env)) {
    EnvConfig frozen = env.frozen(ec.ambient_brightness, ec.location);
    frozen.initial_ui.reset();
    frozen.item_count = items;
    UiAdaptationEnv sim(frozen);
    for (const UiConfig& ui : all_ui_configs(items)) {
      ContextState start;
      start.ui = ui;
      start.actor = env.actor;
      start.platform = env.platform;
      start.environment = EnvironmentState{ec.location, ec.ambient_brightness};
      ResetResult rr = sim.reset_to(0, start);
      StateIndex s = rr.observation;
      double sum = 0.0;
      while (!sim.done()) {
        const StepResult sr = sim.step(policy(s, sim.context()));
        if (traces) traces->push_back(make_trace_record("eval", rollouts, s, sr, sim.step_count() - 1));
        sum += sr.reward.total;
        s = sr.observation;
      }
      total += sum / static_cast<double>(frozen.horizon);
      ++rollouts;
    }
  }
  return total / static_cast<double>(rollouts);
}

double oracle_agreement(const EnvConfig& env, const std::vector<AdaptationAction>& policy,
                        double gamma) {
  if (policy.size() != env.discretization.state_count()) {
    fail(ErrorKind::Range, "policy size does not match the state count");
  }
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const EvalContext& ec : eval_contexts(env)) {
    EnvConfig frozen = env.frozen(ec.ambient_brightness, ec.location);
    const FrozenMdp fm = enumerate_mdp(frozen);
    const ExactSolution sol = solve_exact(fm.mdp, gamma, 1e-10);
    for (std::size_t i = 0; i < kNumUiConfigs; ++i) {
      const std::size_t a = action_index(policy[fm.tabular_index[i]]);
      hits += is_optimal_action(sol, kNumActions, i, a) ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedResult out;
  out.seed = seed;
  Learner learner(cfg, seed);
  UiAdaptationEnv env(cfg.env);
  const std::uint64_t episode_root = derive_seed(seed, "episode");
  std::shared_ptr<Rng> eval_rng;
  const PolicyFn greedy = eval_policy(learner, seed, eval_rng);

  Criteria component_sum{};
  std::size_t steps = 0;
  try {
    for (std::size_t e = 0; e < cfg.episodes; ++e) {
      const double eps = cfg.params.epsilon(e);
      ResetResult rr = env.reset(derive_seed(episode_root, std::to_string(e)));
      StateIndex s = rr.observation;
      AdaptationAction a = learner.act(s, env.context(), eps);
      double episode_sum = 0.0;
      bool done = false;
      while (!done) {
        const StepResult sr = env.step(a);
        done = sr.done;
        episode_sum += sr.reward.total;
        for (std::size_t k = 0; k < kNumCriteria; ++k) component_sum[k] += sr.reward.c[k];
        ++steps;

        // The horizon truncates the episode; the task goes on, so the update
        // still bootstraps from the last observed state.
        const AdaptationAction next = learner.act(sr.observation, env.context(), eps);
        Transition t{s, a, sr.reward.total, sr.observation, std::nullopt, false};
        if (learner.uses_next_action()) t.a_next = next;
        learner.learn(t, eps);
        s = sr.observation;
        a = next;
      }
      out.train_curve.push_back(episode_sum / static_cast<double>(cfg.env.horizon));
      const bool eval_now = (e + 1) % cfg.eval_every == 0 || e + 1 == cfg.episodes;
      out.eval_curve.push_back(eval_now ? std::optional(evaluate_policy(cfg.env, greedy))
                                        : std::nullopt);
      out.agreement_curve.push_back(
          eval_now ? std::optional(oracle_agreement(cfg.env, final_policy(learner, cfg, seed),
                                                    cfg.params.gamma))
                   : std::nullopt);
    }
    out.final_eval = out.eval_curve.back();
    for (std::size_t k = 0; k < kNumCriteria; ++k) {
      out.component_means[k] = component_sum[k] / static_cast<double>(steps);
    }
    out.final_policy = final_policy(learner, cfg, seed);
    out.oracle_agreement = oracle_agreement(cfg.env, out.final_policy, cfg.params.gamma);
    std::ostringstream snap;
    if (learner.approx) {
      save_snapshot(*learner.approx, snap);
    } else if (learner.kind != AgentKind::RandomBaseline && learner.kind != AgentKind::OracleBaseline) {
      save_snapshot(learner.table, snap);
    }
    out.snapshot = snap.str();
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Divergence) throw;
    out.diverged = true;
    out.diagnostic = "seed " + std::to_string(seed) + " diverged at episode " +
                     std::to_string(out.train_curve.size()) + ": " + err.what();
  }
  if (!out.diverged && learner.kind != AgentKind::Approx && !finite_table(learner.table)) {
    out.diverged = true;
    out.diagnostic = "seed " + std::to_string(seed) + ": non-finite action values";
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  out.config = cfg;
  out.seeds.resize(cfg.seeds.size());

  std::size_t workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        out.seeds[i] = run_seed(cfg, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.partial = std::any_of(out.seeds.begin(), out.seeds.end(),
                            [](const SeedResult& r) { return r.diverged; });
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<const SeedResult*> sorted_by_seed(const ExperimentResult& r) {
  std::vector<const SeedResult*> out;
  for (const SeedResult& s : r.seeds) out.push_back(&s);
  std::stable_sort(out.begin(), out.end(),
                   [](const SeedResult* a, const SeedResult* b) { return a->seed < b->seed; });
  return out;
}

double sample_sd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

AgentSummary summarize_one(const ExperimentResult& r) {
  AgentSummary s;
  s.name = r.config.label();
  s.agent = r.config.agent;
  s.partial = r.partial;
  std::vector<const SeedResult*> ok;
  for (const SeedResult* sr : sorted_by_seed(r)) {
    if (!sr->diverged) ok.push_back(sr);
  }
  if (ok.empty()) return s;

  const std::size_t n = r.config.episodes;
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<double> xs;
    for (const SeedResult* sr : ok) xs.push_back(sr->train_curve[e]);
    const double m = mean_of(xs);
    s.mean_curve.push_back(m);
    s.sd_curve.push_back(sample_sd(xs, m));
  }
  s.aulc = mean_of(s.mean_curve);

  std::vector<double> finals;
  std::vector<double> agreements;
  for (const SeedResult* sr : ok) {
    finals.push_back(*sr->final_eval);
    agreements.push_back(sr->oracle_agreement.value_or(0.0));
    for (std::size_t k = 0; k < kNumCriteria; ++k) {
      s.component_means[k] += sr->component_means[k] / static_cast<double>(ok.size());
    }
  }
  s.final_eval_mean = mean_of(finals);
  s.final_eval_sd = sample_sd(finals, s.final_eval_mean);
  s.oracle_agreement = mean_of(agreements);
  return s;
}

std::vector<std::uint64_t> sorted_seeds(const ExperimentConfig& c) {
  std::vector<std::uint64_t> s = c.seeds;
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

ComparisonReport summarize(std::vector<ExperimentResult> results) {
  if (results.empty()) fail(ErrorKind::EmptyInput, "nothing to summarize");
  const ExperimentConfig& ref = results.front().config;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const ExperimentConfig& c = results[i].config;
    if (!(c.env == ref.env)) {
      fail(ErrorKind::Config, "agent '" + c.label() + "' uses a different env than '" +
                                  ref.label() + "'");
    }
    if (sorted_seeds(c) != sorted_seeds(ref)) {
      fail(ErrorKind::Config, "agent '" + c.label() + "' uses a different seed list");
    }
    if (c.episodes != ref.episodes) {
      fail(ErrorKind::Config, "agent '" + c.label() + "' uses a different episode count");
    }
  }

  ComparisonReport report;
  for (const ExperimentResult& r : results) report.agents.push_back(summarize_one(r));
  report.ranking.resize(report.agents.size());
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    return report.agents[a].aulc > report.agents[b].aulc;
  });

  const std::size_t m = results.size();
  report.agreement.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto si = sorted_by_seed(results[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const auto sj = sorted_by_seed(results[j]);
      std::vector<double> per_seed;
      for (std::size_t k = 0; k < si.size() && k < sj.size(); ++k) {
        const auto& pi = si[k]->final_policy;
        const auto& pj = sj[k]->final_policy;
        if (pi.empty() || pi.size() != pj.size()) continue;
        std::size_t same = 0;
        for (std::size_t s = 0; s < pi.size(); ++s) same += pi[s] == pj[s] ? 1 : 0;
        per_seed.push_back(static_cast<double>(same) / static_cast<double>(pi.size()));
      }
      report.agreement[i][j] = mean_of(per_seed);
    }
  }
  report.results = std::move(results);
  return report;
}

ComparisonReport compare_agents(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.size() < 2) fail(ErrorKind::Config, "compare needs at least two agent configs");
  for (std::size_t i = 1; i < cfgs.size(); ++i) {
    if (!(cfgs[i].env == cfgs[0].env)) {
      fail(ErrorKind::Config, "agent '" + cfgs[i].label() + "' uses a different env than '" +
                                  cfgs[0].label() + "'");
    }
    if (sorted_seeds(cfgs[i]) != sorted_seeds(cfgs[0])) {
      fail(ErrorKind::Config, "agent '" + cfgs[i].label() + "' uses a different seed list");
    }
  }
  std::vector<ExperimentResult> results;
  for (const ExperimentConfig& c : cfgs) results.push_back(run_experiment(c));
  return summarize(std::move(results));
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

std::vector<CurveRow> curve_rows(const std::vector<ExperimentResult>& results) {
  std::vector<CurveRow> rows;
  for (const ExperimentResult& r : results) {
    for (const SeedResult& s : r.seeds) {
      for (std::size_t e = 0; e < s.train_curve.size(); ++e) {
        CurveRow row;
        row.agent = r.config.label();
        row.seed = s.seed;
        row.episode = e;
        row.train_reward = s.train_curve[e];
        if (e < s.eval_curve.size()) row.eval_reward = s.eval_curve[e];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string results_to_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  os << "agent,seed,episode,train_reward,eval_reward\n";
  for (const CurveRow& row : curve_rows(results)) {
    os << row.agent << ',' << row.seed << ',' << row.episode << ','
       << format_real(row.train_reward) << ',';
    if (row.eval_reward) os << format_real(*row.eval_reward);
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_real(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(ErrorKind::Config, where + ": not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    fail(ErrorKind::Config, where + ": not a non-negative integer: '" + s + "'");
  }
  return std::stoull(s);
}

}  // namespace

std::vector<CurveRow> parse_results_csv(std::string_view text) {
  std::vector<CurveRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "agent,seed,episode,train_reward,eval_reward") {
        fail(ErrorKind::Config, "results csv: unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::string where = "results csv line " + std::to_string(line_no);
    const auto f = split_csv_line(line);
    if (f.size() != 5) fail(ErrorKind::Config, where + ": expected 5 fields");
    CurveRow row;
    row.agent = f[0];
    row.seed = parse_count(f[1], where);
    row.episode = parse_count(f[2], where);
    row.train_reward = parse_real(f[3], where);
    if (!f[4].empty()) row.eval_reward = parse_real(f[4], where);
    rows.push_back(std::move(row));
  }
  if (line_no == 0) fail(ErrorKind::Config, "results csv: missing header");
  return rows;
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["v"] = 1;
  j["name"] = cfg.label();
  j["agent"] = to_string(cfg.agent);
  j["episodes"] = cfg.episodes;
  j["seeds"] = cfg.seeds;
  j["eval_every"] = cfg.eval_every;
  j["threads"] = cfg.threads;
  j["env"] = to_json(cfg.env);
  j["params"] = to_json(cfg.params);
  j["approx"] = to_json(cfg.approx);
  return j;
}

Json to_json(const SeedResult& r) {
  Json eval = Json::array();
  for (const auto& v : r.eval_curve) eval.push_back(v ? Json(*v) : Json(nullptr));
  Json policy = Json::array();
  for (AdaptationAction a : r.final_policy) policy.push_back(to_string(a));
  Json j;
  j["seed"] = r.seed;
  j["train_curve"] = r.train_curve;
  j["eval_curve"] = eval;
  Json agreement = Json::array();
  for (const auto& v : r.agreement_curve) agreement.push_back(v ? Json(*v) : Json(nullptr));
  j["agreement_curve"] = agreement;
  j["final_eval"] = r.final_eval ? Json(*r.final_eval) : Json(nullptr);
  j["component_means"] = criteria_to_json(r.component_means);
  j["final_policy"] = policy;
  j["oracle_agreement"] = r.oracle_agreement ? Json(*r.oracle_agreement) : Json(nullptr);
  j["diverged"] = r.diverged;
  j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const ExperimentResult& r) {
  Json seeds = Json::array();
  for (const SeedResult& s : r.seeds) seeds.push_back(to_json(s));
  Json j;
  j["v"] = 1;
  j["config"] = to_json(r.config);
  j["partial"] = r.partial;
  j["wall_seconds"] = r.wall_seconds;
  j["seeds"] = seeds;
  return j;
}

Json to_json(const ComparisonReport& r) {
  Json agents = Json::array();
  for (const AgentSummary& a : r.agents) {
    Json proxies;
    for (std::size_t k = 0; k < kNumCriteria; ++k) {
      proxies[std::string(to_string(static_cast<Criterion>(k)))] = a.component_means[k];
    }
    Json j;
    j["name"] = a.name;
    j["agent"] = to_string(a.agent);
    j["aulc"] = a.aulc;
    j["final_eval_mean"] = a.final_eval_mean;
    j["final_eval_sd"] = a.final_eval_sd;
    j["oracle_agreement"] = a.oracle_agreement;
    j["component_means_proxy"] = proxies;
    j["partial"] = a.partial;
    j["mean_curve"] = a.mean_curve;
    j["sd_curve"] = a.sd_curve;
    agents.push_back(j);
  }
  Json ranking = Json::array();
  for (std::size_t i : r.ranking) ranking.push_back(r.agents[i].name);
  Json results = Json::array();
  for (const ExperimentResult& res : r.results) results.push_back(to_json(res));
  Json j;
  j["v"] = 1;
  j["ranking"] = ranking;
  j["agents"] = agents;
  j["agreement"] = r.agreement;
  j["results"] = results;
  return j;
}

namespace {

void read_shared(ObjectReader& r, ExperimentConfig& cfg) {
  if (const Json* v = r.find("v")) {
    if (*v != 1) fail(ErrorKind::Config, r.field("v") + ": unsupported config version");
  }
  r.integer("episodes", cfg.episodes);
  if (const Json* v = r.find("seeds")) {
    if (!v->is_array()) fail(ErrorKind::Config, r.field("seeds") + ": expected an array");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number_unsigned()) {
        fail(ErrorKind::Config,
             r.field("seeds") + "[" + std::to_string(i) + "]: expected a non-negative integer");
      }
      cfg.seeds.push_back((*v)[i].get<std::uint64_t>());
    }
  }
  r.integer("eval_every", cfg.eval_every);
  r.integer("threads", cfg.threads);
  if (const Json* v = r.find("env")) cfg.env = env_config_from_json(*v, r.field("env"));
}

void read_agent(ObjectReader& r, ExperimentConfig& cfg) {
  r.string("name", cfg.name);
  r.enumeration("agent", cfg.agent);
  if (const Json* v = r.find("params")) cfg.params = params_from_json(*v, r.field("params"));
  if (const Json* v = r.find("approx")) cfg.approx = approx_config_from_json(*v, r.field("approx"));
}

void check(const ExperimentConfig& cfg, const std::string& path) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const Json& j, const std::string& path) {
  ExperimentConfig cfg;
  {
    ObjectReader r(j, path);
    read_shared(r, cfg);
    read_agent(r, cfg);
  }
  check(cfg, path);
  return cfg;
}

std::vector<ExperimentConfig> compare_config_from_json(const Json& j, const std::string& path) {
  ExperimentConfig shared;
  std::vector<ExperimentConfig> out;
  {
    ObjectReader r(j, path);
    read_shared(r, shared);
    const Json& agents = r.require("agents");
    if (!agents.is_array()) fail(ErrorKind::Config, r.field("agents") + ": expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      ExperimentConfig cfg = shared;
      ObjectReader a(agents[i], r.field("agents") + "[" + std::to_string(i) + "]");
      read_agent(a, cfg);
      out.push_back(std::move(cfg));
    }
  }
  if (out.size() < 2) fail(ErrorKind::Config, path + ".agents: need at least two agents");
  for (std::size_t i = 0; i < out.size(); ++i) {
    check(out[i], path + ".agents[" + std::to_string(i) + "]");
  }
  return out;
}

ExperimentResult experiment_result_from_json(const Json& j, const std::string& path) {
  ExperimentResult out;
  ObjectReader r(j, path);
  r.find("v");
  out.config = experiment_config_from_json(r.require("config"), r.field("config"));
  r.boolean("partial", out.partial);
  r.real("wall_seconds", out.wall_seconds);
  const Json& seeds = r.require("seeds");
  if (!seeds.is_array()) fail(ErrorKind::Config, r.field("seeds") + ": expected an array");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string where = r.field("seeds") + "[" + std::to_string(i) + "]";
    ObjectReader sr(seeds[i], where);
    SeedResult s;
    sr.integer("seed", s.seed);
    if (const Json* v = sr.find("train_curve")) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        s.train_curve.push_back(
            ObjectReader::as_real((*v)[k], sr.field("train_curve") + "[" + std::to_string(k) + "]"));
      }
    }
    if (const Json* v = sr.find("eval_curve")) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        if ((*v)[k].is_null()) {
          s.eval_curve.emplace_back();
        } else {
          s.eval_curve.emplace_back(ObjectReader::as_real(
              (*v)[k], sr.field("eval_curve") + "[" + std::to_string(k) + "]"));
        }
      }
    }
    if (const Json* v = sr.find("agreement_curve")) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        if ((*v)[k].is_null()) {
          s.agreement_curve.emplace_back();
        } else {
          s.agreement_curve.emplace_back(ObjectReader::as_real(
              (*v)[k], sr.field("agreement_curve") + "[" + std::to_string(k) + "]"));
        }
      }
    }
    if (const Json* v = sr.find("final_eval")) {
      s.final_eval = ObjectReader::as_real(*v, sr.field("final_eval"));
    }
    if (const Json* v = sr.find("component_means")) {
      s.component_means = criteria_from_json(*v, sr.field("component_means"));
    }
    if (const Json* v = sr.find("final_policy")) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        s.final_policy.push_back(ObjectReader::as_enum<AdaptationAction>(
            (*v)[k], sr.field("final_policy") + "[" + std::to_string(k) + "]"));
      }
    }
    if (const Json* v = sr.find("oracle_agreement")) {
      s.oracle_agreement = ObjectReader::as_real(*v, sr.field("oracle_agreement"));
    }
    sr.boolean("diverged", s.diverged);
    sr.string("diagnostic", s.diagnostic);
    out.seeds.push_back(std::move(s));
  }
  return out;
}

std::filesystem::path export_results(const std::vector<ExperimentResult>& results,
                                     const std::filesystem::path& dir, std::string_view stem,
                                     ExportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  const bool csv = format == ExportFormat::Csv;
  const std::filesystem::path path = dir / (std::string(stem) + (csv ? ".csv" : ".json"));
  if (csv) {
    write_text_file(path, results_to_csv(results));
  } else {
    Json arr = Json::array();
    for (const ExperimentResult& r : results) arr.push_back(to_json(r));
    Json doc;
    doc["v"] = 1;
    doc["results"] = arr;
    write_text_file(path, doc.dump(2) + "\n");
  }
  return path;
}

}  // namespace uiadapt
