#include <algorithm>
#include <filesystem>
#include <regex>
#include <stack>

#include "doctest.h"
#include "uiadapt/error.hpp"
#include "uiadapt/harness.hpp"
#include "uiadapt/plot.hpp"

using namespace uiadapt;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(AgentKind kind, std::size_t episodes = 40) {
  ExperimentConfig cfg;
  cfg.agent = kind;
  cfg.episodes = episodes;
  cfg.seeds = {0, 1, 2};
  cfg.eval_every = 10;
  return cfg;
}

std::string stable_json(const ExperimentResult& r) {
  Json j = to_json(r);
  j.erase("wall_seconds");
  j["config"].erase("threads");
  return j.dump();
}

// Checks that every tag is closed in order. Enough for the generated SVG,
// which has no CDATA, comments or entities beyond the escaped basics.
bool well_formed(const std::string& xml) {
  std::stack<std::string> open;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?') continue;
    if (tag[0] == '/') {
      if (open.empty() || open.top() != tag.substr(1)) return false;
      open.pop();
      continue;
    }
    if (tag.back() == '/') continue;
    open.push(tag.substr(0, tag.find(' ')));
  }
  return open.empty();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("one episode, one seed") {
  ExperimentConfig cfg = small(AgentKind::QLearning, 1);
  cfg.seeds = {4};
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.seeds.size() == 1);
  CHECK(r.seeds[0].train_curve.size() == 1);
  CHECK(r.seeds[0].eval_curve.size() == 1);
  CHECK(r.seeds[0].eval_curve[0].has_value());
  CHECK(r.seeds[0].final_policy.size() == 108);
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  for (AgentKind k : {AgentKind::QLearning, AgentKind::Sarsa, AgentKind::ExpectedSarsa,
                      AgentKind::Approx, AgentKind::RandomBaseline, AgentKind::OracleBaseline}) {
    ExperimentConfig cfg = small(k, 20);
    cfg.threads = 1;
    const std::string a = stable_json(run_experiment(cfg));
    cfg.threads = 3;
    const std::string b = stable_json(run_experiment(cfg));
    CHECK(a == b);
  }
}

TEST_CASE("evaluation schedule") {
  ExperimentConfig cfg = small(AgentKind::QLearning, 25);
  const SeedResult s = run_seed(cfg, 0);
  for (std::size_t e = 0; e < 25; ++e) {
    const bool expect = (e + 1) % 10 == 0 || e == 24;
    CHECK(s.eval_curve[e].has_value() == expect);
    CHECK(s.agreement_curve[e].has_value() == expect);
  }
  CHECK(s.final_eval == s.eval_curve.back());
  CHECK(s.oracle_agreement == s.agreement_curve.back());
  for (double c : s.component_means) {
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("learners beat the random baseline on the default env") {
  ExperimentConfig q = small(AgentKind::QLearning, 500);
  ExperimentConfig r = small(AgentKind::RandomBaseline, 500);
  const ComparisonReport rep = compare_agents({q, r});
  CHECK(rep.agents.size() == 2);
  CHECK(rep.agents[0].final_eval_mean >= rep.agents[1].final_eval_mean);
  CHECK(rep.ranking.front() == 0);
}

TEST_CASE("oracle baseline recovers the optimal policy on the frozen env") {
  ExperimentConfig cfg = small(AgentKind::OracleBaseline, 10);
  cfg.env = EnvConfig::frozen_default();
  const ExperimentResult r = run_experiment(cfg);
  for (const SeedResult& s : r.seeds) CHECK(*s.oracle_agreement == 1.0);
}

TEST_CASE("Q-learning and SARSA settle on nearly the same frozen-env policy") {
  ExperimentConfig q = small(AgentKind::QLearning, 2000);
  q.env = EnvConfig::frozen_default();
  q.seeds = {0, 1, 2, 3, 4};
  ExperimentConfig s = q;
  s.agent = AgentKind::Sarsa;
  const ComparisonReport rep = compare_agents({q, s});
  CHECK(rep.agents[0].oracle_agreement >= 0.85);
  CHECK(rep.agents[1].oracle_agreement >= 0.85);

  // Pairwise agreement on the 12 states the frozen MDP can reach.
  const FrozenMdp fm = enumerate_mdp(q.env);
  double same = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    for (StateIndex st : fm.tabular_index) {
      same += rep.results[0].seeds[k].final_policy[st] == rep.results[1].seeds[k].final_policy[st];
    }
  }
  CHECK(same / (5.0 * 12.0) >= 0.75);
}

TEST_CASE("comparison report") {
  const ExperimentConfig a = small(AgentKind::ExpectedSarsa, 30);
  ExperimentConfig b = a;
  b.name = "again";
  const ComparisonReport rep = compare_agents({a, b});
  CHECK(rep.agents.size() == 2);
  CHECK(rep.agents[0].mean_curve == rep.agents[1].mean_curve);
  CHECK(rep.agreement[0][1] == 1.0);
  CHECK(rep.agreement[1][0] == 1.0);

  CHECK_THROWS_AS(compare_agents({a}), Error);
  ExperimentConfig other_env = a;
  other_env.env.horizon = 5;
  try {
    compare_agents({a, other_env});
    FAIL("accepted different envs");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("aggregation ignores the order of seeds") {
  ExperimentConfig fwd = small(AgentKind::Sarsa, 20);
  ExperimentConfig rev = fwd;
  std::reverse(rev.seeds.begin(), rev.seeds.end());
  const ComparisonReport a = summarize({run_experiment(fwd)});
  const ComparisonReport b = summarize({run_experiment(rev)});
  CHECK(a.agents[0].mean_curve == b.agents[0].mean_curve);
  CHECK(a.agents[0].sd_curve == b.agents[0].sd_curve);
  CHECK(a.agents[0].final_eval_mean == b.agents[0].final_eval_mean);
}

TEST_CASE("divergence aborts the seed and marks the result partial") {
  ExperimentConfig cfg = small(AgentKind::Approx, 5);
  cfg.approx.step_size = 1e300;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.partial);
  for (const SeedResult& s : r.seeds) {
    CHECK(s.diverged);
    CHECK(s.diagnostic.find("diverged") != std::string::npos);
  }
  CHECK_THROWS_AS(render_learning_curve_svg(curve_series(r)), Error);
}

TEST_CASE("CSV export") {
  const ExperimentResult r = run_experiment(small(AgentKind::QLearning, 15));
  const std::string csv = results_to_csv({r});
  CHECK(csv == results_to_csv({r}));
  CHECK(csv.rfind("agent,seed,episode,train_reward,eval_reward\n", 0) == 0);
  CHECK(parse_results_csv(csv) == curve_rows({r}));

  ExperimentResult empty = r;
  empty.seeds.clear();
  CHECK(results_to_csv({empty}) == "agent,seed,episode,train_reward,eval_reward\n");
  CHECK(parse_results_csv(results_to_csv({empty})).empty());

  CHECK_THROWS_AS(parse_results_csv("agent,seed\nx,1\n"), Error);
}

TEST_CASE("JSON export round trip") {
  const ExperimentResult r = run_experiment(small(AgentKind::Sarsa, 12));
  const ExperimentResult back = experiment_result_from_json(to_json(r));
  CHECK(stable_json(back) == stable_json(r));
  CHECK(curve_rows({back}) == curve_rows({r}));
}

TEST_CASE("export_results writes the requested format") {
  const fs::path dir = fs::temp_directory_path() / "uiadapt_tests" / "export";
  fs::remove_all(dir);
  const ExperimentResult r = run_experiment(small(AgentKind::QLearning, 5));
  const fs::path csv = export_results({r}, dir, "results", ExportFormat::Csv);
  const fs::path txt = export_results({r}, dir, "results", ExportFormat::Text);
  CHECK(csv.filename() == "results.csv");
  CHECK(txt.filename() == "results.json");
  CHECK(read_text_file(csv) == results_to_csv({r}));
  CHECK_NOTHROW(experiment_result_from_json(read_json_file(txt)["results"][0]));
}

TEST_CASE("experiment configs parse from JSON") {
  const Json j = parse_json(R"({
    "v": 1,
    // a short run
    "name": "quick",
    "agent": "ExpectedSarsa",
    "episodes": 50,
    "seeds": [3, 1],
    "params": {"alpha": 0.2}
  })",
                            "inline");
  const ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.label() == "quick");
  CHECK(cfg.agent == AgentKind::ExpectedSarsa);
  CHECK(cfg.episodes == 50);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 1});
  CHECK(cfg.params.alpha == 0.2);
  CHECK(cfg.params.gamma == 0.9);

  Json bad = j;
  bad["episodez"] = 3;
  CHECK_THROWS_AS(experiment_config_from_json(bad), Error);

  const Json c = parse_json(R"({"v": 1, "episodes": 10,
    "agents": [{"agent": "QLearning"}, {"name": "rnd", "agent": "RandomBaseline"}]})",
                            "inline");
  const auto cfgs = compare_config_from_json(c);
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[1].label() == "rnd");
  CHECK(cfgs[1].episodes == 10);
}

TEST_CASE("learning curve SVG") {
  const ExperimentResult one = [] {
    ExperimentConfig cfg = small(AgentKind::QLearning, 10);
    cfg.seeds = {0};
    return run_experiment(cfg);
  }();
  const std::string svg1 = render_learning_curve_svg(curve_series(one));
  CHECK(well_formed(svg1));
  CHECK(count(svg1, "class=\"curve\"") == 1);
  CHECK(count(svg1, "class=\"band\"") == 0);
  CHECK(count(svg1, "class=\"legend-entry\"") == 1);
  CHECK(svg1.find(">episode<") != std::string::npos);
  CHECK(svg1.find(">mean reward<") != std::string::npos);

  const ComparisonReport rep =
      compare_agents({small(AgentKind::QLearning, 10), small(AgentKind::RandomBaseline, 10)});
  const std::string svg2 = render_learning_curve_svg(curve_series(rep));
  CHECK(well_formed(svg2));
  CHECK(count(svg2, "class=\"legend-entry\"") == 2);
  CHECK(count(svg2, "class=\"band\"") == 2);
  CHECK(svg2 == render_learning_curve_svg(curve_series(rep)));

  CHECK(well_formed(render_learning_curve_svg({{"a<b & \"c\"", {0.1, 0.2}, {}}})));
  CHECK_THROWS_AS(render_learning_curve_svg({}), Error);
  CHECK_THROWS_AS(render_learning_curve_svg({{"x", {}, {}}}), Error);
}
