// Command-line front end: train, compare, eval, serve, export-traces.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uiadapt/error.hpp"
#include "uiadapt/harness.hpp"
#include "uiadapt/json_io.hpp"
#include "uiadapt/plot.hpp"
#include "uiadapt/service.hpp"
#include "uiadapt/traces.hpp"

namespace fs = std::filesystem;
using namespace uiadapt;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 3;
    case ErrorKind::Validation: return 4;
    case ErrorKind::Io: return 5;
    case ErrorKind::Domain:
    case ErrorKind::Range: return 6;
    case ErrorKind::Contract: return 7;
    case ErrorKind::Model: return 8;
    case ErrorKind::Divergence: return 9;
    case ErrorKind::EmptyInput: return 10;
    default: return 11;
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", c.config, "JSON config file");
  if (needs_config) opt->required();
  cmd->add_option("--seed", c.seed, "run a single seed instead of the configured list");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--format", c.format, "csv or text")
      ->check(CLI::IsMember({"csv", "text"}))
      ->capture_default_str();
}

ExportFormat format_of(const Common& c) {
  return c.format == "text" ? ExportFormat::Text : ExportFormat::Csv;
}

void print_seed_lines(const ExperimentResult& r) {
  for (const SeedResult& s : r.seeds) {
    if (s.diverged) {
      std::printf("%s seed %llu: diverged (%s)\n", r.config.label().c_str(),
                  static_cast<unsigned long long>(s.seed), s.diagnostic.c_str());
      continue;
    }
    std::printf("%s seed %llu: final eval %.4f, oracle agreement %.3f\n",
                r.config.label().c_str(), static_cast<unsigned long long>(s.seed),
                s.final_eval.value_or(0.0), s.oracle_agreement.value_or(0.0));
  }
}

void write_snapshots(const ExperimentResult& r, const fs::path& dir) {
  for (const SeedResult& s : r.seeds) {
    if (s.snapshot.empty()) continue;
    const char* ext = r.config.agent == AgentKind::Approx ? ".approx" : ".qtable";
    write_text_file(dir / ("policy_seed" + std::to_string(s.seed) + ext), s.snapshot);
  }
}

void train_one(ExperimentConfig cfg, const Common& c, const fs::path& dir) {
  if (c.seed) cfg.seeds = {*c.seed};
  const ExperimentResult r = run_experiment(cfg);
  const fs::path results = export_results({r}, dir, "results", format_of(c));
  write_snapshots(r, dir);
  std::string curve_note;
  try {
    render_learning_curve(r, dir / "learning_curve.svg");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyInput) throw;
    curve_note = " (no curve: every seed diverged)";
  }
  print_seed_lines(r);
  std::printf("wrote %s%s\n", results.string().c_str(), curve_note.c_str());
  if (r.partial) std::printf("result is partial: some seeds diverged\n");
}

int run_train(const Common& c, const std::string& cohort) {
  ExperimentConfig cfg = experiment_config_from_json(read_json_file(c.config), "experiment");
  if (cohort.empty()) {
    train_one(cfg, c, c.out);
    return 0;
  }
  for (const SimUserProfile& p : cohort_from_json(read_json_file(cohort), "cohort")) {
    ExperimentConfig one = cfg;
    one.env.profile = p;
    one.name = cfg.label() + "/" + p.name;
    std::printf("profile %s\n", p.name.c_str());
    train_one(one, c, fs::path(c.out) / p.name);
  }
  return 0;
}

int run_compare(const Common& c) {
  std::vector<ExperimentConfig> cfgs =
      compare_config_from_json(read_json_file(c.config), "compare");
  if (c.seed) {
    for (auto& cfg : cfgs) cfg.seeds = {*c.seed};
  }
  const ComparisonReport report = compare_agents(cfgs);
  const fs::path results = export_results(report.results, c.out, "results", format_of(c));
  write_text_file(fs::path(c.out) / "report.json", to_json(report).dump(2) + "\n");
  render_learning_curve(report, fs::path(c.out) / "learning_curves.svg");

  std::printf("%-4s %-20s %10s %12s %10s %8s\n", "rank", "agent", "AULC", "final eval",
              "sd", "oracle");
  for (std::size_t k = 0; k < report.ranking.size(); ++k) {
    const AgentSummary& a = report.agents[report.ranking[k]];
    std::printf("%-4zu %-20s %10.4f %12.4f %10.4f %8.3f%s\n", k + 1, a.name.c_str(), a.aulc,
                a.final_eval_mean, a.final_eval_sd, a.oracle_agreement,
                a.partial ? "  (partial)" : "");
  }
  std::printf("engagement/satisfaction proxies (mean c1..c4 during training):\n");
  for (const AgentSummary& a : report.agents) {
    std::printf("  %-20s preference %.3f time %.3f success %.3f emotion %.3f\n", a.name.c_str(),
                a.component_means[0], a.component_means[1], a.component_means[2],
                a.component_means[3]);
  }
  std::printf("wrote %s\n", results.string().c_str());
  return 0;
}

int run_eval(const Common& c, const std::string& snapshot_path) {
  const ExperimentConfig cfg = experiment_config_from_json(read_json_file(c.config), "experiment");
  const std::string text = read_text_file(snapshot_path);
  std::istringstream in(text);
  PolicyFn policy;
  if (text.rfind("uiadapt-approx", 0) == 0) {
    auto agent = std::make_shared<ApproxAgent>(load_approx(in));
    if (!(agent->discretization() == cfg.env.discretization)) {
      fail(ErrorKind::Config, snapshot_path + ": discretization differs from the config's env");
    }
    policy = [agent](StateIndex s, const ContextState&) { return greedy_action(agent->predict(s)); };
  } else {
    auto table = std::make_shared<QTable>(load_qtable(in));
    if (table->num_states() != cfg.env.discretization.state_count()) {
      fail(ErrorKind::Config, snapshot_path + ": state count differs from the config's env");
    }
    policy = [table](StateIndex s, const ContextState&) { return greedy_action(table->row(s)); };
  }
  std::vector<TraceRecord> traces;
  const double mean = evaluate_policy(cfg.env, policy, &traces);
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / "eval_traces.jsonl";
  TraceWriter writer(path, false);
  for (const TraceRecord& r : traces) writer.write(r);
  writer.flush();
  std::printf("mean greedy reward %.6f over %zu steps\nwrote %s\n", mean, traces.size(),
              path.string().c_str());
  return 0;
}

HttpService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int run_serve(std::string host, int port, bool port_given, const std::string& trace_dir) {
  if (const char* bind = std::getenv("UIADAPT_BIND"); bind && !port_given) {
    std::tie(host, port) = parse_bind_address(bind);
  }
  ServiceConfig sc;
  sc.trace_dir = trace_dir;
  SessionManager manager(sc);
  HttpService service(manager);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("serving on %s:%d\n", host.c_str(), port);
  std::fflush(stdout);
  service.listen(host, port);
  g_service = nullptr;
  return 0;
}

int run_export_traces(const std::vector<std::string>& inputs, const Common& c) {
  std::vector<TraceRecord> all;
  for (const std::string& in : inputs) {
    auto records = read_traces(in);
    all.insert(all.end(), records.begin(), records.end());
  }
  fs::create_directories(c.out);
  fs::path path;
  if (format_of(c) == ExportFormat::Csv) {
    path = fs::path(c.out) / "traces.csv";
    write_text_file(path, traces_to_csv(all));
  } else {
    path = fs::path(c.out) / "traces.jsonl";
    std::string text;
    for (const TraceRecord& r : all) text += trace_line(r) + "\n";
    write_text_file(path, text);
  }
  std::printf("%zu records\nwrote %s\n", all.size(), path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement-learning UI adaptation: training, comparison and live sessions"};
  app.require_subcommand(1);

  Common train_c, compare_c, eval_c, export_c;
  std::string cohort, snapshot, trace_dir = "traces", host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> inputs;

  auto* train = app.add_subcommand("train", "train one agent over its seeds");
  add_common(train, train_c);
  train->add_option("--cohort", cohort, "cohort file: train once per named profile");

  auto* compare = app.add_subcommand("compare", "train several agents on one env and rank them");
  add_common(compare, compare_c);

  auto* eval = app.add_subcommand("eval", "greedy rollouts of a saved policy on frozen contexts");
  add_common(eval, eval_c);
  eval->add_option("--snapshot", snapshot, "Q-table or approximator snapshot")->required();

  auto* serve = app.add_subcommand("serve", "run the live session service");
  auto* port_opt = serve->add_option("--port", port, "TCP port (default 8080)");
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--trace-dir", trace_dir, "where closed sessions write traces")
      ->capture_default_str();

  auto* exp = app.add_subcommand("export-traces", "validate trace logs and convert them");
  exp->add_option("--input", inputs, "trace log(s), one JSON object per line")->required();
  add_common(exp, export_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage_error: %s\n", e.what());
    return 2;
  }

  try {
    if (*train) return run_train(train_c, cohort);
    if (*compare) return run_compare(compare_c);
    if (*eval) return run_eval(eval_c, snapshot);
    if (*serve) return run_serve(host, port, port_opt->count() > 0, trace_dir);
    if (*exp) return run_export_traces(inputs, export_c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: io_error: %s\n", e.what());
    return exit_code(ErrorKind::Io);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal_error: %s\n", e.what());
    return 1;
  }
  return 0;
}
