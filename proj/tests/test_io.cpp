#include <filesystem>

#include "doctest.h"
#include "uiadapt/error.hpp"
#include "uiadapt/json_io.hpp"
#include "uiadapt/traces.hpp"

using namespace uiadapt;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

fs::path scratch_dir(const char* name) {
  const fs::path p = fs::temp_directory_path() / "uiadapt_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<TraceRecord> sample_traces() {
  EnvConfig cfg;
  UiAdaptationEnv env(cfg);
  std::vector<TraceRecord> out;
  StateIndex s = env.reset(7).observation;
  while (!env.done()) {
    const StepResult r = env.step(action_at(env.step_count() % 8));
    out.push_back(make_trace_record("env", 0, s, r, env.step_count() - 1));
    s = r.observation;
  }
  const RewardModel model(cfg);
  const std::array<double, 8> q{0, 1, 0, 0, 0, 0, 0, 0};
  out[3].explanation = explain(q, out[3].context, AdaptationAction::SetLayoutList, model);
  return out;
}

}  // namespace

TEST_CASE("json parsing allows comments and reports syntax errors") {
  const Json j = parse_json("{ // note\n \"a\": 1 /* block */ }", "inline");
  CHECK(j["a"] == 1);
  CHECK(kind_of([] { parse_json("{\"a\": }", "inline"); }) == ErrorKind::Config);
}

TEST_CASE("format_real round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123456789}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("config objects round trip through JSON") {
  EnvConfig cfg;
  cfg.horizon = 7;
  cfg.weights = RewardWeights::make({0.4, 0.3, 0.2, 0.1});
  cfg.initial_ui = UiConfig{Layout::List, Theme::Dark, FontSize::Big, 9};
  cfg.profile.name = "senior";
  cfg.profile.acuity = Acuity::Low;
  cfg.profile.preference.fixed_theme = Theme::Dark;
  cfg.platform.screen_class = ScreenClass::Phone;
  cfg.initial_brightness = 0.25;
  cfg.discretization.tabular_dims.push_back(TabularDim::Location);
  CHECK(env_config_from_json(to_json(cfg)) == cfg);

  const EnvConfig defaults;
  CHECK(env_config_from_json(to_json(defaults)) == defaults);

  LearningParams p;
  p.alpha = 0.3;
  CHECK(params_from_json(to_json(p)) == p);

  ApproxConfig a;
  a.hidden_layer = true;
  CHECK(approx_config_from_json(to_json(a)) == a);

  ContextState ctx;
  ctx.actor.emotion_valence = -0.4;
  CHECK(context_from_json(to_json(ctx)) == ctx);
}

TEST_CASE("unknown and ill-typed fields are rejected with their path") {
  Json j = to_json(LearningParams{});
  j["alpah"] = 0.2;
  try {
    params_from_json(j);
    FAIL("accepted a misspelled key");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("params.alpah") != std::string::npos);
  }
  Json w = to_json(RewardWeights{});
  w["time"] = "fast";
  CHECK(kind_of([&] { weights_from_json(w); }) == ErrorKind::Config);
  Json ui = to_json(UiConfig{});
  ui["layout"] = "Carousel";
  CHECK_THROWS_AS(ui_from_json(ui), Error);
}

TEST_CASE("trace records round trip") {
  const auto traces = sample_traces();
  std::string text;
  for (const TraceRecord& r : traces) {
    const std::string line = trace_line(r);
    CHECK(line.find('\n') == std::string::npos);
    text += line + "\n\n";
  }
  const auto back = parse_traces(text, "memory");
  REQUIRE(back.size() == traces.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(trace_line(back[i]) == trace_line(traces[i]));
    CHECK(back[i].reward.total == traces[i].reward.total);
    CHECK(back[i].telemetry.task_times == traces[i].telemetry.task_times);
  }
  CHECK(back[3].explanation.has_value());
  CHECK(back.back().done);
}

TEST_CASE("trace parse errors carry the line number") {
  const auto traces = sample_traces();
  const std::string text = trace_line(traces[0]) + "\n{\"v\": 1}\n";
  try {
    parse_traces(text, "log.jsonl");
    FAIL("accepted an incomplete record");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("log.jsonl:2") != std::string::npos);
  }
  Json j = trace_to_json(traces[0]);
  j["v"] = 2;
  CHECK_THROWS_AS(trace_from_json(j), Error);
}

TEST_CASE("trace writer and reader") {
  const fs::path dir = scratch_dir("traces");
  const auto traces = sample_traces();
  {
    TraceWriter w(dir / "a.jsonl", false);
    for (const auto& r : traces) w.write(r);
  }
  CHECK(read_traces(dir / "a.jsonl").size() == traces.size());
  CHECK(kind_of([&] { read_traces(dir / "missing.jsonl"); }) == ErrorKind::Io);
}

TEST_CASE("trace CSV") {
  const auto traces = sample_traces();
  const std::string csv = traces_to_csv(traces);
  const std::string header =
      "source,episode,step,state,action,c_preference,c_time,c_success,c_emotion,reward,"
      "next_state,done,layout,theme,font_size,ambient_brightness,location,emotion_valence\n";
  CHECK(csv.rfind(header, 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == traces.size() + 1);
  CHECK(traces_to_csv({}) == header);
}
