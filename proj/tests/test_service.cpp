#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "uiadapt/error.hpp"
#include "uiadapt/service.hpp"

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

ServiceConfig test_config(const char* name) {
  ServiceConfig cfg;
  cfg.trace_dir = fs::temp_directory_path() / "uiadapt_tests" / name;
  fs::remove_all(cfg.trace_dir);
  return cfg;
}

TelemetrySubmission telemetry(const std::string& id, double t = 1.5, double valence = 0.2) {
  return TelemetrySubmission{id, {t, t, t}, {true, true, false}, valence, std::nullopt};
}

}  // namespace

TEST_CASE("creating sessions") {
  SessionManager m(test_config("create"));
  const SessionCreated a = m.create_session({});
  const SessionCreated b = m.create_session({});
  CHECK(a.session_id != b.session_id);
  CHECK(m.live_sessions() == 2);
  CHECK(a.adaptation_parameters.weights == RewardWeights{});
  CHECK(a.adaptation_parameters.horizon == 20);
  CHECK(a.ui.item_count == 6);
  // Without declared preferences c1 drops out and the rest is renormalized.
  const auto& eff = a.adaptation_parameters.effective_weights;
  CHECK(eff[0] == 0.0);
  CHECK(eff[1] == doctest::Approx(1.0 / 3.0));

  SessionRequest with_prefs;
  with_prefs.preferences = PreferenceProfile{};
  CHECK(m.create_session(with_prefs).adaptation_parameters.effective_weights == RewardWeights{});

  SessionRequest only_c1;
  only_c1.weights = RewardWeights::make({1, 0, 0, 0});
  CHECK(kind_of([&] { m.create_session(only_c1); }) == ErrorKind::Validation);
  SessionRequest random_agent;
  random_agent.agent = AgentKind::RandomBaseline;
  CHECK(kind_of([&] { m.create_session(random_agent); }) == ErrorKind::Validation);
  SessionRequest bad_snapshot;
  bad_snapshot.agent_snapshot = "not a table";
  CHECK(kind_of([&] { m.create_session(bad_snapshot); }) == ErrorKind::Validation);
}

TEST_CASE("session state and transcript") {
  SessionManager m(test_config("state"));
  const std::string id = m.create_session({}).session_id;
  CHECK(m.get_session_state(id).step == 0);
  m.submit_telemetry(telemetry(id));
  CHECK(m.get_session_state(id).step == 1);
  CHECK(m.transcript(id).size() == 1);
  CHECK(kind_of([&] { m.get_session_state("s-unknown"); }) == ErrorKind::NotFound);
  CHECK(kind_of([&] { m.submit_telemetry(telemetry("s-unknown")); }) == ErrorKind::NotFound);
  CHECK(kind_of([&] { m.close_session("s-unknown"); }) == ErrorKind::NotFound);
}

TEST_CASE("rewards are computed from the submitted telemetry") {
  SessionManager m(test_config("reward"));
  SessionRequest req;
  req.preferences = PreferenceProfile{};
  const std::string id = m.create_session(req).session_id;
  const TimeBounds tb = time_bounds(HciCoefficients{}, PlatformState{}, 6);

  TelemetrySubmission fast{id, {tb.t_min, tb.t_min, tb.t_min}, {true, true, true}, 0.6, 0.9};
  const AdaptationDecision d = m.submit_telemetry(fast);
  CHECK(d.reward.c[1] == doctest::Approx(1.0));
  CHECK(d.reward.c[2] == 1.0);
  CHECK(d.reward.c[3] == doctest::Approx(emotion_score(0.6)));
  // Start UI Grid/Light/Default against List/Big with Light at ambient 0.9.
  CHECK(d.reward.c[0] == doctest::Approx(1.0 / 3.0));
  const Criteria c{1.0 / 3.0, 1.0, 1.0, emotion_score(0.6)};
  CHECK(d.reward.total == doctest::Approx(compute_reward(c, RewardWeights{}).total));

  TelemetrySubmission bad = fast;
  bad.successes.pop_back();
  CHECK(kind_of([&] { m.submit_telemetry(bad); }) == ErrorKind::Validation);
  bad = fast;
  bad.ambient_hint = 3.0;
  CHECK(kind_of([&] { m.submit_telemetry(bad); }) == ErrorKind::Validation);
}

TEST_CASE("decisions") {
  SessionManager m(test_config("decisions"));
  SessionRequest req;
  req.horizon = 4;
  req.seed = 11;
  const std::string id = m.create_session(req).session_id;
  UiConfig ui = m.get_session_state(id).ui;
  for (std::size_t i = 1; i <= 4; ++i) {
    const AdaptationDecision d = m.submit_telemetry(telemetry(id));
    CHECK(d.step == i);
    CHECK(d.ui == apply_action(ui, d.action));
    CHECK(d.transition_hint == "apply_between_tasks");
    CHECK_FALSE(d.explanation.text.empty());
    CHECK(d.explanation.component_attribution[0] == 0.0);
    if (d.action == AdaptationAction::NoAdapt) CHECK(d.ui == ui);
    CHECK(d.final == (i == 4));
    CHECK(d.summary.has_value() == (i == 4));
    ui = d.ui;
  }
  CHECK(m.get_session_state(id).finished);
  CHECK(kind_of([&] { m.submit_telemetry(telemetry(id)); }) == ErrorKind::SessionFinished);
}

TEST_CASE("closing writes a trace the export reader accepts") {
  const ServiceConfig cfg = test_config("close");
  SessionManager m(cfg);
  const std::string id = m.create_session({}).session_id;
  for (int i = 0; i < 5; ++i) m.submit_telemetry(telemetry(id, 1.0 + 0.2 * i));
  const SessionSummary s = m.close_session(id);
  CHECK(s.steps == 5);
  std::size_t total = 0;
  for (std::size_t n : s.action_histogram) total += n;
  CHECK(total == s.steps);
  CHECK(m.live_sessions() == 0);
  CHECK(kind_of([&] { m.get_session_state(id); }) == ErrorKind::NotFound);
  CHECK(kind_of([&] { m.close_session(id); }) == ErrorKind::NotFound);

  const auto records = read_traces(s.trace_path);
  REQUIRE(records.size() == 5);
  const auto transcript_rewards = [&] {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.reward.total);
    return out;
  }();
  double mean = 0.0;
  for (double r : transcript_rewards) mean += r / 5.0;
  CHECK(s.mean_reward == doctest::Approx(mean));
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].source == "session:" + id);
    CHECK(records[i].step == i);
  }
  CHECK(records[1].explanation.has_value());
  CHECK_FALSE(records[0].explanation.has_value());
}

TEST_CASE("a snapshot-loaded session acts greedily on the snapshot") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QTable table(108, 0.0);
  for (StateIndex s = 0; s < 108; ++s) {
    for (AdaptationAction a : action_set()) table.value(s, a) = u(g);
  }
  std::ostringstream snap;
  save_snapshot(table, snap);

  SessionManager m(test_config("snapshot"));
  SessionRequest req;
  req.agent_snapshot = snap.str();
  LearningParams p;
  p.epsilon_start = 1e-12;
  p.epsilon_end = 0.0;
  req.params = p;
  req.seed = 3;
  const SessionCreated c = m.create_session(req);

  TelemetrySubmission sub = telemetry(c.session_id, 1.2, -0.5);
  sub.ambient_hint = 0.6;
  const AdaptationDecision d = m.submit_telemetry(sub);

  ContextState ctx;
  ctx.ui = c.ui;
  ctx.actor.emotion_valence = -0.5;
  ctx.environment.ambient_brightness = 0.6;
  const StateIndex s = encode_state(ctx, Discretization{});
  CHECK(d.action == greedy_policy(table)[s]);

  SessionRequest wrong;
  wrong.agent_snapshot = [] {
    std::ostringstream o;
    save_snapshot(QTable(3, 0.0), o);
    return o.str();
  }();
  CHECK(kind_of([&] { m.create_session(wrong); }) == ErrorKind::Validation);
}

TEST_CASE("replaying a transcript reproduces the rewards") {
  SessionManager m(test_config("replay"));
  SessionRequest req;
  req.seed = 21;
  req.preferences = PreferenceProfile{};
  const std::string a = m.create_session(req).session_id;
  for (int i = 0; i < 6; ++i) {
    TelemetrySubmission t = telemetry(a, 0.9 + 0.3 * i, -0.2 + 0.1 * i);
    t.successes[i % 3] = false;
    m.submit_telemetry(t);
  }
  const auto original = m.transcript(a);
  const std::string b = m.create_session(req).session_id;
  for (const TranscriptEntry& e : original) {
    m.submit_telemetry({b, e.telemetry.task_times, e.telemetry.successes,
                        e.telemetry.reported_valence, std::nullopt});
  }
  const auto replay = m.transcript(b);
  REQUIRE(replay.size() == original.size());
  for (std::size_t i = 0; i < replay.size(); ++i) {
    CHECK(replay[i].reward.c == original[i].reward.c);
    CHECK(replay[i].reward.total == original[i].reward.total);
    CHECK(replay[i].action == original[i].action);
  }
}

TEST_CASE("concurrent sessions do not interfere") {
  SessionManager m(test_config("concurrent"));
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) {
    SessionRequest req;
    req.horizon = 50;
    ids.push_back(m.create_session(req).session_id);
  }
  std::vector<std::thread> workers;
  for (const std::string& id : ids) {
    workers.emplace_back([&m, id] {
      for (int k = 0; k < 50; ++k) m.submit_telemetry(telemetry(id));
    });
  }
  for (auto& w : workers) w.join();
  for (const std::string& id : ids) {
    CHECK(m.get_session_state(id).step == 50);
    CHECK(m.transcript(id).size() == 50);
  }
}

TEST_CASE("wire format") {
  const Json j = parse_json(R"({"v": 1, "horizon": 5, "agent": "Sarsa", "seed": 7,
                               "weights": {"preference": 0.1, "time": 0.3, "success": 0.3,
                                           "emotion": 0.3}})",
                            "inline");
  const SessionRequest r = session_request_from_json(j);
  CHECK(*r.horizon == 5);
  CHECK(*r.agent == AgentKind::Sarsa);
  CHECK(*r.seed == 7);
  CHECK((*r.weights)[0] == 0.1);

  CHECK(kind_of([] { session_request_from_json(Json{{"v", 2}}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { session_request_from_json(Json{{"horizn", 2}}); }) == ErrorKind::Validation);

  const Json t = parse_json(R"({"v": 1, "session_id": "s1", "task_times": [1.0, 2.0],
                               "successes": [true, false], "reported_valence": 0.5,
                               "ambient_hint": 0.3})",
                            "inline");
  const TelemetrySubmission sub = telemetry_submission_from_json(t, "s1");
  CHECK(sub.task_times.size() == 2);
  CHECK(*sub.ambient_hint == 0.3);
  CHECK(kind_of([&] { telemetry_submission_from_json(t, "s2"); }) == ErrorKind::Validation);

  const Json err = error_to_json(Error(ErrorKind::NotFound, "gone"));
  CHECK(err["v"] == 1);
  CHECK(err["error"]["category"] == "not_found");

  CHECK(http_status(ErrorKind::Validation) == 400);
  CHECK(http_status(ErrorKind::NotFound) == 404);
  CHECK(http_status(ErrorKind::SessionFinished) == 409);
  CHECK(http_status(ErrorKind::Io) == 500);

  CHECK(parse_bind_address("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
  CHECK(kind_of([] { parse_bind_address("localhost"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_bind_address("h:99999"); }) == ErrorKind::Config);
}

TEST_CASE("HTTP front end") {
  SessionManager m(test_config("http"));
  HttpService service(m);
  const int port = service.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(5, 0);

  auto health = cli.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto created = cli.Post("/v1/sessions", R"({"v": 1, "horizon": 3, "seed": 1})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const Json cj = Json::parse(created->body);
  CHECK(cj["v"] == 1);
  const std::string id = cj["session_id"];
  const std::string base = "/v1/sessions/" + id;

  // Stream decisions while they are submitted.
  std::string stream;
  std::atomic<bool> stream_done{false};
  std::thread listener([&] {
    httplib::Client sse("127.0.0.1", port);
    sse.set_read_timeout(10, 0);
    sse.Get(base + "/events", [&](const char* data, std::size_t n) {
      stream.append(data, n);
      return true;
    });
    stream_done = true;
  });

  const std::string body =
      R"({"v": 1, "task_times": [1.1, 1.3, 0.9], "successes": [true, true, true], "reported_valence": 0.4})";
  for (int i = 1; i <= 3; ++i) {
    auto r = cli.Post(base + "/telemetry", body, "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const Json d = Json::parse(r->body);
    CHECK(d["step"] == i);
    CHECK(d["explanation"]["component_attribution"].size() == 4);
    CHECK(d["final"] == (i == 3));
  }
  auto finished = cli.Post(base + "/telemetry", body, "application/json");
  REQUIRE(finished);
  CHECK(finished->status == 409);
  CHECK(Json::parse(finished->body)["error"]["category"] == "session_finished");

  auto state = cli.Get(base);
  REQUIRE(state);
  CHECK(Json::parse(state->body)["finished"] == true);

  auto malformed = cli.Post(base + "/telemetry", "{\"task_times\": [", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);

  auto closed = cli.Delete(base);
  REQUIRE(closed);
  CHECK(closed->status == 200);
  const Json summary = Json::parse(closed->body);
  CHECK(summary["steps"] == 3);

  listener.join();
  CHECK(stream_done);
  std::size_t events = 0;
  for (std::size_t p = stream.find("event: decision"); p != std::string::npos;
       p = stream.find("event: decision", p + 1)) {
    ++events;
  }
  CHECK(events == 3);
  CHECK(stream.find("id: 2\n") != std::string::npos);

  auto missing = cli.Get(base);
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body)["error"]["category"] == "not_found");
  auto missing_events = cli.Get(base + "/events");
  REQUIRE(missing_events);
  CHECK(missing_events->status == 404);

  service.stop();
}
