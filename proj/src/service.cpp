#include "uiadapt/service.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "httplib.h"
#include "uiadapt/error.hpp"

namespace uiadapt {

struct SessionManager::Session {
  explicit Session(const EnvConfig& cfg) : model(cfg) {}

  mutable std::mutex mu;
  mutable std::condition_variable cv;
  std::string id;
  AdaptationParameters params;
  Discretization disc;
  RewardModel model;
  std::optional<QTable> table;
  ContextState ctx;
  std::size_t step = 0;
  StateIndex prev_state = 0;
  AdaptationAction prev_action = AdaptationAction::NoAdapt;
  std::optional<Explanation> prev_explanation;
  Rng explore;
  double reward_sum = 0.0;
  std::vector<TranscriptEntry> transcript;
  std::vector<TraceRecord> trace;
  std::vector<Json> events;
  bool closed = false;

  bool finished() const { return step >= params.horizon; }

  SessionSummary summary() const {
    SessionSummary s;
    s.session_id = id;
    s.steps = step;
    s.mean_reward = step ? reward_sum / static_cast<double>(step) : 0.0;
    for (const TranscriptEntry& e : transcript) ++s.action_histogram[action_index(e.action)];
    s.final_valence = ctx.actor.emotion_valence;
    return s;
  }
};

SessionManager::SessionManager(ServiceConfig cfg)
    : cfg_(std::move(cfg)), id_rng_(std::random_device{}()) {
  cfg_.params.validate();
}

SessionManager::~SessionManager() = default;

std::string SessionManager::new_id() {
  std::lock_guard lock(id_mutex_);
  char buf[24];
  std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(id_rng_()));
  return buf;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorKind::NotFound, "no live session '" + id + "'");
  return it->second;
}

std::size_t SessionManager::live_sessions() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

SessionCreated SessionManager::create_session(const SessionRequest& request) {
  AdaptationParameters p;
  p.weights = request.weights.value_or(RewardWeights{});
  p.horizon = request.horizon.value_or(20);
  p.item_count = request.item_count.value_or(6);
  p.agent = request.agent.value_or(AgentKind::QLearning);
  p.params = request.params.value_or(cfg_.params);
  p.preferences = request.preferences;

  if (p.horizon < 1) fail(ErrorKind::Validation, "horizon: must be >= 1");
  if (p.item_count < 1) fail(ErrorKind::Validation, "item_count: must be >= 1");
  if (p.agent != AgentKind::QLearning && p.agent != AgentKind::Sarsa &&
      p.agent != AgentKind::ExpectedSarsa) {
    fail(ErrorKind::Validation, "agent: sessions support QLearning, Sarsa or ExpectedSarsa");
  }
  try {
    p.params.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Validation, std::string("params: ") + e.what());
  }
  if (p.preferences) {
    p.effective_weights = p.weights;
  } else {
    const auto& w = p.weights.values();
    if (w[1] + w[2] + w[3] <= 0.0) {
      fail(ErrorKind::Validation,
           "weights: without declared preferences one of time, success, emotion needs a "
           "positive weight");
    }
    p.effective_weights = RewardWeights::normalized({0.0, w[1], w[2], w[3]});
  }

  EnvConfig model_cfg;
  model_cfg.weights = p.effective_weights;
  model_cfg.item_count = p.item_count;
  model_cfg.platform = request.platform.value_or(cfg_.platform);
  if (p.preferences) model_cfg.profile.preference = *p.preferences;

  auto s = std::make_shared<Session>(model_cfg);
  s->params = p;
  s->disc = model_cfg.discretization;
  if (request.agent_snapshot) {
    std::istringstream in(*request.agent_snapshot);
    try {
      s->table.emplace(load_qtable(in));
    } catch (const Error& e) {
      fail(ErrorKind::Validation, std::string("agent_snapshot: ") + e.what());
    }
    if (s->table->num_states() != s->disc.state_count()) {
      fail(ErrorKind::Validation, "agent_snapshot: has " + std::to_string(s->table->num_states()) +
                                      " states, the session needs " +
                                      std::to_string(s->disc.state_count()));
    }
  } else {
    s->table.emplace(QTable::optimistic(s->disc.state_count(), p.params));
  }
  s->ctx.ui.item_count = p.item_count;
  s->ctx.platform = model_cfg.platform;
  s->prev_state = encode_state(s->ctx, s->disc);

  std::uint64_t seed = 0;
  {
    std::lock_guard lock(id_mutex_);
    seed = request.seed.value_or(id_rng_());
  }
  s->explore = make_stream(seed, "explore");

  {
    std::unique_lock lock(registry_mutex_);
    do {
      s->id = new_id();
    } while (sessions_.count(s->id));
    sessions_.emplace(s->id, s);
  }
  return SessionCreated{s->id, s->ctx.ui, p};
}

AdaptationDecision SessionManager::submit_telemetry(const TelemetrySubmission& sub) {
  const auto s = find(sub.session_id);
  InteractionTelemetry t{sub.task_times, sub.successes, sub.reported_valence};
  try {
    t.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Validation, std::string("telemetry: ") + e.what());
  }
  if (sub.ambient_hint && !(*sub.ambient_hint >= 0.0 && *sub.ambient_hint <= 1.0)) {
    fail(ErrorKind::Validation, "ambient_hint: must lie in [0, 1]");
  }

  std::lock_guard lock(s->mu);
  if (s->closed) fail(ErrorKind::NotFound, "no live session '" + sub.session_id + "'");
  if (s->finished()) {
    fail(ErrorKind::SessionFinished,
         "session '" + s->id + "' reached its horizon of " + std::to_string(s->params.horizon));
  }

  // Reward of the UI the tasks ran on.
  if (sub.ambient_hint) s->ctx.environment.ambient_brightness = *sub.ambient_hint;
  s->ctx.actor.emotion_valence = sub.reported_valence;
  const TimeBounds& tb = s->model.bounds();
  const UsabilityScores u = usability_scores(t, tb.t_min, tb.t_max);
  Criteria c{};
  c[0] = s->params.preferences
             ? preference_similarity(s->ctx.ui, *s->params.preferences, s->ctx.environment)
             : 0.0;
  c[1] = u.time_score;
  c[2] = u.success_rate;
  c[3] = emotion_score(sub.reported_valence);
  const RewardBreakdown reward = compute_reward(c, s->params.effective_weights);

  const StateIndex state = encode_state(s->ctx, s->disc);
  const bool done = s->step + 1 >= s->params.horizon;
  const auto row = s->table->row(state);
  const QVector q_at_choice = [&] {
    QVector v{};
    std::copy(row.begin(), row.end(), v.begin());
    return v;
  }();
  const double eps = s->params.params.epsilon(s->step);
  const AdaptationAction action =
      done ? AdaptationAction::NoAdapt : select_action(q_at_choice, eps, s->explore);

  Transition tr{s->prev_state, s->prev_action, reward.total, state, std::nullopt, done};
  if (!done) tr.a_next = action;
  switch (s->params.agent) {
    case AgentKind::Sarsa:
      sarsa_update(*s->table, tr, s->params.params);
      break;
    case AgentKind::ExpectedSarsa:
      expected_sarsa_update(*s->table, tr, s->params.params, eps);
      break;
    default:
      q_learning_update(*s->table, tr, s->params.params);
  }

  Explanation ex = explain(q_at_choice, s->ctx, action, s->model);
  if (!s->params.preferences) {
    // c1 is not scored in this session, so it cannot justify anything.
    ex.component_attribution[0] = 0.0;
    ex.dominant.reset();
    double best = 1e-12;
    for (std::size_t k = 1; k < kNumCriteria; ++k) {
      if (ex.component_attribution[k] > best) {
        best = ex.component_attribution[k];
        ex.dominant = static_cast<Criterion>(k);
      }
    }
    ex.text = render_explanation(action, ex.dominant, ex.dominant ? best : 0.0, ex.q_margin);
  }

  TraceRecord rec;
  rec.source = "session:" + s->id;
  rec.episode = 0;
  rec.step = s->step;
  rec.state = s->prev_state;
  rec.action = s->prev_action;
  rec.reward = reward;
  rec.next_state = state;
  rec.done = done;
  rec.context = s->ctx;
  rec.ui = s->ctx.ui;
  rec.telemetry = t;
  rec.explanation = s->prev_explanation;
  s->trace.push_back(std::move(rec));
  s->transcript.push_back(TranscriptEntry{t, action, reward, ex});

  s->ctx.ui = apply_action(s->ctx.ui, action);
  s->prev_state = state;
  s->prev_action = action;
  s->prev_explanation = ex;
  s->reward_sum += reward.total;
  ++s->step;

  AdaptationDecision d;
  d.session_id = s->id;
  d.step = s->step;
  d.action = action;
  d.ui = s->ctx.ui;
  d.reward = reward;
  d.explanation = std::move(ex);
  d.final = done;
  if (done) d.summary = s->summary();
  s->events.push_back(to_json(d));
  s->cv.notify_all();
  return d;
}

SessionState SessionManager::get_session_state(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mu);
  return SessionState{s->id, s->ctx.ui, s->step, s->params.horizon, s->transcript.size(),
                      s->finished()};
}

std::vector<TranscriptEntry> SessionManager::transcript(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mu);
  return s->transcript;
}

SessionSummary SessionManager::close_session(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::unique_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorKind::NotFound, "no live session '" + id + "'");
    s = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(s->mu);
  s->closed = true;
  s->cv.notify_all();

  SessionSummary summary = s->summary();
  std::error_code ec;
  std::filesystem::create_directories(cfg_.trace_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + cfg_.trace_dir.string() + ": " + ec.message());
  const std::filesystem::path path = cfg_.trace_dir / (s->id + ".jsonl");
  std::string text;
  for (const TraceRecord& r : s->trace) text += trace_line(r) + "\n";
  write_text_file(path, text);
  summary.trace_path = path.string();
  return summary;
}

std::optional<std::vector<Json>> SessionManager::events(const std::string& id, std::size_t from,
                                                        std::chrono::milliseconds wait) const {
  std::shared_ptr<Session> s;
  try {
    s = find(id);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::unique_lock lock(s->mu);
  s->cv.wait_for(lock, wait, [&] { return s->closed || s->events.size() > from; });
  if (s->closed && s->events.size() <= from) return std::nullopt;
  std::vector<Json> out;
  for (std::size_t i = from; i < s->events.size(); ++i) out.push_back(s->events[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

namespace {

void check_version(ObjectReader& r) {
  if (const Json* v = r.find("v")) {
    if (*v != 1) fail(ErrorKind::Validation, r.field("v") + ": unsupported version");
  }
}

// Parse failures in a request are the client's fault.
template <class F>
auto as_validation(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) fail(ErrorKind::Validation, e.what());
    throw;
  }
}

}  // namespace

SessionRequest session_request_from_json(const Json& j) {
  return as_validation([&] {
    SessionRequest req;
    ObjectReader r(j, "request");
    check_version(r);
    if (const Json* v = r.find("weights")) req.weights = weights_from_json(*v, "weights");
    if (const Json* v = r.find("agent_snapshot")) {
      if (!v->is_string()) fail(ErrorKind::Validation, "agent_snapshot: expected snapshot text");
      req.agent_snapshot = v->get<std::string>();
    }
    if (r.find("horizon")) {
      std::size_t h = 0;
      r.integer("horizon", h);
      req.horizon = h;
    }
    if (r.find("item_count")) {
      int n = 0;
      r.integer("item_count", n);
      req.item_count = n;
    }
    if (const Json* v = r.find("preferences")) {
      req.preferences = preference_from_json(*v, "preferences");
    }
    if (const Json* v = r.find("params")) req.params = params_from_json(*v, "params");
    if (const Json* v = r.find("agent")) req.agent = ObjectReader::as_enum<AgentKind>(*v, "agent");
    if (const Json* v = r.find("platform")) req.platform = platform_from_json(*v, "platform");
    if (r.find("seed")) {
      std::uint64_t seed = 0;
      r.integer("seed", seed);
      req.seed = seed;
    }
    return req;
  });
}

TelemetrySubmission telemetry_submission_from_json(const Json& j, std::string session_id) {
  return as_validation([&] {
    TelemetrySubmission sub;
    sub.session_id = std::move(session_id);
    Json body = j;
    std::optional<double> hint;
    if (!body.is_object()) fail(ErrorKind::Validation, "telemetry: expected an object");
    if (auto it = body.find("v"); it != body.end()) {
      if (*it != 1) fail(ErrorKind::Validation, "telemetry.v: unsupported version");
      body.erase("v");
    }
    if (auto it = body.find("session_id"); it != body.end()) {
      if (!it->is_string() || it->get<std::string>() != sub.session_id) {
        fail(ErrorKind::Validation, "telemetry.session_id: does not match the URL");
      }
      body.erase("session_id");
    }
    if (auto it = body.find("ambient_hint"); it != body.end()) {
      if (!it->is_null()) hint = ObjectReader::as_real(*it, "telemetry.ambient_hint");
      body.erase("ambient_hint");
    }
    const InteractionTelemetry t = telemetry_from_json(body, "telemetry");
    sub.task_times = t.task_times;
    sub.successes = t.successes;
    sub.reported_valence = t.reported_valence;
    sub.ambient_hint = hint;
    return sub;
  });
}

namespace {

Json parameters_json(const AdaptationParameters& p) {
  Json j;
  j["weights"] = to_json(p.weights);
  j["effective_weights"] = to_json(p.effective_weights);
  j["horizon"] = p.horizon;
  j["item_count"] = p.item_count;
  j["agent"] = to_string(p.agent);
  j["params"] = to_json(p.params);
  j["preferences"] = p.preferences ? to_json(*p.preferences) : Json(nullptr);
  return j;
}

}  // namespace

Json to_json(const SessionCreated& c) {
  Json j;
  j["v"] = 1;
  j["session_id"] = c.session_id;
  j["ui"] = to_json(c.ui);
  j["adaptation_parameters"] = parameters_json(c.adaptation_parameters);
  return j;
}

Json to_json(const SessionSummary& s) {
  Json hist;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    hist[std::string(to_string(action_at(a)))] = s.action_histogram[a];
  }
  Json j;
  j["v"] = 1;
  j["session_id"] = s.session_id;
  j["steps"] = s.steps;
  j["mean_reward"] = s.mean_reward;
  j["action_histogram"] = hist;
  j["final_valence"] = s.final_valence;
  j["trace_path"] = s.trace_path.empty() ? Json(nullptr) : Json(s.trace_path);
  return j;
}

Json to_json(const AdaptationDecision& d) {
  Json j;
  j["v"] = 1;
  j["session_id"] = d.session_id;
  j["step"] = d.step;
  j["action"] = to_string(d.action);
  j["ui"] = to_json(d.ui);
  j["reward"] = to_json(d.reward);
  j["explanation"] = to_json(d.explanation);
  j["transition_hint"] = d.transition_hint;
  j["final"] = d.final;
  j["summary"] = d.summary ? to_json(*d.summary) : Json(nullptr);
  return j;
}

Json to_json(const SessionState& s) {
  Json j;
  j["v"] = 1;
  j["session_id"] = s.session_id;
  j["ui"] = to_json(s.ui);
  j["step"] = s.step;
  j["horizon"] = s.horizon;
  j["transcript_length"] = s.transcript_length;
  j["finished"] = s.finished;
  return j;
}

Json error_to_json(const Error& e) {
  Json j;
  j["v"] = 1;
  j["error"] = Json{{"category", to_string(e.kind())}, {"message", e.what()}};
  return j;
}

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Range:
    case ErrorKind::EmptyInput:
      return 400;
    case ErrorKind::NotFound:
      return 404;
    case ErrorKind::SessionFinished:
    case ErrorKind::EpisodeFinished:
      return 409;
    default:
      return 500;
  }
}

// ---------------------------------------------------------------------------
// HTTP
// ---------------------------------------------------------------------------

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    reply(res, http_status(e.kind()), error_to_json(e));
  } catch (const std::exception& e) {
    reply(res, 500, error_to_json(Error(ErrorKind::Io, e.what())));
  }
}

Json request_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return parse_json(req.body, "request body");
  } catch (const Error& e) {
    fail(ErrorKind::Validation, e.what());
  }
}

}  // namespace

HttpService::HttpService(SessionManager& manager)
    : manager_(manager), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, Json{{"v", 1}, {"status", "ok"}});
  });

  srv.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const SessionCreated c = manager_.create_session(session_request_from_json(request_body(req)));
      reply(res, 201, to_json(c));
    });
  });

  srv.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, to_json(manager_.get_session_state(req.matches[1]))); });
  });

  srv.Delete(R"(/v1/sessions/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] { reply(res, 200, to_json(manager_.close_session(req.matches[1]))); });
             });

  srv.Post(R"(/v1/sessions/([^/]+)/telemetry)",
           [this](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const TelemetrySubmission sub =
                   telemetry_submission_from_json(request_body(req), req.matches[1]);
               reply(res, 200, to_json(manager_.submit_telemetry(sub)));
             });
           });

  srv.Get(R"(/v1/sessions/([^/]+)/events)",
          [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const std::string id = req.matches[1];
              manager_.get_session_state(id);  // 404 for unknown sessions
              auto next = std::make_shared<std::size_t>(0);
              if (req.has_param("from")) {
                const std::string from = req.get_param_value("from");
                if (from.empty() || from.find_first_not_of("0123456789") != std::string::npos) {
                  fail(ErrorKind::Validation, "from: expected a non-negative integer");
                }
                *next = std::stoull(from);
              }
              res.set_chunked_content_provider(
                  "text/event-stream", [this, id, next](std::size_t, httplib::DataSink& sink) {
                    const auto batch =
                        manager_.events(id, *next, std::chrono::milliseconds(200));
                    if (!batch) {
                      sink.done();
                      return true;
                    }
                    for (const Json& e : *batch) {
                      const std::string msg = "event: decision\nid: " + std::to_string(*next) +
                                              "\ndata: " + e.dump() + "\n\n";
                      if (!sink.write(msg.data(), msg.size())) return false;
                      ++*next;
                    }
                    return sink.is_writable();
                  });
            });
          });
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) fail(ErrorKind::Io, "cannot bind " + host + " on a free port");
  } else if (!server_->bind_to_port(host, port)) {
    fail(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpService::listen(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    fail(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_bind_address(std::string_view text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    fail(ErrorKind::Config, "bind address must look like host:port, got '" + std::string(text) + "'");
  }
  const std::string host(text.substr(0, colon));
  const std::string port(text.substr(colon + 1));
  if (port.empty() || port.size() > 5 || port.find_first_not_of("0123456789") != std::string::npos ||
      std::stoi(port) > 65535) {
    fail(ErrorKind::Config, "bind address has an invalid port '" + port + "'");
  }
  return {host, std::stoi(port)};
}

}  // namespace uiadapt
