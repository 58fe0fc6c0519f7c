#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "uiadapt/agents.hpp"
#include "uiadapt/explainer.hpp"
#include "uiadapt/harness.hpp"
#include "uiadapt/json_io.hpp"
#include "uiadapt/traces.hpp"

namespace httplib {
class Server;
}

namespace uiadapt {

/// Body of POST /v1/sessions. Every field is optional.
struct SessionRequest {
  std::optional<RewardWeights> weights;
  std::optional<std::string> agent_snapshot;  // text of a Q-table snapshot
  std::optional<std::size_t> horizon;
  std::optional<int> item_count;
  /// Declared preferences; without them c1 is dropped and the remaining
  /// weights are renormalized.
  std::optional<PreferenceProfile> preferences;
  std::optional<LearningParams> params;
  std::optional<AgentKind> agent;  // QLearning, Sarsa or ExpectedSarsa
  std::optional<PlatformState> platform;
  std::optional<std::uint64_t> seed;
};

struct AdaptationParameters {
  RewardWeights weights;            // as requested
  RewardWeights effective_weights;  // as applied to rewards
  std::size_t horizon = 20;
  int item_count = 6;
  AgentKind agent = AgentKind::QLearning;
  LearningParams params;
  std::optional<PreferenceProfile> preferences;
};

struct SessionCreated {
  std::string session_id;
  UiConfig ui;
  AdaptationParameters adaptation_parameters;
};

struct TelemetrySubmission {
  std::string session_id;
  std::vector<double> task_times;
  std::vector<bool> successes;
  double reported_valence = 0.0;
  std::optional<double> ambient_hint;
};

struct SessionSummary {
  std::string session_id;
  std::size_t steps = 0;
  double mean_reward = 0.0;
  std::array<std::size_t, kNumActions> action_histogram{};
  double final_valence = 0.0;
  std::string trace_path;  // empty until the session is closed
};

struct AdaptationDecision {
  std::string session_id;
  std::size_t step = 0;  // submissions processed so far, this one included
  AdaptationAction action = AdaptationAction::NoAdapt;
  UiConfig ui;  // UI to show for the next tasks
  RewardBreakdown reward;
  Explanation explanation;
  std::string transition_hint = "apply_between_tasks";
  bool final = false;
  std::optional<SessionSummary> summary;  // set on the final decision
};

struct SessionState {
  std::string session_id;
  UiConfig ui;
  std::size_t step = 0;
  std::size_t horizon = 0;
  std::size_t transcript_length = 0;
  bool finished = false;
};

struct TranscriptEntry {
  InteractionTelemetry telemetry;
  AdaptationAction action = AdaptationAction::NoAdapt;
  RewardBreakdown reward;
  Explanation explanation;
};

struct ServiceConfig {
  std::filesystem::path trace_dir = "traces";
  /// Session defaults; epsilon decays per submission.
  LearningParams params{0.1, 0.9, 0.2, 0.05, 20};
  PlatformState platform;
};

/// Live sessions. The registry allows concurrent lookups; each session is
/// mutated under its own lock, so submissions to one session are processed
/// one at a time in arrival order and sessions never touch each other.
class SessionManager {
 public:
  explicit SessionManager(ServiceConfig cfg = {});
  ~SessionManager();

  SessionCreated create_session(const SessionRequest& request);

  /// Throws Error(NotFound), Error(SessionFinished) after the horizon, or
  /// Error(Validation) for malformed telemetry.
  AdaptationDecision submit_telemetry(const TelemetrySubmission& sub);

  SessionState get_session_state(const std::string& id) const;

  /// Removes the session and writes its trace to `<trace_dir>/<id>.jsonl`.
  SessionSummary close_session(const std::string& id);

  std::vector<TranscriptEntry> transcript(const std::string& id) const;

  /// Decision events of a session, as wire JSON, starting at index `from`.
  /// Blocks up to `wait` for a new event when none is pending. Returns
  /// nullopt once the session is closed or unknown.
  std::optional<std::vector<Json>> events(const std::string& id, std::size_t from,
                                          std::chrono::milliseconds wait) const;

  std::size_t live_sessions() const;
  const ServiceConfig& config() const noexcept { return cfg_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_id();

  ServiceConfig cfg_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mutex_;
  Rng id_rng_;
};

// Wire format (JSON, every message carries "v": 1).

SessionRequest session_request_from_json(const Json& j);
TelemetrySubmission telemetry_submission_from_json(const Json& j, std::string session_id);
Json to_json(const SessionCreated& c);
Json to_json(const AdaptationDecision& d);
Json to_json(const SessionState& s);
Json to_json(const SessionSummary& s);
Json error_to_json(const Error& e);

/// HTTP status for an error category.
int http_status(ErrorKind kind);

/// HTTP front end:
///   POST   /v1/sessions                  create
///   GET    /v1/sessions/{id}             state
///   POST   /v1/sessions/{id}/telemetry   submit, returns the decision
///   DELETE /v1/sessions/{id}             close, returns the summary
///   GET    /v1/sessions/{id}/events      decisions as server-sent events
///   GET    /v1/health
class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws Error(Io) when binding fails.
  int start(const std::string& host, int port);

  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);

  void stop();

 private:
  SessionManager& manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// Parses "host:port" (e.g. from UIADAPT_BIND). Throws Error(Config).
std::pair<std::string, int> parse_bind_address(std::string_view text);

}  // namespace uiadapt
