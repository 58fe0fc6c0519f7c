#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "uiadapt/env.hpp"
#include "uiadapt/explainer.hpp"
#include "uiadapt/json_io.hpp"

namespace uiadapt {

/// One environment step (or one live-session decision) in the episode trace
/// log. Lines are JSON objects with the fields in this order:
///   v, source, episode, step, state, action, reward, next_state, done,
///   context, ui, telemetry, explanation (optional)
/// `context` is the context the tasks ran in, `ui` the UI after the action.
struct TraceRecord {
  std::string source;  // "env", "eval", "session:<id>", ...
  std::size_t episode = 0;
  std::size_t step = 0;
  StateIndex state = 0;
  AdaptationAction action = AdaptationAction::NoAdapt;
  RewardBreakdown reward;
  StateIndex next_state = 0;
  bool done = false;
  ContextState context;
  UiConfig ui;
  InteractionTelemetry telemetry;
  std::optional<Explanation> explanation;
};

TraceRecord make_trace_record(std::string source, std::size_t episode, StateIndex state,
                              const StepResult& step, std::size_t step_index);

Json trace_to_json(const TraceRecord& r);
TraceRecord trace_from_json(const Json& j, const std::string& path = "trace");

/// Single-line JSON, no trailing newline.
std::string trace_line(const TraceRecord& r);

/// Appends one line per record to a file. Not thread-safe.
class TraceWriter {
 public:
  /// Throws Error(Io) when the file cannot be opened.
  explicit TraceWriter(const std::filesystem::path& path, bool append = true);

  void write(const TraceRecord& r);
  void flush();
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Parses a line-delimited trace log; blank lines are skipped. Errors name
/// the line number.
std::vector<TraceRecord> parse_traces(std::string_view text, std::string_view origin);
std::vector<TraceRecord> read_traces(const std::filesystem::path& path);

/// Flat CSV, header:
///   source,episode,step,state,action,c_preference,c_time,c_success,
///   c_emotion,reward,next_state,done,layout,theme,font_size,
///   ambient_brightness,location,emotion_valence
std::string traces_to_csv(const std::vector<TraceRecord>& records);

}  // namespace uiadapt
