#include "uiadapt/traces.hpp"

#include <set>
#include <sstream>

#include "uiadapt/error.hpp"

namespace uiadapt {

TraceRecord make_trace_record(std::string source, std::size_t episode, StateIndex state,
                              const StepResult& step, std::size_t step_index) {
  TraceRecord r;
  r.source = std::move(source);
  r.episode = episode;
  r.step = step_index;
  r.state = state;
  r.action = step.info.action;
  r.reward = step.reward;
  r.next_state = step.observation;
  r.done = step.done;
  r.context = step.info.context;
  r.ui = step.info.context.ui;
  r.telemetry = step.info.telemetry;
  return r;
}

Json trace_to_json(const TraceRecord& r) {
  Json j;
  j["v"] = 1;
  j["source"] = r.source;
  j["episode"] = r.episode;
  j["step"] = r.step;
  j["state"] = r.state;
  j["action"] = to_string(r.action);
  j["reward"] = to_json(r.reward);
  j["next_state"] = r.next_state;
  j["done"] = r.done;
  j["context"] = to_json(r.context);
  j["ui"] = to_json(r.ui);
  j["telemetry"] = to_json(r.telemetry);
  if (r.explanation) j["explanation"] = to_json(*r.explanation);
  return j;
}

namespace {

std::size_t count_field(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    fail(ErrorKind::Config, path + "." + key + ": expected a non-negative integer");
  }
  return it->get<std::size_t>();
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::Config, path + "." + key + ": required field is missing");
  return *it;
}

}  // namespace

TraceRecord trace_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(ErrorKind::Config, path + ": expected an object");
  const Json& v = field(j, "v", path);
  if (v != 1) fail(ErrorKind::Config, path + ".v: unsupported trace version");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::set<std::string> known{"v",          "source", "episode", "step",
                                             "state",      "action", "reward",  "next_state",
                                             "done",       "context", "ui",     "telemetry",
                                             "explanation"};
    if (!known.count(it.key())) fail(ErrorKind::Config, path + "." + it.key() + ": unknown field");
  }
  TraceRecord r;
  const Json& source = field(j, "source", path);
  if (!source.is_string()) fail(ErrorKind::Config, path + ".source: expected a string");
  r.source = source.get<std::string>();
  r.episode = count_field(j, "episode", path);
  r.step = count_field(j, "step", path);
  r.state = count_field(j, "state", path);
  const Json& action = field(j, "action", path);
  if (!action.is_string()) fail(ErrorKind::Config, path + ".action: expected a name");
  try {
    r.action = parse_enum<AdaptationAction>(action.get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::Config, path + ".action: " + e.what());
  }
  r.reward = reward_from_json(field(j, "reward", path), path + ".reward");
  r.next_state = count_field(j, "next_state", path);
  const Json& done = field(j, "done", path);
  if (!done.is_boolean()) fail(ErrorKind::Config, path + ".done: expected true or false");
  r.done = done.get<bool>();
  r.context = context_from_json(field(j, "context", path), path + ".context");
  r.ui = ui_from_json(field(j, "ui", path), path + ".ui");
  r.telemetry = telemetry_from_json(field(j, "telemetry", path), path + ".telemetry");
  if (auto it = j.find("explanation"); it != j.end() && !it->is_null()) {
    r.explanation = explanation_from_json(*it, path + ".explanation");
  }
  return r;
}

std::string trace_line(const TraceRecord& r) { return trace_to_json(r).dump(); }

TraceWriter::TraceWriter(const std::filesystem::path& path, bool append)
    : path_(path), out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) fail(ErrorKind::Io, "cannot open trace log " + path.string());
}

void TraceWriter::write(const TraceRecord& r) {
  out_ << trace_line(r) << '\n';
  if (!out_) fail(ErrorKind::Io, "failed writing trace log " + path_.string());
}

void TraceWriter::flush() {
  out_.flush();
  if (!out_) fail(ErrorKind::Io, "failed flushing trace log " + path_.string());
}

std::vector<TraceRecord> parse_traces(std::string_view text, std::string_view origin) {
  std::vector<TraceRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    out.push_back(trace_from_json(parse_json(line, where), where));
  }
  return out;
}

std::vector<TraceRecord> read_traces(const std::filesystem::path& path) {
  return parse_traces(read_text_file(path), path.string());
}

std::string traces_to_csv(const std::vector<TraceRecord>& records) {
  std::ostringstream os;
  os << "source,episode,step,state,action,c_preference,c_time,c_success,c_emotion,reward,"
        "next_state,done,layout,theme,font_size,ambient_brightness,location,emotion_valence\n";
  for (const TraceRecord& r : records) {
    os << r.source << ',' << r.episode << ',' << r.step << ',' << r.state << ','
       << to_string(r.action);
    for (double c : r.reward.c) os << ',' << format_real(c);
    os << ',' << format_real(r.reward.total) << ',' << r.next_state << ','
       << (r.done ? "true" : "false") << ',' << to_string(r.ui.layout) << ','
       << to_string(r.ui.theme) << ',' << to_string(r.ui.font_size) << ','
       << format_real(r.context.environment.ambient_brightness) << ','
       << to_string(r.context.environment.location) << ','
       << format_real(r.context.actor.emotion_valence) << '\n';
  }
  return os.str();
}

}  // namespace uiadapt
