#pragma once

#include <cmath>
#include <exception>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uiadapt/agents.hpp"
#include "uiadapt/approx_agent.hpp"
#include "uiadapt/context.hpp"
#include "uiadapt/error.hpp"
#include "uiadapt/env.hpp"
#include "uiadapt/explainer.hpp"
#include "uiadapt/reward.hpp"
#include "uiadapt/user_sim.hpp"

namespace uiadapt {

/// Insertion-ordered so that serialized output has a stable field order.
using Json = nlohmann::ordered_json;

/// Parses JSON text; `//` and `/* */` comments are allowed. Throws
/// Error(Config) with `origin` in the message on a syntax error.
Json parse_json(std::string_view text, std::string_view origin);

/// Throws Error(Io) when the file cannot be read.
Json read_json_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes atomically enough for a single writer: truncates then writes.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Formats a double so that parsing it back gives the same value.
std::string format_real(double v);

// Reads fields of one JSON object, tracking which keys were consumed so that
// unknown (misspelled) keys are reported.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::Config, path_ + ": expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(ErrorKind::Config, field(it.key()) + ": unknown field");
      }
    }
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  std::string field(const std::string& key) const { return path_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const Json& require(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(ErrorKind::Validation, field(key) + ": required field is missing");
    return *v;
  }

  void real(const std::string& key, double& out) {
    if (const Json* v = find(key)) out = as_real(*v, field(key));
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) fail(ErrorKind::Config, field(key) + ": expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else if (v->get<long long>() < 0) {
          fail(ErrorKind::Config, field(key) + ": must be non-negative");
        } else {
          out = static_cast<Int>(v->get<long long>());
        }
      } else {
        out = v->get<Int>();
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) fail(ErrorKind::Config, field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) fail(ErrorKind::Config, field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  template <class E>
  void enumeration(const std::string& key, E& out) {
    if (const Json* v = find(key)) out = as_enum<E>(*v, field(key));
  }

  static double as_real(const Json& v, const std::string& where) {
    if (!v.is_number()) fail(ErrorKind::Config, where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorKind::Config, where + ": must be finite");
    return d;
  }

  template <class E>
  static E as_enum(const Json& v, const std::string& where) {
    if (!v.is_string()) fail(ErrorKind::Config, where + ": expected a name");
    try {
      return parse_enum<E>(v.get<std::string>());
    } catch (const Error&) {
      std::string allowed;
      for (auto n : EnumNames<E>::names) allowed += (allowed.empty() ? "" : ", ") + std::string(n);
      fail(ErrorKind::Config,
           where + ": unknown value '" + v.get<std::string>() + "' (expected one of " + allowed + ")");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Every *_from_json starts from the type's defaults, overrides the keys that
// are present and rejects unknown keys. Errors carry the JSON path of the
// offending field (e.g. "env.weights.time"). Errors are Error(Config) unless
// the type's validator reports something more specific.

Json to_json(const RewardWeights& w);
RewardWeights weights_from_json(const Json& j, const std::string& path = "weights");

Json to_json(const UiConfig& ui);
UiConfig ui_from_json(const Json& j, const std::string& path = "ui");

Json to_json(const ActorState& a);
ActorState actor_from_json(const Json& j, const std::string& path = "actor");

Json to_json(const PlatformState& p);
PlatformState platform_from_json(const Json& j, const std::string& path = "platform");

Json to_json(const EnvironmentState& e);
EnvironmentState environment_from_json(const Json& j, const std::string& path = "environment");

Json to_json(const ContextState& ctx);
ContextState context_from_json(const Json& j, const std::string& path = "context");

Json to_json(const PreferenceProfile& p);
PreferenceProfile preference_from_json(const Json& j, const std::string& path = "preference");

Json to_json(const HciCoefficients& c);
HciCoefficients coeffs_from_json(const Json& j, const std::string& path = "coeffs");

Json to_json(const SimUserProfile& u);
SimUserProfile profile_from_json(const Json& j, const std::string& path = "profile");

/// {"profiles": [ {...}, ... ]}; each profile needs a unique "name".
std::vector<SimUserProfile> cohort_from_json(const Json& j, const std::string& path = "cohort");

Json to_json(const Discretization& d);
Discretization discretization_from_json(const Json& j,
                                        const std::string& path = "discretization");

Json to_json(const DriftConfig& d);
DriftConfig drift_from_json(const Json& j, const std::string& path = "drift");

Json to_json(const EnvConfig& cfg);
EnvConfig env_config_from_json(const Json& j, const std::string& path = "env");

Json to_json(const LearningParams& p);
LearningParams params_from_json(const Json& j, const std::string& path = "params");

Json to_json(const ApproxConfig& c);
ApproxConfig approx_config_from_json(const Json& j, const std::string& path = "approx");

Json to_json(const RewardBreakdown& r);
RewardBreakdown reward_from_json(const Json& j, const std::string& path = "reward");

Json to_json(const InteractionTelemetry& t);
InteractionTelemetry telemetry_from_json(const Json& j, const std::string& path = "telemetry");

Json to_json(const Explanation& e);
Explanation explanation_from_json(const Json& j, const std::string& path = "explanation");

Json criteria_to_json(const Criteria& c);
Criteria criteria_from_json(const Json& j, const std::string& path);

}  // namespace uiadapt
