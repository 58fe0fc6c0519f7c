#include "uiadapt/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "uiadapt/error.hpp"

namespace uiadapt {

Json parse_json(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Config, std::string(origin) + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string() + " for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "failed reading " + path.string());
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Reruns a validator and prefixes its message with the JSON path.
template <class F>
void validated(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    fail(e.kind() == ErrorKind::Validation ? ErrorKind::Validation : ErrorKind::Config,
         path + ": " + e.what());
  }
}

std::vector<double> real_array(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorKind::Config, where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ObjectReader::as_real(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Json to_json(const RewardWeights& w) {
  Json j = Json::object();
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    j[std::string(to_string(static_cast<Criterion>(i)))] = w[i];
  }
  return j;
}

RewardWeights weights_from_json(const Json& j, const std::string& path) {
  std::array<double, kNumCriteria> w{};
  {
    ObjectReader r(j, path);
    for (std::size_t i = 0; i < kNumCriteria; ++i) {
      const std::string key(to_string(static_cast<Criterion>(i)));
      w[i] = ObjectReader::as_real(r.require(key), r.field(key));
      if (w[i] < 0.0) fail(ErrorKind::Validation, r.field(key) + ": weight must be >= 0");
    }
  }
  RewardWeights out;
  try {
    out = RewardWeights::make(w);
  } catch (const Error& e) {
    fail(ErrorKind::Validation, path + ": " + e.what());
  }
  return out;
}

Json to_json(const UiConfig& ui) {
  return Json{{"layout", to_string(ui.layout)},
              {"theme", to_string(ui.theme)},
              {"font_size", to_string(ui.font_size)},
              {"item_count", ui.item_count}};
}

UiConfig ui_from_json(const Json& j, const std::string& path) {
  UiConfig ui;
  {
    ObjectReader r(j, path);
    r.enumeration("layout", ui.layout);
    r.enumeration("theme", ui.theme);
    r.enumeration("font_size", ui.font_size);
    r.integer("item_count", ui.item_count);
  }
  validated(path, [&] { validate(ui); });
  return ui;
}

Json to_json(const ActorState& a) {
  return Json{{"age_bucket", to_string(a.age_bucket)},
              {"emotion_valence", a.emotion_valence},
              {"experience", to_string(a.experience)}};
}

ActorState actor_from_json(const Json& j, const std::string& path) {
  ActorState a;
  {
    ObjectReader r(j, path);
    r.enumeration("age_bucket", a.age_bucket);
    r.real("emotion_valence", a.emotion_valence);
    r.enumeration("experience", a.experience);
  }
  validated(path, [&] { validate(a); });
  return a;
}

Json to_json(const PlatformState& p) {
  return Json{{"screen_class", to_string(p.screen_class)},
              {"screen_luminosity", p.screen_luminosity},
              {"os_family", p.os_family}};
}

PlatformState platform_from_json(const Json& j, const std::string& path) {
  PlatformState p;
  {
    ObjectReader r(j, path);
    r.enumeration("screen_class", p.screen_class);
    r.real("screen_luminosity", p.screen_luminosity);
    r.string("os_family", p.os_family);
  }
  validated(path, [&] { validate(p); });
  return p;
}

Json to_json(const EnvironmentState& e) {
  return Json{{"location", to_string(e.location)}, {"ambient_brightness", e.ambient_brightness}};
}

EnvironmentState environment_from_json(const Json& j, const std::string& path) {
  EnvironmentState e;
  {
    ObjectReader r(j, path);
    r.enumeration("location", e.location);
    r.real("ambient_brightness", e.ambient_brightness);
  }
  validated(path, [&] { validate(e); });
  return e;
}

Json to_json(const ContextState& ctx) {
  return Json{{"ui", to_json(ctx.ui)},
              {"actor", to_json(ctx.actor)},
              {"platform", to_json(ctx.platform)},
              {"environment", to_json(ctx.environment)}};
}

ContextState context_from_json(const Json& j, const std::string& path) {
  ContextState ctx;
  ObjectReader r(j, path);
  if (const Json* v = r.find("ui")) ctx.ui = ui_from_json(*v, r.field("ui"));
  if (const Json* v = r.find("actor")) ctx.actor = actor_from_json(*v, r.field("actor"));
  if (const Json* v = r.find("platform")) ctx.platform = platform_from_json(*v, r.field("platform"));
  if (const Json* v = r.find("environment")) {
    ctx.environment = environment_from_json(*v, r.field("environment"));
  }
  return ctx;
}

Json to_json(const PreferenceProfile& p) {
  Json j{{"preferred_layout", to_string(p.preferred_layout)},
         {"preferred_font", to_string(p.preferred_font)}};
  j["theme_rule"] = p.fixed_theme ? std::string(to_string(*p.fixed_theme)) : "FollowAmbient";
  j["theme_threshold"] = p.theme_threshold;
  return j;
}

PreferenceProfile preference_from_json(const Json& j, const std::string& path) {
  PreferenceProfile p;
  {
    ObjectReader r(j, path);
    r.enumeration("preferred_layout", p.preferred_layout);
    r.enumeration("preferred_font", p.preferred_font);
    std::string rule;
    r.string("theme_rule", rule);
    if (rule.empty() || rule == "FollowAmbient") {
      p.fixed_theme.reset();
    } else {
      p.fixed_theme = ObjectReader::as_enum<Theme>(Json(rule), r.field("theme_rule"));
    }
    r.real("theme_threshold", p.theme_threshold);
  }
  validated(path, [&] { p.validate(); });
  return p;
}

Json to_json(const HciCoefficients& c) {
  return Json{{"fitts_a", c.fitts_a}, {"fitts_b", c.fitts_b}, {"hick_c", c.hick_c},
              {"hick_d", c.hick_d}};
}

HciCoefficients coeffs_from_json(const Json& j, const std::string& path) {
  HciCoefficients c;
  {
    ObjectReader r(j, path);
    r.real("fitts_a", c.fitts_a);
    r.real("fitts_b", c.fitts_b);
    r.real("hick_c", c.hick_c);
    r.real("hick_d", c.hick_d);
  }
  validated(path, [&] { c.validate(); });
  return c;
}

Json to_json(const SimUserProfile& u) {
  return Json{{"name", u.name},
              {"preference", to_json(u.preference)},
              {"coeffs", to_json(u.coeffs)},
              {"acuity", to_string(u.acuity)},
              {"error_base", u.error_base},
              {"emotion_inertia", u.emotion_inertia},
              {"valence", u.valence},
              {"noise",
               Json{{"duration_sigma", u.noise.duration_sigma},
                    {"emotion_sigma", u.noise.emotion_sigma}}}};
}

SimUserProfile profile_from_json(const Json& j, const std::string& path) {
  SimUserProfile u;
  {
    ObjectReader r(j, path);
    r.string("name", u.name);
    if (const Json* v = r.find("preference")) {
      u.preference = preference_from_json(*v, r.field("preference"));
    }
    if (const Json* v = r.find("coeffs")) u.coeffs = coeffs_from_json(*v, r.field("coeffs"));
    r.enumeration("acuity", u.acuity);
    r.real("error_base", u.error_base);
    r.real("emotion_inertia", u.emotion_inertia);
    r.real("valence", u.valence);
    if (const Json* v = r.find("noise")) {
      ObjectReader n(*v, r.field("noise"));
      n.real("duration_sigma", u.noise.duration_sigma);
      n.real("emotion_sigma", u.noise.emotion_sigma);
    }
  }
  validated(path, [&] { u.validate(); });
  return u;
}

std::vector<SimUserProfile> cohort_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  if (const Json* v = r.find("v")) {
    if (*v != 1) fail(ErrorKind::Config, r.field("v") + ": unsupported cohort version");
  }
  const Json& list = r.require("profiles");
  if (!list.is_array() || list.empty()) {
    fail(ErrorKind::Config, r.field("profiles") + ": expected a non-empty array");
  }
  std::vector<SimUserProfile> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = r.field("profiles") + "[" + std::to_string(i) + "]";
    if (!list[i].contains("name")) fail(ErrorKind::Config, where + ".name: required in a cohort");
    out.push_back(profile_from_json(list[i], where));
    if (!names.insert(out.back().name).second) {
      fail(ErrorKind::Config, where + ".name: duplicate profile name '" + out.back().name + "'");
    }
  }
  return out;
}

Json to_json(const Discretization& d) {
  Json dims = Json::array();
  for (TabularDim dim : d.tabular_dims) dims.push_back(to_string(dim));
  return Json{{"emotion_boundaries", d.emotion_boundaries},
              {"brightness_boundaries", d.brightness_boundaries},
              {"tabular_dims", dims}};
}

Discretization discretization_from_json(const Json& j, const std::string& path) {
  Discretization d;
  {
    ObjectReader r(j, path);
    if (const Json* v = r.find("emotion_boundaries")) {
      d.emotion_boundaries = real_array(*v, r.field("emotion_boundaries"));
    }
    if (const Json* v = r.find("brightness_boundaries")) {
      d.brightness_boundaries = real_array(*v, r.field("brightness_boundaries"));
    }
    if (const Json* v = r.find("tabular_dims")) {
      if (!v->is_array()) fail(ErrorKind::Config, r.field("tabular_dims") + ": expected an array");
      d.tabular_dims.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        d.tabular_dims.push_back(ObjectReader::as_enum<TabularDim>(
            (*v)[i], r.field("tabular_dims") + "[" + std::to_string(i) + "]"));
      }
    }
  }
  validated(path, [&] { d.validate(); });
  return d;
}

Json to_json(const DriftConfig& d) {
  return Json{{"brightness_step", d.brightness_step},
              {"location_flip_prob", d.location_flip_prob}};
}

DriftConfig drift_from_json(const Json& j, const std::string& path) {
  DriftConfig d;
  {
    ObjectReader r(j, path);
    r.real("brightness_step", d.brightness_step);
    r.real("location_flip_prob", d.location_flip_prob);
  }
  validated(path, [&] { d.validate(); });
  return d;
}

Json to_json(const EnvConfig& cfg) {
  Json j;
  j["horizon"] = cfg.horizon;
  j["tasks_per_step"] = cfg.tasks_per_step;
  j["weights"] = to_json(cfg.weights);
  j["discretization"] = to_json(cfg.discretization);
  j["drift"] = to_json(cfg.drift);
  j["initial_ui"] = cfg.initial_ui ? to_json(*cfg.initial_ui) : Json("random");
  j["item_count"] = cfg.item_count;
  j["profile"] = to_json(cfg.profile);
  j["platform"] = to_json(cfg.platform);
  j["actor"] = to_json(cfg.actor);
  j["initial_brightness"] = cfg.initial_brightness ? Json(*cfg.initial_brightness) : Json("random");
  j["initial_location"] =
      cfg.initial_location ? Json(to_string(*cfg.initial_location)) : Json("random");
  j["expected_success"] = cfg.expected_success;
  return j;
}

EnvConfig env_config_from_json(const Json& j, const std::string& path) {
  EnvConfig cfg;
  {
    ObjectReader r(j, path);
    r.integer("horizon", cfg.horizon);
    r.integer("tasks_per_step", cfg.tasks_per_step);
    if (const Json* v = r.find("weights")) cfg.weights = weights_from_json(*v, r.field("weights"));
    if (const Json* v = r.find("discretization")) {
      cfg.discretization = discretization_from_json(*v, r.field("discretization"));
    }
    if (const Json* v = r.find("drift")) cfg.drift = drift_from_json(*v, r.field("drift"));
    if (const Json* v = r.find("initial_ui")) {
      if (v->is_string() && v->get<std::string>() == "random") {
        cfg.initial_ui.reset();
      } else {
        cfg.initial_ui = ui_from_json(*v, r.field("initial_ui"));
      }
    }
    r.integer("item_count", cfg.item_count);
    if (const Json* v = r.find("profile")) cfg.profile = profile_from_json(*v, r.field("profile"));
    if (const Json* v = r.find("platform")) {
      cfg.platform = platform_from_json(*v, r.field("platform"));
    }
    if (const Json* v = r.find("actor")) cfg.actor = actor_from_json(*v, r.field("actor"));
    if (const Json* v = r.find("initial_brightness")) {
      if (v->is_string() && v->get<std::string>() == "random") {
        cfg.initial_brightness.reset();
      } else {
        cfg.initial_brightness = ObjectReader::as_real(*v, r.field("initial_brightness"));
      }
    }
    if (const Json* v = r.find("initial_location")) {
      if (v->is_string() && v->get<std::string>() == "random") {
        cfg.initial_location.reset();
      } else {
        cfg.initial_location = ObjectReader::as_enum<Location>(*v, r.field("initial_location"));
      }
    }
    r.boolean("expected_success", cfg.expected_success);
  }
  validated(path, [&] { cfg.validate(); });
  return cfg;
}

Json to_json(const LearningParams& p) {
  return Json{{"alpha", p.alpha},
              {"gamma", p.gamma},
              {"epsilon_start", p.epsilon_start},
              {"epsilon_end", p.epsilon_end},
              {"epsilon_decay_episodes", p.epsilon_decay_episodes}};
}

LearningParams params_from_json(const Json& j, const std::string& path) {
  LearningParams p;
  {
    ObjectReader r(j, path);
    r.real("alpha", p.alpha);
    r.real("gamma", p.gamma);
    r.real("epsilon_start", p.epsilon_start);
    r.real("epsilon_end", p.epsilon_end);
    r.integer("epsilon_decay_episodes", p.epsilon_decay_episodes);
  }
  validated(path, [&] { p.validate(); });
  return p;
}

Json to_json(const ApproxConfig& c) {
  return Json{{"hidden_layer", c.hidden_layer},
              {"hidden_width", c.hidden_width},
              {"step_size", c.step_size},
              {"init_scale", c.init_scale}};
}

ApproxConfig approx_config_from_json(const Json& j, const std::string& path) {
  ApproxConfig c;
  {
    ObjectReader r(j, path);
    r.boolean("hidden_layer", c.hidden_layer);
    r.integer("hidden_width", c.hidden_width);
    r.real("step_size", c.step_size);
    r.real("init_scale", c.init_scale);
  }
  validated(path, [&] { c.validate(); });
  return c;
}

Json criteria_to_json(const Criteria& c) { return Json::array({c[0], c[1], c[2], c[3]}); }

Criteria criteria_from_json(const Json& j, const std::string& path) {
  const std::vector<double> v = real_array(j, path);
  if (v.size() != kNumCriteria) fail(ErrorKind::Config, path + ": expected 4 entries");
  return Criteria{v[0], v[1], v[2], v[3]};
}

Json to_json(const RewardBreakdown& r) {
  return Json{{"c", criteria_to_json(r.c)}, {"weights", to_json(r.weights)}, {"total", r.total}};
}

RewardBreakdown reward_from_json(const Json& j, const std::string& path) {
  RewardBreakdown out;
  ObjectReader r(j, path);
  out.c = criteria_from_json(r.require("c"), r.field("c"));
  out.weights = weights_from_json(r.require("weights"), r.field("weights"));
  out.total = ObjectReader::as_real(r.require("total"), r.field("total"));
  return out;
}

Json to_json(const InteractionTelemetry& t) {
  Json successes = Json::array();
  for (bool b : t.successes) successes.push_back(b);
  return Json{{"task_times", t.task_times},
              {"successes", successes},
              {"reported_valence", t.reported_valence}};
}

InteractionTelemetry telemetry_from_json(const Json& j, const std::string& path) {
  InteractionTelemetry t;
  {
    ObjectReader r(j, path);
    t.task_times = real_array(r.require("task_times"), r.field("task_times"));
    const Json& s = r.require("successes");
    if (!s.is_array()) fail(ErrorKind::Validation, r.field("successes") + ": expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_boolean()) {
        fail(ErrorKind::Validation,
             r.field("successes") + "[" + std::to_string(i) + "]: expected true or false");
      }
      t.successes.push_back(s[i].get<bool>());
    }
    t.reported_valence = ObjectReader::as_real(r.require("reported_valence"),
                                               r.field("reported_valence"));
  }
  try {
    t.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Validation, path + ": " + e.what());
  }
  return t;
}

Json to_json(const Explanation& e) {
  return Json{{"chosen", to_string(e.chosen)},
              {"runner_up", to_string(e.runner_up)},
              {"q_margin", e.q_margin},
              {"component_attribution", criteria_to_json(e.component_attribution)},
              {"dominant", e.dominant ? Json(to_string(*e.dominant)) : Json(nullptr)},
              {"text", e.text}};
}

Explanation explanation_from_json(const Json& j, const std::string& path) {
  Explanation e;
  ObjectReader r(j, path);
  e.chosen = ObjectReader::as_enum<AdaptationAction>(r.require("chosen"), r.field("chosen"));
  e.runner_up =
      ObjectReader::as_enum<AdaptationAction>(r.require("runner_up"), r.field("runner_up"));
  e.q_margin = ObjectReader::as_real(r.require("q_margin"), r.field("q_margin"));
  e.component_attribution =
      criteria_from_json(r.require("component_attribution"), r.field("component_attribution"));
  if (const Json* v = r.find("dominant")) {
    e.dominant = ObjectReader::as_enum<Criterion>(*v, r.field("dominant"));
  }
  const Json& text = r.require("text");
  if (!text.is_string()) fail(ErrorKind::Config, r.field("text") + ": expected a string");
  e.text = text.get<std::string>();
  return e;
}

}  // namespace uiadapt
