#include "uiadapt/context.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "uiadapt/error.hpp"

namespace uiadapt {

void throw_unknown_enum(std::string_view name) {
  fail(ErrorKind::Validation, "unknown enum value '" + std::string(name) + "'");
}

namespace {

void require_unit(double v, double lo, double hi, const char* field) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << field << " = " << v << " outside [" << lo << ", " << hi << "]";
    fail(ErrorKind::Domain, os.str());
  }
}

template <class E>
void require_enum(E value, const char* field) {
  if (static_cast<std::size_t>(value) >= enum_cardinality<E>()) {
    fail(ErrorKind::Domain, std::string("invalid enum value for ") + field);
  }
}

}  // namespace

void validate(const UiConfig& ui) {
  require_enum(ui.layout, "layout");
  require_enum(ui.theme, "theme");
  require_enum(ui.font_size, "font_size");
  if (ui.item_count < 1) fail(ErrorKind::Domain, "item_count must be >= 1");
}

void validate(const ActorState& actor) {
  require_enum(actor.age_bucket, "age_bucket");
  require_enum(actor.experience, "experience");
  require_unit(actor.emotion_valence, -1.0, 1.0, "emotion_valence");
}

void validate(const PlatformState& platform) {
  require_enum(platform.screen_class, "screen_class");
  require_unit(platform.screen_luminosity, 0.0, 1.0, "screen_luminosity");
  if (platform.os_family.find_first_of(" \t\n=") != std::string::npos) {
    fail(ErrorKind::Domain, "os_family must not contain whitespace or '='");
  }
}

void validate(const EnvironmentState& environment) {
  require_enum(environment.location, "location");
  require_unit(environment.ambient_brightness, 0.0, 1.0, "ambient_brightness");
}

void validate(const ContextState& ctx) {
  validate(ctx.ui);
  validate(ctx.actor);
  validate(ctx.platform);
  validate(ctx.environment);
}

std::array<UiConfig, kNumUiConfigs> all_ui_configs(int item_count) {
  std::array<UiConfig, kNumUiConfigs> out{};
  std::size_t i = 0;
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t t = 0; t < 2; ++t) {
      for (std::size_t f = 0; f < 3; ++f) {
        out[i++] = UiConfig{static_cast<Layout>(l), static_cast<Theme>(t),
                            static_cast<FontSize>(f), item_count};
      }
    }
  }
  return out;
}

std::size_t ui_config_index(const UiConfig& ui) {
  return static_cast<std::size_t>(ui.layout) * 6 + static_cast<std::size_t>(ui.theme) * 3 +
         static_cast<std::size_t>(ui.font_size);
}

const std::array<AdaptationAction, kNumActions>& action_set() {
  static constexpr std::array<AdaptationAction, kNumActions> kActions{
      AdaptationAction::SetLayoutGrid, AdaptationAction::SetLayoutList,
      AdaptationAction::SetThemeLight, AdaptationAction::SetThemeDark,
      AdaptationAction::SetFontSmall,  AdaptationAction::SetFontDefault,
      AdaptationAction::SetFontBig,    AdaptationAction::NoAdapt};
  return kActions;
}

AdaptationAction action_at(std::size_t i) {
  if (i >= kNumActions) {
    fail(ErrorKind::Range, "action index " + std::to_string(i) + " out of range");
  }
  return action_set()[i];
}

UiConfig apply_action(UiConfig ui, AdaptationAction action) {
  switch (action) {
    case AdaptationAction::SetLayoutGrid: ui.layout = Layout::Grid; break;
    case AdaptationAction::SetLayoutList: ui.layout = Layout::List; break;
    case AdaptationAction::SetThemeLight: ui.theme = Theme::Light; break;
    case AdaptationAction::SetThemeDark: ui.theme = Theme::Dark; break;
    case AdaptationAction::SetFontSmall: ui.font_size = FontSize::Small; break;
    case AdaptationAction::SetFontDefault: ui.font_size = FontSize::Default; break;
    case AdaptationAction::SetFontBig: ui.font_size = FontSize::Big; break;
    case AdaptationAction::NoAdapt: break;
  }
  return ui;
}

// ---------------------------------------------------------------------------

namespace {

void require_increasing(const std::vector<double>& b, double lo, double hi, const char* name) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > lo && b[i] < hi)) {
      fail(ErrorKind::Config, std::string(name) + " boundaries must lie strictly inside the range");
    }
    if (i > 0 && !(b[i] > b[i - 1])) {
      fail(ErrorKind::Config, std::string(name) + " boundaries must be strictly increasing");
    }
  }
}

double bin_midpoint(std::size_t bin, const std::vector<double>& b, double lo, double hi) {
  const double left = bin == 0 ? lo : b[bin - 1];
  const double right = bin == b.size() ? hi : b[bin];
  return 0.5 * (left + right);
}

}  // namespace

void Discretization::validate() const {
  require_increasing(emotion_boundaries, -1.0, 1.0, "emotion");
  require_increasing(brightness_boundaries, 0.0, 1.0, "brightness");
  if (tabular_dims.empty()) fail(ErrorKind::Config, "tabular_dims must not be empty");
  for (std::size_t i = 0; i < tabular_dims.size(); ++i) {
    if (static_cast<std::size_t>(tabular_dims[i]) >= enum_cardinality<TabularDim>()) {
      fail(ErrorKind::Config, "unknown tabular dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (tabular_dims[i] == tabular_dims[j]) {
        fail(ErrorKind::Config, "duplicate tabular dimension " +
                                    std::string(to_string(tabular_dims[i])));
      }
    }
  }
}

std::size_t Discretization::cardinality(TabularDim dim) const {
  switch (dim) {
    case TabularDim::Layout: return enum_cardinality<Layout>();
    case TabularDim::Theme: return enum_cardinality<Theme>();
    case TabularDim::FontSize: return enum_cardinality<FontSize>();
    case TabularDim::EmotionBin: return emotion_boundaries.size() + 1;
    case TabularDim::BrightnessBin: return brightness_boundaries.size() + 1;
    case TabularDim::AgeBucket: return enum_cardinality<AgeBucket>();
    case TabularDim::Experience: return enum_cardinality<Experience>();
    case TabularDim::ScreenClass: return enum_cardinality<ScreenClass>();
    case TabularDim::Location: return enum_cardinality<Location>();
  }
  return 1;
}

std::size_t Discretization::state_count() const {
  std::size_t n = 1;
  for (TabularDim dim : tabular_dims) n *= cardinality(dim);
  return n;
}

std::size_t bin_of(double value, const std::vector<double>& boundaries) {
  return static_cast<std::size_t>(
      std::upper_bound(boundaries.begin(), boundaries.end(), value) - boundaries.begin());
}

std::size_t bucket_of(const ContextState& ctx, TabularDim dim, const Discretization& d) {
  switch (dim) {
    case TabularDim::Layout: return static_cast<std::size_t>(ctx.ui.layout);
    case TabularDim::Theme: return static_cast<std::size_t>(ctx.ui.theme);
    case TabularDim::FontSize: return static_cast<std::size_t>(ctx.ui.font_size);
    case TabularDim::EmotionBin: return bin_of(ctx.actor.emotion_valence, d.emotion_boundaries);
    case TabularDim::BrightnessBin:
      return bin_of(ctx.environment.ambient_brightness, d.brightness_boundaries);
    case TabularDim::AgeBucket: return static_cast<std::size_t>(ctx.actor.age_bucket);
    case TabularDim::Experience: return static_cast<std::size_t>(ctx.actor.experience);
    case TabularDim::ScreenClass: return static_cast<std::size_t>(ctx.platform.screen_class);
    case TabularDim::Location: return static_cast<std::size_t>(ctx.environment.location);
  }
  return 0;
}

StateIndex encode_state(const ContextState& ctx, const Discretization& d) {
  StateIndex index = 0;
  for (TabularDim dim : d.tabular_dims) {
    index = index * d.cardinality(dim) + bucket_of(ctx, dim, d);
  }
  return index;
}

StateIndex encode_buckets(const DiscreteState& state, const Discretization& d) {
  if (state.buckets.size() != d.tabular_dims.size()) {
    fail(ErrorKind::Range, "descriptor has wrong number of dimensions");
  }
  StateIndex index = 0;
  for (std::size_t k = 0; k < d.tabular_dims.size(); ++k) {
    const std::size_t card = d.cardinality(d.tabular_dims[k]);
    if (state.buckets[k] >= card) fail(ErrorKind::Range, "bucket out of range");
    index = index * card + state.buckets[k];
  }
  return index;
}

DiscreteState decode_tabular(StateIndex index, const Discretization& d) {
  const std::size_t n = d.state_count();
  if (index >= n) {
    fail(ErrorKind::Range,
         "state index " + std::to_string(index) + " >= state count " + std::to_string(n));
  }
  DiscreteState out;
  out.buckets.resize(d.tabular_dims.size());
  for (std::size_t k = d.tabular_dims.size(); k-- > 0;) {
    const std::size_t card = d.cardinality(d.tabular_dims[k]);
    out.buckets[k] = index % card;
    index /= card;
  }
  return out;
}

ContextState representative_context(const DiscreteState& state, const Discretization& d,
                                    ContextState base) {
  if (state.buckets.size() != d.tabular_dims.size()) {
    fail(ErrorKind::Range, "descriptor has wrong number of dimensions");
  }
  for (std::size_t k = 0; k < d.tabular_dims.size(); ++k) {
    const std::size_t b = state.buckets[k];
    switch (d.tabular_dims[k]) {
      case TabularDim::Layout: base.ui.layout = static_cast<Layout>(b); break;
      case TabularDim::Theme: base.ui.theme = static_cast<Theme>(b); break;
      case TabularDim::FontSize: base.ui.font_size = static_cast<FontSize>(b); break;
      case TabularDim::EmotionBin:
        base.actor.emotion_valence = bin_midpoint(b, d.emotion_boundaries, -1.0, 1.0);
        break;
      case TabularDim::BrightnessBin:
        base.environment.ambient_brightness = bin_midpoint(b, d.brightness_boundaries, 0.0, 1.0);
        break;
      case TabularDim::AgeBucket: base.actor.age_bucket = static_cast<AgeBucket>(b); break;
      case TabularDim::Experience: base.actor.experience = static_cast<Experience>(b); break;
      case TabularDim::ScreenClass:
        base.platform.screen_class = static_cast<ScreenClass>(b);
        break;
      case TabularDim::Location: base.environment.location = static_cast<Location>(b); break;
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// key=value text
// ---------------------------------------------------------------------------

namespace {

std::string fmt_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::map<std::string, std::string, std::less<>> split_kv(std::string_view text) {
  std::map<std::string, std::string, std::less<>> out;
  std::istringstream is{std::string(text)};
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorKind::Validation, "malformed key=value token '" + token + "'");
    }
    auto [it, inserted] = out.emplace(token.substr(0, eq), token.substr(eq + 1));
    if (!inserted) fail(ErrorKind::Validation, "duplicate key '" + it->first + "'");
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string, std::less<>>& kv,
                        std::string_view key) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorKind::Validation, "missing key '" + std::string(key) + "'");
  return it->second;
}

double parse_real(const std::string& text, std::string_view key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    fail(ErrorKind::Validation, "key '" + std::string(key) + "' is not a number: " + text);
  }
  return v;
}

int parse_int(const std::string& text, std::string_view key) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    fail(ErrorKind::Validation, "key '" + std::string(key) + "' is not an integer: " + text);
  }
  return v;
}

UiConfig ui_from_map(const std::map<std::string, std::string, std::less<>>& kv) {
  UiConfig ui;
  ui.layout = parse_enum<Layout>(need(kv, "layout"));
  ui.theme = parse_enum<Theme>(need(kv, "theme"));
  ui.font_size = parse_enum<FontSize>(need(kv, "font_size"));
  ui.item_count = parse_int(need(kv, "item_count"), "item_count");
  return ui;
}

}  // namespace

std::string to_kv(const UiConfig& ui) {
  std::string out;
  out += "layout=";
  out += to_string(ui.layout);
  out += " theme=";
  out += to_string(ui.theme);
  out += " font_size=";
  out += to_string(ui.font_size);
  out += " item_count=" + std::to_string(ui.item_count);
  return out;
}

std::string to_kv(const ContextState& ctx) {
  std::string out = to_kv(ctx.ui);
  out += " age_bucket=";
  out += to_string(ctx.actor.age_bucket);
  out += " emotion_valence=" + fmt_real(ctx.actor.emotion_valence);
  out += " experience=";
  out += to_string(ctx.actor.experience);
  out += " screen_class=";
  out += to_string(ctx.platform.screen_class);
  out += " screen_luminosity=" + fmt_real(ctx.platform.screen_luminosity);
  out += " os_family=" + ctx.platform.os_family;
  out += " location=";
  out += to_string(ctx.environment.location);
  out += " ambient_brightness=" + fmt_real(ctx.environment.ambient_brightness);
  return out;
}

UiConfig ui_from_kv(std::string_view text) {
  UiConfig ui = ui_from_map(split_kv(text));
  validate(ui);
  return ui;
}

ContextState context_from_kv(std::string_view text) {
  const auto kv = split_kv(text);
  ContextState ctx;
  ctx.ui = ui_from_map(kv);
  ctx.actor.age_bucket = parse_enum<AgeBucket>(need(kv, "age_bucket"));
  ctx.actor.emotion_valence = parse_real(need(kv, "emotion_valence"), "emotion_valence");
  ctx.actor.experience = parse_enum<Experience>(need(kv, "experience"));
  ctx.platform.screen_class = parse_enum<ScreenClass>(need(kv, "screen_class"));
  ctx.platform.screen_luminosity = parse_real(need(kv, "screen_luminosity"), "screen_luminosity");
  ctx.platform.os_family = need(kv, "os_family");
  ctx.environment.location = parse_enum<Location>(need(kv, "location"));
  ctx.environment.ambient_brightness =
      parse_real(need(kv, "ambient_brightness"), "ambient_brightness");
  validate(ctx);
  return ctx;
}

}  // namespace uiadapt
