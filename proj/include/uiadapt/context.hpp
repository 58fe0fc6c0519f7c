#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uiadapt {

enum class Layout : std::uint8_t { Grid, List };
enum class Theme : std::uint8_t { Light, Dark };
enum class FontSize : std::uint8_t { Small, Default, Big };
enum class AgeBucket : std::uint8_t { Young, Adult, Senior };
enum class Experience : std::uint8_t { Novice, Intermediate, Expert };
enum class ScreenClass : std::uint8_t { Phone, Tablet, Desktop };
enum class Location : std::uint8_t { Indoor, Outdoor };

/// The eight adaptation actions, in their fixed order. Setters are absolute:
/// applying SetThemeDark to a dark UI leaves it dark.
enum class AdaptationAction : std::uint8_t {
  SetLayoutGrid,
  SetLayoutList,
  SetThemeLight,
  SetThemeDark,
  SetFontSmall,
  SetFontDefault,
  SetFontBig,
  NoAdapt,
};

inline constexpr std::size_t kNumActions = 8;
inline constexpr std::size_t kNumUiConfigs = 12;

// ---------------------------------------------------------------------------
// Enum names. Serialized forms are exactly these identifiers.
// ---------------------------------------------------------------------------

template <class E>
struct EnumNames;

template <>
struct EnumNames<Layout> {
  static constexpr std::array<std::string_view, 2> names{"Grid", "List"};
};
template <>
struct EnumNames<Theme> {
  static constexpr std::array<std::string_view, 2> names{"Light", "Dark"};
};
template <>
struct EnumNames<FontSize> {
  static constexpr std::array<std::string_view, 3> names{"Small", "Default", "Big"};
};
template <>
struct EnumNames<AgeBucket> {
  static constexpr std::array<std::string_view, 3> names{"Young", "Adult", "Senior"};
};
template <>
struct EnumNames<Experience> {
  static constexpr std::array<std::string_view, 3> names{"Novice", "Intermediate", "Expert"};
};
template <>
struct EnumNames<ScreenClass> {
  static constexpr std::array<std::string_view, 3> names{"Phone", "Tablet", "Desktop"};
};
template <>
struct EnumNames<Location> {
  static constexpr std::array<std::string_view, 2> names{"Indoor", "Outdoor"};
};
template <>
struct EnumNames<AdaptationAction> {
  static constexpr std::array<std::string_view, 8> names{
      "SetLayoutGrid", "SetLayoutList", "SetThemeLight", "SetThemeDark",
      "SetFontSmall",  "SetFontDefault", "SetFontBig",  "NoAdapt"};
};

template <class E>
constexpr std::size_t enum_cardinality() {
  return EnumNames<E>::names.size();
}

template <class E>
constexpr std::string_view to_string(E value) {
  return EnumNames<E>::names[static_cast<std::size_t>(value)];
}

[[noreturn]] void throw_unknown_enum(std::string_view name);

/// Throws Error(Validation) on an unknown name.
template <class E>
E parse_enum(std::string_view name) {
  const auto& names = EnumNames<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  throw_unknown_enum(name);
}

// ---------------------------------------------------------------------------
// State subspaces
// ---------------------------------------------------------------------------

struct UiConfig {
  Layout layout = Layout::Grid;
  Theme theme = Theme::Light;
  FontSize font_size = FontSize::Default;
  int item_count = 6;  // number of selectable widgets rendered

  bool operator==(const UiConfig&) const = default;
};

struct ActorState {
  AgeBucket age_bucket = AgeBucket::Adult;
  double emotion_valence = 0.0;  // [-1, 1]
  Experience experience = Experience::Intermediate;

  bool operator==(const ActorState&) const = default;
};

struct PlatformState {
  ScreenClass screen_class = ScreenClass::Tablet;
  double screen_luminosity = 0.8;  // [0, 1]
  std::string os_family = "generic";

  bool operator==(const PlatformState&) const = default;
};

struct EnvironmentState {
  Location location = Location::Indoor;
  double ambient_brightness = 0.5;  // 0 = dark room, 1 = direct sunlight

  bool operator==(const EnvironmentState&) const = default;
};

struct ContextState {
  UiConfig ui;
  ActorState actor;
  PlatformState platform;
  EnvironmentState environment;

  bool operator==(const ContextState&) const = default;
};

void validate(const UiConfig& ui);
void validate(const ActorState& actor);
void validate(const PlatformState& platform);
void validate(const EnvironmentState& environment);
void validate(const ContextState& ctx);

/// All 12 (layout, theme, font) combinations in mixed-radix order
/// (layout most significant), each with the given item count.
std::array<UiConfig, kNumUiConfigs> all_ui_configs(int item_count);

/// Index of `ui` in all_ui_configs(); ignores item_count.
std::size_t ui_config_index(const UiConfig& ui);

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

/// The 8 actions in declaration order; NoAdapt is last.
const std::array<AdaptationAction, kNumActions>& action_set();

constexpr std::size_t action_index(AdaptationAction a) { return static_cast<std::size_t>(a); }

/// Throws Error(Range) when i >= 8.
AdaptationAction action_at(std::size_t i);

UiConfig apply_action(UiConfig ui, AdaptationAction action);

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

/// State dimensions that can enter the tabular index.
enum class TabularDim : std::uint8_t {
  Layout,
  Theme,
  FontSize,
  EmotionBin,
  BrightnessBin,
  AgeBucket,
  Experience,
  ScreenClass,
  Location,
};

template <>
struct EnumNames<TabularDim> {
  static constexpr std::array<std::string_view, 9> names{
      "Layout",     "Theme",      "FontSize",    "EmotionBin", "BrightnessBin",
      "AgeBucket",  "Experience", "ScreenClass", "Location"};
};

/// Maps a ContextState to a tabular index. A continuous value v falls in bin
/// `#{b in boundaries : b <= v}`, so a boundary belongs to the bin above it.
/// The index is mixed-radix over `tabular_dims`, first dimension most
/// significant.
struct Discretization {
  std::vector<double> emotion_boundaries{-1.0 / 3.0, 1.0 / 3.0};
  // 0.5 is the default follow-ambient theme threshold, 0.7 the dark-theme
  // glare threshold.
  std::vector<double> brightness_boundaries{0.5, 0.7};
  std::vector<TabularDim> tabular_dims{TabularDim::Layout, TabularDim::Theme,
                                       TabularDim::FontSize, TabularDim::EmotionBin,
                                       TabularDim::BrightnessBin};

  void validate() const;
  std::size_t cardinality(TabularDim dim) const;
  std::size_t state_count() const;

  bool operator==(const Discretization&) const = default;
};

using StateIndex = std::size_t;

/// Bucket per tabular dimension, in `tabular_dims` order.
struct DiscreteState {
  std::vector<std::size_t> buckets;

  bool operator==(const DiscreteState&) const = default;
};

std::size_t bin_of(double value, const std::vector<double>& boundaries);

/// Bucket of `ctx` along one dimension.
std::size_t bucket_of(const ContextState& ctx, TabularDim dim, const Discretization& d);

StateIndex encode_state(const ContextState& ctx, const Discretization& d);
StateIndex encode_buckets(const DiscreteState& state, const Discretization& d);

/// Throws Error(Range) when index >= d.state_count().
DiscreteState decode_tabular(StateIndex index, const Discretization& d);

/// A ContextState that encodes to `state`: `base` with each tabular dimension
/// overwritten by its bucket's representative (bin midpoint for continuous
/// dimensions).
ContextState representative_context(const DiscreteState& state, const Discretization& d,
                                    ContextState base = {});

// ---------------------------------------------------------------------------
// Key/value text form: space-separated `key=value` tokens, enum values by name.
// ---------------------------------------------------------------------------

std::string to_kv(const UiConfig& ui);
std::string to_kv(const ContextState& ctx);
UiConfig ui_from_kv(std::string_view text);
ContextState context_from_kv(std::string_view text);

}  // namespace uiadapt
