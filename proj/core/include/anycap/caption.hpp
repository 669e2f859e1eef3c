#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace anycap {

/// The six components of a structured caption, in canonical order.
enum class Component { kDense, kMainObject, kBackground, kCamera, kStyle, kAction };

inline constexpr std::size_t kNumComponents = 6;
inline constexpr std::array<Component, kNumComponents> kAllComponents = {
    Component::kDense, Component::kMainObject, Component::kBackground,
    Component::kCamera, Component::kStyle, Component::kAction};

/// Section header used in the headed-text form, e.g. "Dense Caption:".
std::string_view component_header(Component c);
/// Field name used in the record form, e.g. "main_object".
std::string_view component_key(Component c);
/// Human-readable name, e.g. "Main Object Caption" (header without colon).
std::string_view component_title(Component c);
std::optional<Component> component_from_key(std::string_view key);

/// Six-component caption. Each component is optional; when present it is
/// trimmed, non-empty, and contains no line that would parse as a header.
class StructuredCaption {
 public:
  StructuredCaption() = default;

  const std::optional<std::string>& get(Component c) const { return parts_[index(c)]; }
  bool has(Component c) const { return parts_[index(c)].has_value(); }

  /// Sets a component. Throws InvalidArgument when the text is blank or
  /// embeds a section header line.
  StructuredCaption& set(Component c, std::string_view text);
  StructuredCaption& clear(Component c);

  std::size_t present_count() const;
  bool empty() const { return present_count() == 0; }

  /// Concatenation of the present component bodies separated by newlines.
  std::string body_text() const;

  bool operator==(const StructuredCaption&) const = default;

 private:
  static std::size_t index(Component c) { return static_cast<std::size_t>(c); }
  std::array<std::optional<std::string>, kNumComponents> parts_;
};

struct CaptionParse {
  StructuredCaption caption;
  /// Absent components, canonical order.
  std::vector<Component> missing;
  /// Non-blank text appeared before the first header and was dropped.
  bool preamble_ignored = false;
};

/// Parses the headed multi-section text form. Headers are matched
/// case-insensitively at the start of a line and may appear in any order;
/// a body runs until the next header or end of input. A header with an empty
/// body counts as missing. Throws ParseError on a duplicate header.
CaptionParse parse_structured_caption(std::string_view text);

/// Canonical headed-text form: present components in canonical order, one
/// block per component, blocks separated by a blank line.
std::string serialize_structured_caption(const StructuredCaption& caption);

/// Record form: {"dense": "...", "main_object": "...", ...}; absent
/// components are omitted.
nlohmann::json caption_to_json(const StructuredCaption& caption);
/// Accepts the record form or a string holding the headed-text form.
StructuredCaption caption_from_json(const nlohmann::json& j);

/// 100 * present / 6, rounded half-up to two decimals.
double structural_integrity(const StructuredCaption& caption);

/// Mean integrity over a corpus, rounded half-up to two decimals. The mean
/// is taken over unrounded per-caption fractions. Throws on an empty list.
double corpus_integrity(std::span<const StructuredCaption> captions);

/// Half-up rounding to two decimals.
double round_half_up_2(double value);

/// The user's short text prompt. Never blank.
class ShortPrompt {
 public:
  explicit ShortPrompt(std::string text);
  const std::string& text() const { return text_; }
  bool operator==(const ShortPrompt&) const = default;

 private:
  std::string text_;
};

}  // namespace anycap
