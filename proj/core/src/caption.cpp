#include "anycap/caption.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"

namespace anycap {

namespace {

struct ComponentNames {
  std::string_view header;
  std::string_view key;
};

constexpr std::array<ComponentNames, kNumComponents> kNames = {{
    {"Dense Caption:", "dense"},
    {"Main Object Caption:", "main_object"},
    {"Background Caption:", "background"},
    {"Camera Caption:", "camera"},
    {"Style Caption:", "style"},
    {"Action Caption:", "action"},
}};

std::optional<Component> header_of_line(std::string_view line, std::size_t* header_len) {
  std::string_view t = strings::trim(line);
  for (Component c : kAllComponents) {
    std::string_view h = component_header(c);
    if (strings::istarts_with(t, h)) {
      *header_len = static_cast<std::size_t>(t.data() - line.data()) + h.size();
      return c;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view component_header(Component c) { return kNames[static_cast<std::size_t>(c)].header; }
std::string_view component_key(Component c) { return kNames[static_cast<std::size_t>(c)].key; }

std::string_view component_title(Component c) {
  std::string_view h = component_header(c);
  return h.substr(0, h.size() - 1);
}

std::optional<Component> component_from_key(std::string_view key) {
  for (Component c : kAllComponents)
    if (component_key(c) == key) return c;
  return std::nullopt;
}

StructuredCaption& StructuredCaption::set(Component c, std::string_view text) {
  std::string_view body = strings::trim(text);
  if (body.empty())
    throw InvalidArgument(std::string(component_title(c)) + " must contain non-whitespace text");
  std::size_t unused = 0;
  for (std::string_view line : strings::lines(body)) {
    if (header_of_line(line, &unused))
      throw InvalidArgument(std::string(component_title(c)) +
                            " body contains a section header line: '" + std::string(line) + "'");
  }
  parts_[index(c)] = std::string(body);
  return *this;
}

StructuredCaption& StructuredCaption::clear(Component c) {
  parts_[index(c)].reset();
  return *this;
}

std::size_t StructuredCaption::present_count() const {
  std::size_t n = 0;
  for (const auto& p : parts_) n += p.has_value();
  return n;
}

std::string StructuredCaption::body_text() const {
  std::string out;
  for (const auto& p : parts_) {
    if (!p) continue;
    if (!out.empty()) out.push_back('\n');
    out.append(*p);
  }
  return out;
}

CaptionParse parse_structured_caption(std::string_view text) {
  CaptionParse result;
  std::array<bool, kNumComponents> seen{};
  std::array<std::string, kNumComponents> bodies;
  std::optional<Component> current;

  for (std::string_view line : strings::lines(text)) {
    std::size_t header_len = 0;
    if (auto c = header_of_line(line, &header_len)) {
      auto i = static_cast<std::size_t>(*c);
      if (seen[i]) throw ParseError("duplicate section header '" + std::string(component_header(*c)) + "'");
      seen[i] = true;
      current = c;
      bodies[i].append(line.substr(header_len));
      continue;
    }
    if (!current) {
      if (!strings::is_blank(line)) result.preamble_ignored = true;
      continue;
    }
    auto& body = bodies[static_cast<std::size_t>(*current)];
    body.push_back('\n');
    body.append(line);
  }

  for (Component c : kAllComponents) {
    const auto& body = bodies[static_cast<std::size_t>(c)];
    if (strings::is_blank(body)) {
      result.missing.push_back(c);
    } else {
      result.caption.set(c, body);
    }
  }
  return result;
}

std::string serialize_structured_caption(const StructuredCaption& caption) {
  std::string out;
  for (Component c : kAllComponents) {
    const auto& body = caption.get(c);
    if (!body) continue;
    if (!out.empty()) out.push_back('\n');
    out.append(component_header(c));
    out.push_back(' ');
    out.append(*body);
    out.push_back('\n');
  }
  return out;
}

nlohmann::json caption_to_json(const StructuredCaption& caption) {
  nlohmann::json j = nlohmann::json::object();
  for (Component c : kAllComponents)
    if (const auto& body = caption.get(c)) j[std::string(component_key(c))] = *body;
  return j;
}

StructuredCaption caption_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_structured_caption(j.get<std::string>()).caption;
  if (!j.is_object()) throw InvalidArgument("structured caption must be an object or a string");
  StructuredCaption caption;
  for (const auto& [key, value] : j.items()) {
    auto c = component_from_key(key);
    if (!c) throw InvalidArgument("unknown caption component '" + key + "'");
    if (!value.is_string()) throw InvalidArgument("caption component '" + key + "' must be a string");
    caption.set(*c, value.get<std::string>());
  }
  return caption;
}

double round_half_up_2(double value) { return std::floor(value * 100.0 + 0.5) / 100.0; }

double structural_integrity(const StructuredCaption& caption) {
  return round_half_up_2(100.0 * static_cast<double>(caption.present_count()) / kNumComponents);
}

double corpus_integrity(std::span<const StructuredCaption> captions) {
  if (captions.empty()) throw InvalidArgument("corpus_integrity: empty caption list");
  std::size_t present = 0;
  for (const auto& c : captions) present += c.present_count();
  // Integer numerator keeps the mean exact before the final rounding.
  return round_half_up_2(100.0 * static_cast<double>(present) /
                         static_cast<double>(captions.size() * kNumComponents));
}

ShortPrompt::ShortPrompt(std::string text) : text_(std::move(text)) {
  if (strings::is_blank(text_)) throw InvalidArgument("short prompt is blank");
}

}  // namespace anycap
