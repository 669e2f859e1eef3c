#include "anycap/conditions.hpp"

#include <algorithm>
#include <array>
#include <nlohmann/json.hpp>

#include "anycap/error.hpp"

namespace anycap {

namespace {
constexpr std::array<std::string_view, 4> kKindNames = {"depth", "identities", "pose", "camera"};
}

std::string_view condition_kind_name(ConditionKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ConditionKind> condition_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<ConditionKind>(i);
  return std::nullopt;
}

std::size_t Condition::annotation_count() const {
  return kind == ConditionKind::kIdentities ? refs.size() : 1;
}

namespace {
void check_item(const Condition& c) {
  if (c.refs.empty())
    throw InvalidArgument(std::string(condition_kind_name(c.kind)) + " condition has no reference");
  if (c.kind != ConditionKind::kIdentities && c.refs.size() != 1)
    throw InvalidArgument(std::string(condition_kind_name(c.kind)) +
                          " condition takes exactly one reference");
}
}  // namespace

ConditionSet::ConditionSet(std::vector<Condition> items) {
  for (auto& item : items) add(std::move(item));
}

void ConditionSet::add(Condition item) {
  check_item(item);
  if (item.kind != ConditionKind::kIdentities && contains(item.kind))
    throw InvalidArgument("condition kind '" + std::string(condition_kind_name(item.kind)) +
                          "' may appear only once");
  items_.push_back(std::move(item));
}

bool ConditionSet::contains(ConditionKind kind) const {
  return std::any_of(items_.begin(), items_.end(), [kind](const Condition& c) { return c.kind == kind; });
}

nlohmann::json condition_to_json(const Condition& c) {
  nlohmann::json j;
  j["type"] = condition_kind_name(c.kind);
  if (c.kind == ConditionKind::kIdentities) {
    j["refs"] = c.refs;
  } else {
    j["ref"] = c.refs.front();
  }
  if (!c.summary.empty()) j["summary"] = c.summary;
  return j;
}

Condition condition_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("condition must be an object");
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) throw InvalidArgument("type: missing or not a string");
  auto kind = condition_kind_from_name(type_it->get<std::string>());
  if (!kind) throw InvalidArgument("type: unknown condition type '" + type_it->get<std::string>() + "'");
  Condition c;
  c.kind = *kind;
  if (c.kind == ConditionKind::kIdentities) {
    auto it = j.find("refs");
    if (it == j.end() || !it->is_array() || it->empty())
      throw InvalidArgument("refs: identities need a non-empty array");
    for (const auto& r : *it) {
      if (!r.is_string()) throw InvalidArgument("refs: entries must be strings");
      c.refs.push_back(r.get<std::string>());
    }
  } else {
    auto it = j.find("ref");
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty())
      throw InvalidArgument("ref: missing or not a non-empty string");
    c.refs.push_back(it->get<std::string>());
  }
  if (auto it = j.find("summary"); it != j.end()) {
    if (!it->is_string()) throw InvalidArgument("summary: must be a string");
    c.summary = it->get<std::string>();
  }
  return c;
}

}  // namespace anycap
