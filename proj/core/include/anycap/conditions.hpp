#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace anycap {

enum class ConditionKind { kDepth, kIdentities, kPose, kCamera };

std::string_view condition_kind_name(ConditionKind kind);
std::optional<ConditionKind> condition_kind_from_name(std::string_view name);

/// One non-text condition. Depth, pose and camera conditions reference a
/// single file; an identities condition references one or more images.
/// `summary` is an optional textual description used by judge prompts.
struct Condition {
  ConditionKind kind = ConditionKind::kDepth;
  std::vector<std::string> refs;
  std::string summary;

  /// Number of condition annotations this item contributes to dataset
  /// counts: the number of identity images, otherwise 1.
  std::size_t annotation_count() const;

  bool operator==(const Condition&) const = default;
};

/// Ordered collection of conditions. Only identities may repeat.
class ConditionSet {
 public:
  ConditionSet() = default;
  explicit ConditionSet(std::vector<Condition> items);

  /// Throws InvalidArgument if the item would violate the set invariants.
  void add(Condition item);

  const std::vector<Condition>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(ConditionKind kind) const;

  bool operator==(const ConditionSet&) const = default;

 private:
  std::vector<Condition> items_;
};

nlohmann::json condition_to_json(const Condition& c);
/// Throws SchemaError-compatible InvalidArgument with a field path in the message.
Condition condition_from_json(const nlohmann::json& j);

}  // namespace anycap
