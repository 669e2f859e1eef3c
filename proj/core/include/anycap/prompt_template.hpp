#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anycap {

/// Named slot values for rendering.
using SlotValues = std::map<std::string, std::string, std::less<>>;

/// Machine-checkable constraints declared by a template header.
struct PromptConstraints {
  std::optional<std::size_t> max_words;
  /// Terms (case-insensitive, whole-word) that must not appear.
  std::vector<std::string> forbidden_terms;
  /// Input slot holding a comma-separated list of phrases that the generated
  /// prompt must not repeat (e.g. appearance attributes already visible in
  /// the reference images).
  std::optional<std::string> avoid_terms_from;
};

/// A versioned prompt with {{slot}} placeholders.
///
/// Asset text layout:
///
///     id: shortprompt.depth
///     version: 1
///     condition_kind: depth
///     slots: caption, examples
///     max_words: 100
///     forbid: term            (repeatable)
///     avoid_terms_from: slot
///     ---
///     body...
class PromptTemplate {
 public:
  /// Throws ParseError on a malformed header or a body slot that is not
  /// declared.
  static PromptTemplate parse(std::string_view asset_text);
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& id() const { return id_; }
  int version() const { return version_; }
  const std::string& condition_kind() const { return condition_kind_; }
  const std::vector<std::string>& slots() const { return slots_; }
  const std::string& body() const { return body_; }
  const PromptConstraints& constraints() const { return constraints_; }

  /// Substitutes every slot; values are inserted literally. Throws
  /// InvalidArgument naming the first slot without a value.
  std::string render(const SlotValues& inputs) const;

 private:
  std::string id_;
  int version_ = 0;
  std::string condition_kind_;
  std::vector<std::string> slots_;
  std::string body_;
  PromptConstraints constraints_;
};

/// Slot names referenced in `body`, in first-occurrence order.
std::vector<std::string> template_slot_names(std::string_view body);

struct ConstraintViolation {
  std::string rule;    ///< "max_words", "forbidden_term", "repeats_input"
  std::string detail;
  bool operator==(const ConstraintViolation&) const = default;
};

/// Checks a generated short prompt against the template's declared
/// constraints. `inputs` supplies the slot named by avoid_terms_from.
std::vector<ConstraintViolation> check_prompt_constraints(std::string_view short_prompt,
                                                         const PromptTemplate& tmpl,
                                                         const SlotValues& inputs = {});

/// Templates by id; each id keeps a strictly increasing version history.
class TemplateRegistry {
 public:
  /// Throws InvalidArgument if `tmpl.version()` does not exceed the latest
  /// registered version for its id.
  void add(PromptTemplate tmpl);
  const PromptTemplate& latest(std::string_view id) const;
  const PromptTemplate& get(std::string_view id, int version) const;
  std::vector<std::string> ids() const;

  /// Templates compiled into the library from core/assets/templates.
  static const TemplateRegistry& builtin();

 private:
  std::map<std::string, std::vector<PromptTemplate>, std::less<>> by_id_;
};

}  // namespace anycap
