#include "anycap/prompt_template.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"
#include "anycap/text_metrics.hpp"
#include "embedded_assets.hpp"

namespace anycap {

std::vector<std::string> template_slot_names(std::string_view body) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string_view::npos) {
    std::size_t end = body.find("}}", pos + 2);
    if (end == std::string_view::npos) break;
    std::string name(strings::trim(body.substr(pos + 2, end - pos - 2)));
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    pos = end + 2;
  }
  return names;
}

PromptTemplate PromptTemplate::parse(std::string_view asset_text) {
  PromptTemplate t;
  auto all_lines = strings::lines(asset_text);
  std::size_t i = 0;
  bool saw_separator = false;
  for (; i < all_lines.size(); ++i) {
    std::string_view line = strings::trim(all_lines[i]);
    if (line == "---") {
      saw_separator = true;
      ++i;
      break;
    }
    if (line.empty() || line.front() == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("template header line lacks ':'", i + 1);
    std::string key(strings::trim(line.substr(0, colon)));
    std::string value(strings::trim(line.substr(colon + 1)));
    if (key == "id") {
      t.id_ = value;
    } else if (key == "version") {
      try {
        t.version_ = std::stoi(value);
      } catch (const std::exception&) {
        throw ParseError("template version is not an integer", i + 1);
      }
    } else if (key == "condition_kind") {
      t.condition_kind_ = value;
    } else if (key == "slots") {
      std::string normalized = value;
      std::replace(normalized.begin(), normalized.end(), ',', ' ');
      for (auto s : strings::split_ws(normalized)) t.slots_.emplace_back(s);
    } else if (key == "max_words") {
      try {
        t.constraints_.max_words = std::stoul(value);
      } catch (const std::exception&) {
        throw ParseError("max_words is not an integer", i + 1);
      }
    } else if (key == "forbid") {
      t.constraints_.forbidden_terms.push_back(value);
    } else if (key == "avoid_terms_from") {
      t.constraints_.avoid_terms_from = value;
    } else {
      throw ParseError("unknown template header key '" + key + "'", i + 1);
    }
  }
  if (!saw_separator) throw ParseError("template lacks the '---' header separator");
  if (t.id_.empty()) throw ParseError("template lacks an id");
  if (t.version_ < 1) throw ParseError("template " + t.id_ + " needs a positive version");

  std::vector<std::string> body_lines;
  for (; i < all_lines.size(); ++i) body_lines.emplace_back(all_lines[i]);
  while (!body_lines.empty() && strings::is_blank(body_lines.back())) body_lines.pop_back();
  t.body_ = strings::join(body_lines, "\n");

  for (const auto& name : template_slot_names(t.body_))
    if (std::find(t.slots_.begin(), t.slots_.end(), name) == t.slots_.end())
      throw ParseError("template " + t.id_ + " uses undeclared slot '" + name + "'");
  if (t.constraints_.avoid_terms_from &&
      std::find(t.slots_.begin(), t.slots_.end(), *t.constraints_.avoid_terms_from) == t.slots_.end())
    throw ParseError("avoid_terms_from names undeclared slot '" + *t.constraints_.avoid_terms_from + "'");
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string PromptTemplate::render(const SlotValues& inputs) const {
  for (const auto& name : template_slot_names(body_))
    if (!inputs.count(name)) throw InvalidArgument("template " + id_ + ": missing value for slot '" + name + "'");
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = body_.find("{{", pos);
    std::size_t close = open == std::string::npos ? std::string::npos : body_.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(body_, pos);
      break;
    }
    out.append(body_, pos, open - pos);
    std::string name(strings::trim(std::string_view(body_).substr(open + 2, close - open - 2)));
    out.append(inputs.find(name)->second);
    pos = close + 2;
  }
  return out;
}

namespace {

// Whole-word, case-insensitive containment on the token stream.
bool contains_phrase(const TokenSeq& haystack, const TokenSeq& phrase) {
  if (phrase.empty() || phrase.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= haystack.size(); ++i)
    if (std::equal(phrase.begin(), phrase.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  return false;
}

}  // namespace

std::vector<ConstraintViolation> check_prompt_constraints(std::string_view short_prompt, const PromptTemplate& tmpl,
                                                         const SlotValues& inputs) {
  std::vector<ConstraintViolation> out;
  const auto& c = tmpl.constraints();
  const TokenSeq tokens = tokenize(short_prompt);
  if (c.max_words && tokens.size() > *c.max_words)
    out.push_back({"max_words", std::to_string(tokens.size()) + " words exceeds the limit of " +
                                    std::to_string(*c.max_words)});
  for (const auto& term : c.forbidden_terms)
    if (contains_phrase(tokens, tokenize(term))) out.push_back({"forbidden_term", term});
  if (c.avoid_terms_from) {
    auto it = inputs.find(*c.avoid_terms_from);
    if (it != inputs.end()) {
      std::string list = it->second;
      std::replace(list.begin(), list.end(), ';', ',');
      std::stringstream ss(list);
      std::string phrase;
      while (std::getline(ss, phrase, ',')) {
        std::string p(strings::trim(phrase));
        if (!p.empty() && contains_phrase(tokens, tokenize(p)))
          out.push_back({"repeats_input", "repeats '" + p + "' from " + *c.avoid_terms_from});
      }
    }
  }
  return out;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
  auto& history = by_id_[tmpl.id()];
  if (!history.empty() && tmpl.version() <= history.back().version())
    throw InvalidArgument("template " + tmpl.id() + " version " + std::to_string(tmpl.version()) +
                          " does not exceed registered version " + std::to_string(history.back().version()));
  history.push_back(std::move(tmpl));
}

const PromptTemplate& TemplateRegistry::latest(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw InvalidArgument("unknown template '" + std::string(id) + "'");
  return it->second.back();
}

const PromptTemplate& TemplateRegistry::get(std::string_view id, int version) const {
  auto it = by_id_.find(id);
  if (it != by_id_.end())
    for (const auto& t : it->second)
      if (t.version() == version) return t;
  throw InvalidArgument("unknown template '" + std::string(id) + "' version " + std::to_string(version));
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : by_id_) out.push_back(id);
  return out;
}

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry registry = [] {
    std::vector<PromptTemplate> all;
    for (const auto& asset : detail::embedded_templates()) all.push_back(PromptTemplate::parse(asset.text));
    std::sort(all.begin(), all.end(), [](const PromptTemplate& a, const PromptTemplate& b) {
      return a.id() != b.id() ? a.id() < b.id() : a.version() < b.version();
    });
    TemplateRegistry r;
    for (auto& t : all) r.add(std::move(t));
    return r;
  }();
  return registry;
}

}  // namespace anycap
