#include "anycap/augment.hpp"

#include <cctype>
#include <cmath>

#include "anycap/error.hpp"
#include "anycap/rng.hpp"
#include "anycap/strings.hpp"

namespace anycap {

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string_view s = strings::trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    bool at_end = i + 1 == text.size();
    if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) flush(i + 1);
  }
  flush(text.size());
  return out;
}

std::vector<bool> dropout_keep_mask(std::size_t n, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1]");
  std::vector<bool> keep(n, true);
  if (n == 0) return keep;
  DeterministicRng rng(seed);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    keep[i] = !rng.bernoulli(rate);
    any = any || keep[i];
  }
  if (!any) keep[rng.below(n)] = true;
  return keep;
}

std::string sentence_dropout(std::string_view text, double rate, std::uint64_t seed) {
  auto sentences = split_sentences(text);
  auto keep = dropout_keep_mask(sentences.size(), rate, seed);
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < sentences.size(); ++i)
    if (keep[i]) kept.push_back(std::move(sentences[i]));
  if (kept.size() == keep.size()) return std::string(text);
  return strings::join(kept, " ");
}

ConditionSet condition_dropout(const ConditionSet& conditions, double rate, std::uint64_t seed) {
  auto keep = dropout_keep_mask(conditions.size(), rate, seed);
  ConditionSet out;
  for (std::size_t i = 0; i < conditions.size(); ++i)
    if (keep[i]) out.add(conditions.items()[i]);
  return out;
}

}  // namespace anycap
