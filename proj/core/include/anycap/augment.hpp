#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anycap/conditions.hpp"

namespace anycap {

/// Splits on '.', '!' or '?' followed by whitespace or end of text.
/// Abbreviations ("Dr. Smith") are split too. Sentences are returned
/// trimmed; blank input yields no sentences.
std::vector<std::string> split_sentences(std::string_view text);

/// Drops each sentence independently with probability `rate`, keeping order.
/// At least one sentence survives: if every sentence is dropped, one is
/// restored, chosen uniformly by the same generator. When nothing is dropped
/// the input is returned unchanged; otherwise survivors are joined by a space.
std::string sentence_dropout(std::string_view text, double rate, std::uint64_t seed);

/// Same scheme applied to condition items.
ConditionSet condition_dropout(const ConditionSet& conditions, double rate, std::uint64_t seed);

/// Shared keep-mask generator: n independent Bernoulli(rate) drops with the
/// keep-one rule. Exposed so callers can reproduce the exact selection.
std::vector<bool> dropout_keep_mask(std::size_t n, double rate, std::uint64_t seed);

}  // namespace anycap
