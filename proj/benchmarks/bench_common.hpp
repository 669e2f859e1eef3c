#pragma once

#include <random>
#include <string>

#include "anycap/text_metrics.hpp"

namespace anycap::bench {

inline TokenSeq random_tokens(std::mt19937_64& rng, std::size_t len, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  TokenSeq out(len);
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

inline std::string random_text(std::mt19937_64& rng, std::size_t len, std::size_t vocab) {
  std::string s;
  for (const auto& t : random_tokens(rng, len, vocab)) s += (s.empty() ? "" : " ") + t;
  return s;
}

}  // namespace anycap::bench
