#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anycap/embedding.hpp"

namespace anycap {

struct BertScore {
  double precision = 0.0;  ///< x100
  double recall = 0.0;
  double f1 = 0.0;  ///< 0 when precision and recall differ in sign
};

/// Per-token weights for the optional idf variant. Tokens not in `weights`
/// get `default_weight`.
struct IdfWeights {
  std::unordered_map<std::string, double> weights;
  double default_weight = 1.0;

  /// idf(w) = log((M + 1) / (df(w) + 1)) over a reference corpus of M texts.
  static IdfWeights from_corpus(std::span<const std::string> references);
  double weight(const std::string& token) const;
};

/// Greedy max-cosine matching on precomputed unit vectors.
/// Recall averages, over reference tokens, the best cosine against any
/// candidate token; precision is the mirror image. Optional weights must
/// match the vector counts.
BertScore greedy_match(std::span<const Embedding> cand, std::span<const Embedding> ref,
                       std::span<const double> cand_weights = {},
                       std::span<const double> ref_weights = {});

/// BERTScore-style similarity. Throws InvalidArgument when either text has
/// no tokens. `idf` is off unless provided.
BertScore bertscore(std::string_view cand_text, std::string_view ref_text, EmbeddingProvider& provider,
                    const IdfWeights* idf = nullptr);

/// Mean over frames of cos(text, frame) x 100.
double clip_text_sim(std::string_view text, std::span<const std::string> frame_refs,
                     EmbeddingProvider& provider);

/// For each identity image the best cosine over frames; mean over
/// identities, x100. Reported as CLIP-I or DINO-I depending on the provider.
double identity_preservation(std::span<const std::string> identity_refs,
                             std::span<const std::string> frame_refs, EmbeddingProvider& provider);

}  // namespace anycap
