#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anycap {

/// Lowercased word tokens; never contains an empty token.
using TokenSeq = std::vector<std::string>;

/// Lowercase (ASCII), split on whitespace, strip leading/trailing ASCII
/// punctuation from each token, drop tokens that become empty.
TokenSeq tokenize(std::string_view text);

/// Number of tokens produced by tokenize(); the single word-count rule used
/// across the toolkit.
std::size_t word_count(std::string_view text);

/// A metric value in [0, 100]. `degenerate` is set when an input was empty
/// and the value was defined as 0 rather than computed.
struct LexicalScore {
  double value = 0.0;
  bool degenerate = false;
};

/// Sentence-level BLEU-n with clipped k-gram precisions and brevity penalty
/// exp(1 - |ref|/|cand|) when the candidate is shorter.
///
/// Orders k with no candidate k-gram (|cand| < k) are left out of the
/// geometric mean, so a one-token candidate equal to its reference scores
/// 100 at any n. Any included order with zero matches gives 0.
LexicalScore bleu_n(const TokenSeq& cand, const TokenSeq& ref, int n = 2);

/// Length of the longest common subsequence.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

/// ROUGE-L balanced F1 over the LCS, scaled to [0, 100].
LexicalScore rouge_l(const TokenSeq& cand, const TokenSeq& ref);

struct MeteorDetail {
  double value = 0.0;  ///< [0, 100]
  bool degenerate = false;
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  /// Aligned (candidate index, reference index) pairs, sorted by candidate.
  std::vector<std::pair<std::size_t, std::size_t>> alignment;
};

struct MeteorOptions {
  bool use_stemming = true;
  double alpha = 0.9;  ///< Fmean = PR / (alpha P + (1 - alpha) R)
  double gamma = 0.5;
  double beta = 3.0;
};

/// METEOR with exact then stem matching; no synonym stage.
/// Fmean = 10PR/(R+9P), penalty = 0.5 (chunks/m)^3, score = Fmean (1 - penalty).
MeteorDetail meteor_detail(const TokenSeq& cand, const TokenSeq& ref, const MeteorOptions& opts = {});
LexicalScore meteor(const TokenSeq& cand, const TokenSeq& ref, const MeteorOptions& opts = {});

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
std::string porter_stem(std::string_view word);

struct LexicalMeans {
  double bleu = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  std::size_t pairs = 0;
  std::size_t degenerate_pairs = 0;
};

/// Arithmetic mean of per-pair scores. Throws ShapeError on a length
/// mismatch and InvalidArgument on empty input.
LexicalMeans corpus_lexical(std::span<const std::string> cands, std::span<const std::string> refs,
                            int bleu_order = 2);

}  // namespace anycap
