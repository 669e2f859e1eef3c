#include "anycap/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"

namespace anycap {

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  for (std::string_view raw : strings::split_ws(text)) {
    while (!raw.empty() && std::ispunct(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::ispunct(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (!raw.empty()) out.push_back(strings::to_lower(raw));
  }
  return out;
}

std::size_t word_count(std::string_view text) { return tokenize(text).size(); }

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const TokenSeq& toks, std::size_t k) {
  NgramCounts counts;
  if (toks.size() < k) return counts;
  for (std::size_t i = 0; i + k <= toks.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < k; ++j) {
      if (j) key.push_back('\x1f');
      key.append(toks[i + j]);
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

LexicalScore bleu_n(const TokenSeq& cand, const TokenSeq& ref, int n) {
  if (n < 1) throw InvalidArgument("bleu_n: order must be >= 1");
  if (cand.empty() || ref.empty()) return {0.0, true};

  const std::size_t max_order = std::min<std::size_t>(static_cast<std::size_t>(n), cand.size());
  double log_sum = 0.0;
  for (std::size_t k = 1; k <= max_order; ++k) {
    NgramCounts c = count_ngrams(cand, k);
    NgramCounts r = count_ngrams(ref, k);
    int matched = 0;
    for (const auto& [gram, count] : c) {
      auto it = r.find(gram);
      if (it != r.end()) matched += std::min(count, it->second);
    }
    if (matched == 0) return {0.0, false};
    const auto total = static_cast<double>(cand.size() - k + 1);
    log_sum += std::log(matched / total);
  }
  double bp = 1.0;
  if (cand.size() < ref.size())
    bp = std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size()));
  return {100.0 * bp * std::exp(log_sum / static_cast<double>(max_order)), false};
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

LexicalScore rouge_l(const TokenSeq& cand, const TokenSeq& ref) {
  if (cand.empty() || ref.empty()) return {0.0, true};
  const auto l = static_cast<double>(lcs_length(cand, ref));
  if (l == 0.0) return {0.0, false};
  const double p = l / static_cast<double>(cand.size());
  const double r = l / static_cast<double>(ref.size());
  return {100.0 * 2.0 * p * r / (p + r), false};
}

namespace {

constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

// One matching stage over the tokens left unaligned by earlier stages,
// compared through their keys. Repeatedly aligns the longest run of equal
// consecutive free tokens (earliest candidate position first, then the
// reference position nearest to it), so repeated words are placed where
// they keep chunks together. Every equal free pair ends up aligned, which
// keeps the match count maximal.
void align_stage(const std::vector<std::string>& cand_keys, const std::vector<std::string>& ref_keys,
                 std::vector<std::size_t>& cand_to_ref, std::vector<bool>& ref_used) {
  const std::size_t n = cand_keys.size(), m = ref_keys.size();
  // Equal-key pairs in (i, j) order; the run table is only touched there.
  std::unordered_map<std::string_view, std::vector<std::size_t>> ref_pos;
  for (std::size_t j = 0; j < m; ++j) ref_pos[ref_keys[j]].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    if (auto it = ref_pos.find(cand_keys[i]); it != ref_pos.end())
      for (std::size_t j : it->second) pairs.emplace_back(i, j);

  std::vector<std::size_t> run((n + 1) * (m + 1), 0);
  auto cell = [&](std::size_t i, std::size_t j) -> std::size_t& { return run[i * (m + 1) + j]; };
  while (true) {
    for (auto p = pairs.rbegin(); p != pairs.rend(); ++p) {
      const auto [i, j] = *p;
      const bool free = cand_to_ref[i] == kUnmatched && !ref_used[j];
      cell(i, j) = free ? 1 + cell(i + 1, j + 1) : 0;
    }
    std::size_t best_len = 0, best_i = 0, best_j = 0, best_gap = 0;
    for (const auto& [i, j] : pairs) {
      const std::size_t len = cell(i, j);
      if (len == 0) continue;
      const std::size_t gap = i > j ? i - j : j - i;
      if (len > best_len || (len == best_len && i == best_i && gap < best_gap)) {
        best_len = len;
        best_i = i;
        best_j = j;
        best_gap = gap;
      }
    }
    if (best_len == 0) return;
    for (std::size_t k = 0; k < best_len; ++k) {
      cand_to_ref[best_i + k] = best_j + k;
      ref_used[best_j + k] = true;
    }
  }
}

}  // namespace

MeteorDetail meteor_detail(const TokenSeq& cand, const TokenSeq& ref, const MeteorOptions& opts) {
  MeteorDetail d;
  if (cand.empty() || ref.empty()) {
    d.degenerate = true;
    return d;
  }
  std::vector<std::size_t> cand_to_ref(cand.size(), kUnmatched);
  std::vector<bool> ref_used(ref.size(), false);
  align_stage(cand, ref, cand_to_ref, ref_used);
  if (opts.use_stemming) {
    std::vector<std::string> cs, rs;
    cs.reserve(cand.size());
    rs.reserve(ref.size());
    for (const auto& t : cand) cs.push_back(porter_stem(t));
    for (const auto& t : ref) rs.push_back(porter_stem(t));
    align_stage(cs, rs, cand_to_ref, ref_used);
  }

  for (std::size_t i = 0; i < cand.size(); ++i)
    if (cand_to_ref[i] != kUnmatched) d.alignment.emplace_back(i, cand_to_ref[i]);
  d.matches = d.alignment.size();
  if (d.matches == 0) return d;

  d.chunks = 1;
  for (std::size_t a = 1; a < d.alignment.size(); ++a) {
    const auto& [pi, pj] = d.alignment[a - 1];
    const auto& [ci, cj] = d.alignment[a];
    if (ci != pi + 1 || cj != pj + 1) ++d.chunks;
  }

  const auto m = static_cast<double>(d.matches);
  d.precision = m / static_cast<double>(cand.size());
  d.recall = m / static_cast<double>(ref.size());
  d.fmean = d.precision * d.recall / (opts.alpha * d.precision + (1.0 - opts.alpha) * d.recall);
  d.penalty = opts.gamma * std::pow(static_cast<double>(d.chunks) / m, opts.beta);
  d.value = 100.0 * d.fmean * (1.0 - d.penalty);
  return d;
}

LexicalScore meteor(const TokenSeq& cand, const TokenSeq& ref, const MeteorOptions& opts) {
  auto d = meteor_detail(cand, ref, opts);
  return {d.value, d.degenerate};
}

LexicalMeans corpus_lexical(std::span<const std::string> cands, std::span<const std::string> refs,
                            int bleu_order) {
  if (cands.size() != refs.size())
    throw ShapeError("corpus_lexical: " + std::to_string(cands.size()) + " candidates vs " +
                     std::to_string(refs.size()) + " references");
  if (cands.empty()) throw InvalidArgument("corpus_lexical: empty corpus");
  LexicalMeans out;
  out.pairs = cands.size();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    TokenSeq c = tokenize(cands[i]);
    TokenSeq r = tokenize(refs[i]);
    auto b = bleu_n(c, r, bleu_order);
    auto l = rouge_l(c, r);
    auto m = meteor(c, r);
    out.bleu += b.value;
    out.rouge_l += l.value;
    out.meteor += m.value;
    out.degenerate_pairs += (b.degenerate || l.degenerate || m.degenerate);
  }
  const auto n = static_cast<double>(cands.size());
  out.bleu /= n;
  out.rouge_l /= n;
  out.meteor /= n;
  return out;
}

}  // namespace anycap
