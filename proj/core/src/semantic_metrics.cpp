#include "anycap/semantic_metrics.hpp"

#include <cmath>
#include <set>

#include <Eigen/Core>

#include "anycap/error.hpp"
#include "anycap/text_metrics.hpp"

namespace anycap {

IdfWeights IdfWeights::from_corpus(std::span<const std::string> references) {
  IdfWeights idf;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& text : references) {
    auto toks = tokenize(text);
    std::set<std::string> uniq(toks.begin(), toks.end());
    for (const auto& t : uniq) ++df[t];
  }
  const double m = static_cast<double>(references.size());
  for (const auto& [tok, count] : df) idf.weights[tok] = std::log((m + 1.0) / (static_cast<double>(count) + 1.0));
  idf.default_weight = std::log(m + 1.0);
  return idf;
}

double IdfWeights::weight(const std::string& token) const {
  auto it = weights.find(token);
  return it == weights.end() ? default_weight : it->second;
}

namespace {

Eigen::MatrixXd stack(std::span<const Embedding> vs, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vs.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != dim)
      throw ShapeError("embedding dimension mismatch: " + std::to_string(vs[i].size()) + " vs " +
                       std::to_string(dim));
    m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(vs[i].data(), static_cast<Eigen::Index>(dim));
  }
  return m;
}

double weighted_mean(const Eigen::VectorXd& best, std::span<const double> weights) {
  if (weights.empty()) return best.mean();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < best.size(); ++i) {
    num += weights[static_cast<std::size_t>(i)] * best[i];
    den += weights[static_cast<std::size_t>(i)];
  }
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

BertScore greedy_match(std::span<const Embedding> cand, std::span<const Embedding> ref,
                       std::span<const double> cand_weights, std::span<const double> ref_weights) {
  if (cand.empty() || ref.empty()) throw InvalidArgument("bertscore: both sides need at least one token");
  if ((!cand_weights.empty() && cand_weights.size() != cand.size()) ||
      (!ref_weights.empty() && ref_weights.size() != ref.size()))
    throw ShapeError("bertscore: weight count does not match token count");
  const std::size_t dim = cand.front().size();
  const Eigen::MatrixXd sim = stack(cand, dim) * stack(ref, dim).transpose();
  BertScore s;
  s.precision = 100.0 * weighted_mean(sim.rowwise().maxCoeff(), cand_weights);
  s.recall = 100.0 * weighted_mean(sim.colwise().maxCoeff().transpose(), ref_weights);
  // The harmonic mean is unbounded when P and R have opposite signs; those
  // pairs score 0.
  const double sum = s.precision + s.recall;
  s.f1 = s.precision * s.recall <= 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

BertScore bertscore(std::string_view cand_text, std::string_view ref_text, EmbeddingProvider& provider,
                    const IdfWeights* idf) {
  auto cand = provider.embed_tokens(cand_text);
  auto ref = provider.embed_tokens(ref_text);
  if (cand.empty() || ref.empty()) throw InvalidArgument("bertscore: text has no tokens");
  if (!idf) return greedy_match(cand, ref);

  auto weights_for = [idf](std::string_view text, std::size_t expected) {
    std::vector<double> w;
    for (const auto& t : tokenize(text)) w.push_back(idf->weight(t));
    if (w.size() != expected)
      throw ShapeError("bertscore: idf weighting needs the provider to tokenize like tokenize()");
    return w;
  };
  auto cw = weights_for(cand_text, cand.size());
  auto rw = weights_for(ref_text, ref.size());
  return greedy_match(cand, ref, cw, rw);
}

double clip_text_sim(std::string_view text, std::span<const std::string> frame_refs,
                     EmbeddingProvider& provider) {
  if (frame_refs.empty()) throw InvalidArgument("clip_text_sim: no frames");
  const Embedding t = provider.embed_text(text);
  double sum = 0.0;
  for (const auto& f : frame_refs) sum += dot(t, provider.embed_image(f));
  return 100.0 * sum / static_cast<double>(frame_refs.size());
}

double identity_preservation(std::span<const std::string> identity_refs,
                             std::span<const std::string> frame_refs, EmbeddingProvider& provider) {
  if (identity_refs.empty() || frame_refs.empty())
    throw InvalidArgument("identity_preservation: identity and frame lists must be non-empty");
  std::vector<Embedding> frames;
  frames.reserve(frame_refs.size());
  for (const auto& f : frame_refs) frames.push_back(provider.embed_image(f));
  double sum = 0.0;
  for (const auto& id : identity_refs) {
    const Embedding e = provider.embed_image(id);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& f : frames) best = std::max(best, dot(e, f));
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(identity_refs.size());
}

}  // namespace anycap
