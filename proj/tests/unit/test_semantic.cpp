#include <gtest/gtest.h>

#include <atomic>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#include "anycap/embedding.hpp"
#include "anycap/error.hpp"
#include "anycap/http.hpp"
#include "anycap/semantic_metrics.hpp"
#include "anycap/text_metrics.hpp"
#include "local_server.hpp"
#include "test_support.hpp"

namespace anycap {
namespace {

RemoteProviderConfig endpoint_config(const testing::LocalServer& server) {
  RemoteProviderConfig c;
  c.endpoint = server.endpoint();
  return c;
}

// One-hot vector per distinct key: distinct tokens are mutually orthogonal.
class OneHotProvider final : public EmbeddingProvider {
 public:
  std::string describe() const override { return "one-hot"; }
  std::vector<Embedding> embed_tokens(std::string_view text) override {
    std::vector<Embedding> out;
    for (const auto& t : tokenize(text)) out.push_back(vec(t));
    return out;
  }
  Embedding embed_text(std::string_view text) override { return vec("text:" + std::string(text)); }
  Embedding embed_image(std::string_view ref) override {
    // "same-as:<text>" images embed like that text, to build identical pairs.
    if (ref.rfind("same-as:", 0) == 0) return vec("text:" + std::string(ref.substr(8)));
    return vec("image:" + std::string(ref));
  }

 private:
  Embedding vec(const std::string& key) {
    auto [it, _] = ids_.emplace(key, ids_.size());
    Embedding e(64, 0.0);
    e.at(it->second) = 1.0;
    return e;
  }
  std::map<std::string, std::size_t> ids_;
};

// Exhaustive reference: full cosine table, then row and column maxima.
struct Oracle {
  double p, r, f;
};
Oracle exhaustive(const std::vector<Embedding>& c, const std::vector<Embedding>& r) {
  std::vector<std::vector<double>> table(c.size(), std::vector<double>(r.size()));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      double d = 0, nc = 0, nr = 0;
      for (std::size_t k = 0; k < c[i].size(); ++k) {
        d += c[i][k] * r[j][k];
        nc += c[i][k] * c[i][k];
        nr += r[j][k] * r[j][k];
      }
      table[i][j] = d / std::sqrt(nc * nr);
    }
  double p = 0, rr = 0;
  for (std::size_t i = 0; i < c.size(); ++i) p += *std::max_element(table[i].begin(), table[i].end());
  for (std::size_t j = 0; j < r.size(); ++j) {
    double best = -2;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, table[i][j]);
    rr += best;
  }
  p = 100 * p / double(c.size());
  rr = 100 * rr / double(r.size());
  return {p, rr, 2 * p * rr / (p + rr)};
}

TEST(MockProvider, UnitNormDeterministicDistinct) {
  MockProvider a(16, 7), b(16, 7), other(16, 8);
  auto va = a.embed_text("hello"), vb = b.embed_text("hello");
  EXPECT_EQ(va, vb);
  EXPECT_NEAR(l2_norm(va), 1.0, 1e-12);
  EXPECT_LT(std::abs(cosine(va, a.embed_text("world"))), 1.0);
  EXPECT_NE(va, other.embed_text("hello"));
  EXPECT_NE(a.embed_text("x"), a.embed_image("x"));
  MockProvider nonneg(16, 7, true);
  for (double x : nonneg.embed_image("frame")) EXPECT_GE(x, 0.0);
}

TEST(BertScore, IdentityIsHundred) {
  MockProvider mock(32, 1);
  OneHotProvider onehot;
  for (EmbeddingProvider* p : std::initializer_list<EmbeddingProvider*>{&mock, &onehot}) {
    auto s = bertscore("a small dog runs in the park", "a small dog runs in the park", *p);
    EXPECT_NEAR(s.precision, 100.0, 1e-6);
    EXPECT_NEAR(s.recall, 100.0, 1e-6);
    EXPECT_NEAR(s.f1, 100.0, 1e-6);
  }
}

TEST(BertScore, OrthogonalDisjointIsZero) {
  OneHotProvider p;
  EXPECT_DOUBLE_EQ(bertscore("red car", "blue boat sails", p).f1, 0.0);
}

TEST(BertScore, TwoVersusThreeMatchesOracle) {
  MockProvider p(16, 7);
  auto s = bertscore("dog runs", "a cat sleeps", p);
  auto o = exhaustive(p.embed_tokens("dog runs"), p.embed_tokens("a cat sleeps"));
  EXPECT_NEAR(s.precision, o.p, 1e-9);
  EXPECT_NEAR(s.recall, o.r, 1e-9);
  EXPECT_NEAR(s.f1, o.f, 1e-9);
}

TEST(BertScore, SwapSymmetryAndOrderInvariance) {
  MockProvider p(16, 3);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    auto c = testing::random_tokens(rng, 8, 12, 1), r = testing::random_tokens(rng, 8, 12, 1);
    auto join = [](const TokenSeq& t) {
      std::string s;
      for (auto& w : t) s += w + " ";
      return s;
    };
    auto ab = bertscore(join(c), join(r), p), ba = bertscore(join(r), join(c), p);
    EXPECT_NEAR(ab.precision, ba.recall, 1e-12);
    EXPECT_NEAR(ab.recall, ba.precision, 1e-12);
    EXPECT_NEAR(ab.f1, ba.f1, 1e-12);
    auto shuffled = c;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(bertscore(join(shuffled), join(r), p).f1, ab.f1, 1e-9);
    EXPECT_GE(ab.f1, -100.0);
    EXPECT_LE(ab.f1, 100.0);
  }
}

TEST(BertScore, NonNegativeProviderBounds) {
  MockProvider p(16, 9, true);
  auto s = bertscore("one two three", "four five", p);
  EXPECT_GE(s.f1, 0.0);
  EXPECT_LE(s.f1, 100.0);
}

TEST(BertScore, EmptyThrows) {
  MockProvider p(8, 1);
  EXPECT_THROW(bertscore("...", "a", p), InvalidArgument);
}

TEST(BertScore, IdfWeightsDownweightCommonTokens) {
  std::vector<std::string> refs{"the dog", "the cat", "the bird"};
  auto idf = IdfWeights::from_corpus(refs);
  EXPECT_LT(idf.weight("the"), idf.weight("dog"));
  MockProvider p(16, 2);
  auto plain = bertscore("the fish", "the dog", p);
  auto weighted = bertscore("the fish", "the dog", p, &idf);
  EXPECT_NE(plain.f1, weighted.f1);
}

TEST(ClipTextSim, Examples) {
  OneHotProvider p;
  std::vector<std::string> same{"same-as:a dog", "same-as:a dog"};
  EXPECT_NEAR(clip_text_sim("a dog", same, p), 100.0, 1e-12);
  std::vector<std::string> other{"f1.png", "f2.png"};
  EXPECT_NEAR(clip_text_sim("a dog", other, p), 0.0, 1e-12);
  MockProvider m(16, 5);
  std::vector<std::string> three{"f1", "f2", "f3"};
  double expect = 0;
  for (auto& f : three) expect += cosine(m.embed_text("caption"), m.embed_image(f));
  EXPECT_NEAR(clip_text_sim("caption", three, m), 100 * expect / 3, 1e-9);
  EXPECT_THROW(clip_text_sim("x", std::vector<std::string>{}, m), InvalidArgument);
}

TEST(IdentityPreservation, Examples) {
  MockProvider m(16, 5);
  std::vector<std::string> ids{"id_a.png"}, frames{"f0", "id_a.png", "f2"};
  EXPECT_NEAR(identity_preservation(ids, frames, m), 100.0, 1e-9);
  OneHotProvider p;
  std::vector<std::string> fr{"f0", "f1"};
  EXPECT_NEAR(identity_preservation(ids, fr, p), 0.0, 1e-12);
  // 2 identities x 4 frames against the full cosine matrix.
  std::vector<std::string> two{"idA", "idB"}, four{"g0", "g1", "g2", "g3"};
  double sum = 0;
  for (auto& i : two) {
    double best = -2;
    for (auto& f : four) best = std::max(best, cosine(m.embed_image(i), m.embed_image(f)));
    sum += best;
  }
  EXPECT_NEAR(identity_preservation(two, four, m), 100 * sum / 2, 1e-9);
  EXPECT_THROW(identity_preservation(std::vector<std::string>{}, four, m), InvalidArgument);
}

TEST(RemoteProvider, RoundTripAndAuth) {
  MockProvider mock(8, 3);
  std::atomic<int> calls{0};
  std::string seen_auth;
  testing::LocalServer server("/v1/embed", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    seen_auth = req.get_header_value("Authorization");
    auto body = nlohmann::json::parse(req.body);
    std::string kind = body["kind"], payload = body["payload"];
    nlohmann::json vectors = nlohmann::json::array();
    if (kind == "token")
      for (auto& v : mock.embed_tokens(payload)) vectors.push_back(v);
    else if (kind == "text")
      vectors.push_back(mock.embed_text(payload));
    else
      vectors.push_back(mock.embed_image(payload));
    res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
  });
  RemoteProvider remote({server.endpoint(), "/v1/embed", "secret", 5});
  auto toks = remote.embed_tokens("two words");
  ASSERT_EQ(toks.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(toks[i][k], mock.embed_tokens("two words")[i][k], 1e-12);
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_NEAR(bertscore("a b", "a b", remote).f1, 100.0, 1e-6);

  testing::TempDir dir;
  auto cached = std::make_shared<CachingProvider>(std::make_shared<RemoteProvider>(endpoint_config(server)),
                                                  dir / "cache.jsonl", 2);
  int before = calls.load();
  cached->embed_text("x");
  cached->embed_text("x");
  EXPECT_EQ(calls.load(), before + 1);
  CachingProvider reloaded(std::make_shared<RemoteProvider>(endpoint_config(server)), dir / "cache.jsonl");
  EXPECT_EQ(reloaded.cached_entries(), 1u);
  reloaded.embed_text("x");
  EXPECT_EQ(calls.load(), before + 1);
}

TEST(RemoteProvider, HttpErrorsSurface) {
  testing::LocalServer server("/v1/embed", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("busy", "text/plain");
  });
  RemoteProvider remote(endpoint_config(server));
  try {
    remote.embed_text("x");
    FAIL();
  } catch (const HttpError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  RemoteProvider nowhere({"http://127.0.0.1:1", "/v1/embed", "", 1});
  EXPECT_THROW(nowhere.embed_text("x"), HttpError);
}

// Counts concurrent calls to verify the in-flight cap.
class SlowProvider final : public EmbeddingProvider {
 public:
  std::string describe() const override { return "slow"; }
  std::vector<Embedding> embed_tokens(std::string_view t) override { return {embed_text(t)}; }
  Embedding embed_text(std::string_view t) override {
    int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --active;
    return inner.embed_text(t);
  }
  Embedding embed_image(std::string_view r) override { return embed_text(r); }
  std::atomic<int> active{0}, peak{0};
  MockProvider inner{8, 1};
};

TEST(CachingProvider, InFlightCapAndMemo) {
  auto slow = std::make_shared<SlowProvider>();
  CachingProvider cache(slow, {}, 2);
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 4; ++i) cache.embed_text("k" + std::to_string(t * 4 + i));
    });
  threads.clear();
  EXPECT_LE(slow->peak.load(), 2);
  EXPECT_EQ(cache.inner_calls(), 32u);
  cache.embed_text("k0");
  EXPECT_EQ(cache.inner_calls(), 32u);
}

}  // namespace
}  // namespace anycap
