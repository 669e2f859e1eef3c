#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "anycap/caption.hpp"
#include "anycap/conditions.hpp"
#include "anycap/error.hpp"
#include "test_support.hpp"

namespace anycap {
namespace {

const char* kFull =
    "Dense Caption: A woman walks down a corridor.\n"
    "Main Object Caption: A young woman in a light blue T-shirt.\n"
    "Background Caption: A bright office corridor.\n"
    "Camera Caption: The camera moves backward.\n"
    "Style Caption: Realistic, soft daylight.\n"
    "Action Caption: She adjusts her hat while walking.\n";

TEST(ParseCaption, AllSixHeaders) {
  auto r = parse_structured_caption(kFull);
  EXPECT_TRUE(r.missing.empty());
  EXPECT_EQ(r.caption.present_count(), 6u);
  EXPECT_EQ(*r.caption.get(Component::kCamera), "The camera moves backward.");
  EXPECT_FALSE(r.preamble_ignored);
}

TEST(ParseCaption, TwoHeadersListsFourMissing) {
  auto r = parse_structured_caption("Dense Caption: a\nCamera Caption:\n  pans left\n");
  EXPECT_EQ(r.caption.present_count(), 2u);
  std::vector<Component> expect{Component::kMainObject, Component::kBackground, Component::kStyle, Component::kAction};
  EXPECT_EQ(r.missing, expect);
  EXPECT_EQ(*r.caption.get(Component::kCamera), "pans left");
}

TEST(ParseCaption, DuplicateHeaderNamesIt) {
  try {
    parse_structured_caption("Style Caption: a\nStyle Caption: b\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("Style Caption:"), std::string::npos);
  }
}

TEST(ParseCaption, CaseInsensitiveOrderFreeAndPreamble) {
  auto r = parse_structured_caption("intro text\nACTION CAPTION: runs\ndense caption: x\n");
  EXPECT_TRUE(r.preamble_ignored);
  EXPECT_EQ(*r.caption.get(Component::kAction), "runs");
  EXPECT_EQ(*r.caption.get(Component::kDense), "x");
}

TEST(ParseCaption, HeaderWithBlankBodyCountsAsMissing) {
  auto r = parse_structured_caption("Dense Caption:   \n\nStyle Caption: s");
  EXPECT_FALSE(r.caption.has(Component::kDense));
  EXPECT_EQ(r.missing.size(), 5u);
}

TEST(SerializeCaption, CanonicalOrder) {
  StructuredCaption c;
  c.set(Component::kAction, "act").set(Component::kDense, "dense");
  EXPECT_EQ(serialize_structured_caption(c), "Dense Caption: dense\n\nAction Caption: act\n");
  StructuredCaption only;
  only.set(Component::kDense, "d");
  EXPECT_EQ(serialize_structured_caption(only), "Dense Caption: d\n");
}

TEST(SerializeCaption, SixBlocks) {
  auto c = parse_structured_caption(kFull).caption;
  std::string s = serialize_structured_caption(c);
  std::size_t pos = 0;
  std::vector<std::size_t> at;
  for (Component comp : kAllComponents) {
    pos = s.find(std::string(component_header(comp)), pos);
    ASSERT_NE(pos, std::string::npos);
    at.push_back(pos);
  }
  EXPECT_TRUE(std::is_sorted(at.begin(), at.end()));
}

TEST(SerializeCaption, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto c = testing::random_caption(rng);
    auto back = parse_structured_caption(serialize_structured_caption(c));
    ASSERT_EQ(back.caption, c);
    ASSERT_EQ(caption_from_json(caption_to_json(c)), c);
  }
}

TEST(StructuredCaption, RejectsBlankAndEmbeddedHeader) {
  StructuredCaption c;
  EXPECT_THROW(c.set(Component::kDense, "   \n"), InvalidArgument);
  EXPECT_THROW(c.set(Component::kDense, "ok\nStyle Caption: sneaky"), InvalidArgument);
}

TEST(Integrity, ValuesForEachCount) {
  const double expect[] = {0.0, 16.67, 33.33, 50.0, 66.67, 83.33, 100.0};
  StructuredCaption c;
  EXPECT_DOUBLE_EQ(structural_integrity(c), expect[0]);
  std::size_t k = 0;
  for (Component comp : kAllComponents) {
    c.set(comp, "x");
    ++k;
    EXPECT_DOUBLE_EQ(structural_integrity(c), expect[k]);
  }
}

TEST(Integrity, Monotone) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto c = testing::random_caption(rng);
    double before = structural_integrity(c);
    for (Component comp : kAllComponents) {
      if (c.has(comp)) continue;
      c.set(comp, "added");
      double after = structural_integrity(c);
      EXPECT_GE(after, before);
      before = after;
    }
  }
}

TEST(CorpusIntegrity, Examples) {
  auto full = parse_structured_caption(kFull).caption;
  auto five = full;
  five.clear(Component::kStyle);
  std::vector<StructuredCaption> both{full, full};
  EXPECT_DOUBLE_EQ(corpus_integrity(both), 100.0);
  std::vector<StructuredCaption> mixed{full, five};
  EXPECT_DOUBLE_EQ(corpus_integrity(mixed), 91.67);
  EXPECT_THROW(corpus_integrity(std::vector<StructuredCaption>{}), InvalidArgument);
}

TEST(CorpusIntegrity, MatchesOneLineOracleAndBounds) {
  std::mt19937_64 rng(50);
  std::vector<StructuredCaption> cs;
  for (int i = 0; i < 50; ++i) cs.push_back(testing::random_caption(rng));
  double sum = 0, lo = 100, hi = 0;
  for (const auto& c : cs) {
    double v = 100.0 * static_cast<double>(c.present_count()) / 6.0;
    sum += v;
    lo = std::min(lo, structural_integrity(c));
    hi = std::max(hi, structural_integrity(c));
  }
  EXPECT_NEAR(corpus_integrity(cs), sum / 50.0, 0.005);
  EXPECT_GE(corpus_integrity(cs), lo - 0.005);
  EXPECT_LE(corpus_integrity(cs), hi + 0.005);
}

TEST(RoundHalfUp, Boundaries) {
  EXPECT_DOUBLE_EQ(round_half_up_2(91.665), 91.67);
  EXPECT_DOUBLE_EQ(round_half_up_2(83.3333), 83.33);
  EXPECT_DOUBLE_EQ(round_half_up_2(0.0), 0.0);
}

TEST(ShortPrompt, NonBlank) {
  EXPECT_THROW(ShortPrompt("  "), InvalidArgument);
  EXPECT_EQ(ShortPrompt("go").text(), "go");
}

TEST(ConditionSet, OnlyIdentitiesRepeat) {
  ConditionSet s;
  s.add({ConditionKind::kIdentities, {"a.png"}, ""});
  s.add({ConditionKind::kIdentities, {"b.png", "c.png"}, ""});
  s.add({ConditionKind::kCamera, {"cam.txt"}, ""});
  EXPECT_THROW(s.add({ConditionKind::kCamera, {"cam2.txt"}, ""}), InvalidArgument);
  EXPECT_THROW(s.add({ConditionKind::kDepth, {"a", "b"}, ""}), InvalidArgument);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.items()[1].annotation_count(), 2u);
  EXPECT_TRUE(ConditionSet().empty());
}

TEST(ConditionSet, JsonRoundTrip) {
  Condition c{ConditionKind::kIdentities, {"x.png", "y.png"}, "two people"};
  EXPECT_EQ(condition_from_json(condition_to_json(c)), c);
  Condition d{ConditionKind::kPose, {"p.jsonl"}, ""};
  auto j = condition_to_json(d);
  EXPECT_EQ(j["ref"], "p.jsonl");
  EXPECT_EQ(condition_from_json(j), d);
  EXPECT_THROW(condition_from_json(nlohmann::json{{"type", "audio"}, {"ref", "a"}}), InvalidArgument);
}

}  // namespace
}  // namespace anycap
