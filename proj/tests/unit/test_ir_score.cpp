#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <random>

#include "anycap/ir_score.hpp"
#include "anycap/judge.hpp"
#include "test_support.hpp"

namespace anycap {
namespace {

using nlohmann::json;

// Dispatches on template id. The answer step answers questions about the
// shirt and returns "unanswerable" otherwise; grading marks "unanswerable"
// wrong with quality 0 and anything else right with quality 4.
class TemplateBackend final : public JudgeBackend {
 public:
  json complete(const JudgeRequest& r) override {
    ++calls;
    if (r.template_id == "ir.extract_intent")
      return {{"aspects",
               {{{"aspect", "camera"}, {"note", "follow shot"}}, {{"aspect", "subject"}, {"note", "young woman"}}}}};
    if (r.template_id == "ir.build_qa") {
      if (r.prompt_text.find("Aspect: camera") != std::string::npos)
        return {{"pairs", {{{"question", "How does the camera follow the young woman?"}, {"answer", "Moving backward"}}}}};
      return {{"pairs",
               {{{"question", "What color is the young woman's T-shirt?"}, {"answer", "Light blue."}},
                {{"question", "What does the young woman wear on her head?"}, {"answer", "A straw hat."}}}}};
    }
    if (r.template_id == "ir.answer")
      return {{"answer", r.prompt_text.find("T-shirt?") != std::string::npos ? "Light blue." : "unanswerable"}};
    const bool miss = r.prompt_text.find("Candidate answer: unanswerable") != std::string::npos;
    return {{"correct", !miss}, {"quality", miss ? 0 : 4}, {"rationale", miss ? "missing" : "matches"}};
  }
  std::atomic<int> calls{0};
};

StructuredCaption caption(const std::string& dense) {
  StructuredCaption c;
  c.set(Component::kDense, dense);
  return c;
}

GradedPair gp(IntentAspect a, bool correct, int q) { return {{a, "q?", "a"}, {correct, q, ""}}; }

TEST(IrAggregate, SmallExample) {
  std::vector<GradedPair> g{gp(IntentAspect::kSubject, true, 4), gp(IntentAspect::kCamera, false, 2),
                            gp(IntentAspect::kSubject, true, 3)};
  auto r = aggregate(g);
  EXPECT_EQ(r.count, 3u);
  EXPECT_NEAR(r.accuracy, 200.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.mean_quality, 3.0, 1e-12);
  EXPECT_EQ(r.per_aspect.at(IntentAspect::kSubject).correct, 2u);
  EXPECT_NEAR(r.per_aspect.at(IntentAspect::kSubject).mean_quality, 3.5, 1e-12);
  EXPECT_NEAR(r.per_aspect.at(IntentAspect::kCamera).accuracy, 0.0, 1e-12);
  EXPECT_THROW(aggregate({}), InvalidArgument);
}

TEST(IrAggregate, RandomRecomputationAndPermutation) {
  std::mt19937_64 rng(200);
  std::uniform_int_distribution<int> q(0, 5), asp(0, 5), coin(0, 1);
  std::vector<GradedPair> g;
  long correct = 0, quality = 0;
  for (int i = 0; i < 200; ++i) {
    g.push_back(gp(kAllAspects[asp(rng)], coin(rng) == 1, q(rng)));
    correct += g.back().verdict.correct;
    quality += g.back().verdict.quality;
  }
  auto r = aggregate(g);
  EXPECT_DOUBLE_EQ(r.accuracy, 100.0 * correct / 200.0);
  EXPECT_DOUBLE_EQ(r.mean_quality, quality / 200.0);
  // Per-aspect means weighted by count give back the overall means.
  double acc = 0, qual = 0;
  std::size_t n = 0;
  for (const auto& [a, s] : r.per_aspect) {
    acc += s.accuracy * static_cast<double>(s.count);
    qual += s.mean_quality * static_cast<double>(s.count);
    n += s.count;
  }
  EXPECT_EQ(n, 200u);
  EXPECT_NEAR(acc / 200.0, r.accuracy, 1e-9);
  EXPECT_NEAR(qual / 200.0, r.mean_quality, 1e-9);
  std::shuffle(g.begin(), g.end(), rng);
  auto s = aggregate(g);
  EXPECT_EQ(ir_report_to_json(s).dump(), ir_report_to_json(r).dump());
}

TEST(IrPipeline, ScriptedJudgeEndToEnd) {
  auto backend = std::make_shared<TemplateBackend>();
  auto cache = std::make_shared<ReplayCache>();
  JudgeClient judge(cache, backend, {JudgeMode::kRecord, 3, 4});
  std::vector<std::string> conds{"camera trajectory: moving backward"};
  auto run = run_irscore(caption("A young woman in a light blue T-shirt adjusts her hat."),
                         caption("A woman in a light blue T-shirt."), ShortPrompt("A woman walks; camera follows."),
                         conds, judge, 3);
  ASSERT_EQ(run.intents.size(), 2u);
  EXPECT_EQ(run.intents[0].aspect, IntentAspect::kSubject);  // canonical order
  ASSERT_EQ(run.pairs.size(), 3u);
  EXPECT_EQ(run.pairs[0].aspect, IntentAspect::kSubject);
  EXPECT_EQ(run.pairs[2].question, "How does the camera follow the young woman?");
  EXPECT_EQ(run.answers, (std::vector<std::string>{"Light blue.", "unanswerable", "unanswerable"}));
  EXPECT_EQ(run.report.count, 3u);
  EXPECT_NEAR(run.report.accuracy, 100.0 / 3.0, 1e-12);
  EXPECT_NEAR(run.report.mean_quality, 4.0 / 3.0, 1e-12);
  EXPECT_EQ(backend->calls.load(), 1 + 2 + 3 + 3);

  // Replaying the recorded cache with no backend reproduces the run exactly.
  JudgeClient replay(cache, nullptr, {});
  auto again = run_irscore(caption("A young woman in a light blue T-shirt adjusts her hat."),
                           caption("A woman in a light blue T-shirt."), ShortPrompt("A woman walks; camera follows."),
                           conds, replay, 1);
  EXPECT_EQ(ir_run_to_json(again).dump(), ir_run_to_json(run).dump());

  // A different prediction needs calls the cache does not hold.
  try {
    run_irscore(caption("A young woman in a light blue T-shirt adjusts her hat."), caption("Something else."),
                ShortPrompt("A woman walks; camera follows."), conds, replay, 2);
    FAIL();
  } catch (const CacheMissError& e) {
    EXPECT_EQ(e.template_id(), "ir.answer");
    EXPECT_NE(std::string(e.what()).find("answer_from_caption"), std::string::npos);
  }
}

TEST(IrPipeline, Preconditions) {
  JudgeClient judge(std::make_shared<ReplayCache>(), std::make_shared<TemplateBackend>(), {JudgeMode::kRecord, 1, 1});
  EXPECT_THROW(answer_from_caption(StructuredCaption(), "What?", judge), InvalidArgument);
  EXPECT_THROW(grade("q?", "", "x", judge), InvalidArgument);
  EXPECT_THROW(build_qa_pairs(caption("x"), {}, judge), InvalidArgument);
  EXPECT_EQ(intent_aspect_from_name(" Camera "), IntentAspect::kCamera);
  EXPECT_FALSE(intent_aspect_from_name("weather"));
}

}  // namespace
}  // namespace anycap
