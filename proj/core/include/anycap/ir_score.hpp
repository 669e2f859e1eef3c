#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anycap/caption.hpp"
#include "anycap/error.hpp"

namespace anycap {

class JudgeClient;

enum class IntentAspect { kSubject, kBackground, kMovement, kCamera, kInteraction, kStyle };
inline constexpr IntentAspect kAllAspects[] = {IntentAspect::kSubject,  IntentAspect::kBackground,
                                               IntentAspect::kMovement, IntentAspect::kCamera,
                                               IntentAspect::kInteraction, IntentAspect::kStyle};

std::string_view intent_aspect_name(IntentAspect a);
std::optional<IntentAspect> intent_aspect_from_name(std::string_view name);
/// What the QA builder is told to emphasize for an aspect.
std::string_view aspect_requirements(IntentAspect a);

struct IntentNote {
  IntentAspect aspect;
  std::string note;
  bool operator==(const IntentNote&) const = default;
};

struct QAPair {
  IntentAspect aspect;
  std::string question;
  std::string answer;
  bool operator==(const QAPair&) const = default;
};

struct JudgeVerdict {
  bool correct = false;
  int quality = 0;  ///< 0..5
  std::string rationale;
  bool operator==(const JudgeVerdict&) const = default;
};

struct GradedPair {
  QAPair pair;
  JudgeVerdict verdict;
};

struct AspectScore {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy = 0;      ///< percent
  double mean_quality = 0;
};

struct IRReport {
  std::size_t count = 0;
  double accuracy = 0;      ///< percent
  double mean_quality = 0;
  std::map<IntentAspect, AspectScore> per_aspect;
};

/// A pipeline step failed for a reason other than a cache miss or schema error.
class IRStepError : public Error {
 public:
  IRStepError(std::string step, const std::string& what) : Error(step + ": " + what), step_(std::move(step)) {}
  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

/// Aspects the short prompt and conditions ask about, in canonical order.
std::vector<IntentNote> extract_intent(const ShortPrompt& short_prompt, std::span<const std::string> condition_summaries,
                                       JudgeClient& judge);

/// One judge call per aspect; at least one pair per aspect.
std::vector<QAPair> build_qa_pairs(const StructuredCaption& gt_caption, std::span<const IntentAspect> aspects,
                                   JudgeClient& judge);

/// Answer drawn from `pred_caption` alone, or "unanswerable".
std::string answer_from_caption(const StructuredCaption& pred_caption, std::string_view question, JudgeClient& judge);

JudgeVerdict grade(std::string_view question, std::string_view gt_answer, std::string_view pred_answer,
                   JudgeClient& judge);

/// Throws InvalidArgument on an empty list.
IRReport aggregate(std::span<const GradedPair> graded);

/// Every intermediate artifact of one IRScore evaluation.
struct IRRun {
  std::vector<IntentNote> intents;
  std::vector<QAPair> pairs;
  std::vector<std::string> answers;
  std::vector<JudgeVerdict> verdicts;
  IRReport report;
};

/// Steps 1-4 for one caption pair. Answer and grade calls for different
/// pairs run on up to `jobs` threads; results keep pair order. Errors carry
/// the failing step name in their message.
IRRun run_irscore(const StructuredCaption& gt_caption, const StructuredCaption& pred_caption,
                  const ShortPrompt& short_prompt, std::span<const std::string> condition_summaries,
                  JudgeClient& judge, unsigned jobs = 1);

nlohmann::json ir_report_to_json(const IRReport& report);
nlohmann::json ir_run_to_json(const IRRun& run);

}  // namespace anycap
