#include "anycap/ir_score.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <nlohmann/json.hpp>

#include "anycap/judge.hpp"
#include "anycap/prompt_template.hpp"
#include "anycap/strings.hpp"

namespace anycap {

namespace {

constexpr std::string_view kAspectNames[] = {"subject", "background", "movement", "camera", "interaction", "style"};

constexpr std::string_view kRequirements[] = {
    "number of subjects, their appearance, clothing and colors, and where they are in the frame",
    "setting, location, time of day, weather and other scene details",
    "what the subjects do and in what order, including speed and direction of motion",
    "camera movement direction, shot size, viewing angle and camera height",
    "how subjects relate to each other and to objects around them",
    "visual style, lighting, color palette and mood",
};

nlohmann::json call(JudgeClient& judge, const char* template_id, const char* schema_id, const SlotValues& slots) {
  const auto& tmpl = TemplateRegistry::builtin().latest(template_id);
  JudgeRequest req{tmpl.id(), tmpl.version(), tmpl.render(slots), schema_id};
  return judge.complete(req);
}

// Re-raises a step failure with the step name prefixed, keeping the error type
// callers dispatch on.
template <class F>
auto in_step(const std::string& step, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const CacheMissError& e) {
    throw CacheMissError(e.key(), e.template_id(), step);
  } catch (const JudgeSchemaError& e) {
    throw JudgeSchemaError(e.schema_id(), e.raw_response(), step + ": " + e.what());
  } catch (const IRStepError&) {
    throw;
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception& e) {
    throw IRStepError(step, e.what());
  }
}

std::string caption_text(const StructuredCaption& c) { return serialize_structured_caption(c); }

}  // namespace

std::string_view intent_aspect_name(IntentAspect a) { return kAspectNames[static_cast<std::size_t>(a)]; }

std::optional<IntentAspect> intent_aspect_from_name(std::string_view name) {
  std::string lower = strings::to_lower(strings::trim(name));
  for (std::size_t i = 0; i < std::size(kAspectNames); ++i)
    if (kAspectNames[i] == lower) return static_cast<IntentAspect>(i);
  return std::nullopt;
}

std::string_view aspect_requirements(IntentAspect a) { return kRequirements[static_cast<std::size_t>(a)]; }

std::vector<IntentNote> extract_intent(const ShortPrompt& short_prompt, std::span<const std::string> condition_summaries,
                                       JudgeClient& judge) {
  std::string conditions;
  for (const auto& s : condition_summaries) conditions += "- " + s + "\n";
  if (conditions.empty()) conditions = "(none)\n";
  auto payload = call(judge, "ir.extract_intent", "ir.intent.v1",
                      {{"short_prompt", short_prompt.text()}, {"conditions", conditions}});
  std::vector<IntentNote> notes;
  for (const auto& a : payload["aspects"])
    notes.push_back({*intent_aspect_from_name(a["aspect"].get<std::string>()),
                     std::string(strings::trim(a["note"].get<std::string>()))});
  std::sort(notes.begin(), notes.end(), [](const auto& x, const auto& y) { return x.aspect < y.aspect; });
  return notes;
}

std::vector<QAPair> build_qa_pairs(const StructuredCaption& gt_caption, std::span<const IntentAspect> aspects,
                                   JudgeClient& judge) {
  if (aspects.empty()) throw InvalidArgument("build_qa_pairs needs at least one aspect");
  if (gt_caption.empty()) throw InvalidArgument("ground-truth caption is empty");
  const std::string text = caption_text(gt_caption);
  std::vector<QAPair> pairs;
  for (IntentAspect a : aspects) {
    auto payload = call(judge, "ir.build_qa", "ir.qa.v1",
                        {{"caption", text},
                         {"aspect", std::string(intent_aspect_name(a))},
                         {"requirements", std::string(aspect_requirements(a))}});
    for (const auto& q : payload["pairs"])
      pairs.push_back({a, std::string(strings::trim(q["question"].get<std::string>())),
                       std::string(strings::trim(q["answer"].get<std::string>()))});
  }
  return pairs;
}

std::string answer_from_caption(const StructuredCaption& pred_caption, std::string_view question, JudgeClient& judge) {
  if (strings::is_blank(question)) throw InvalidArgument("question is empty");
  if (pred_caption.empty()) throw InvalidArgument("predicted caption is empty");
  auto payload = call(judge, "ir.answer", "ir.answer.v1",
                      {{"caption", caption_text(pred_caption)}, {"question", std::string(question)}});
  return std::string(strings::trim(payload["answer"].get<std::string>()));
}

JudgeVerdict grade(std::string_view question, std::string_view gt_answer, std::string_view pred_answer,
                   JudgeClient& judge) {
  if (strings::is_blank(question) || strings::is_blank(gt_answer) || strings::is_blank(pred_answer))
    throw InvalidArgument("grade needs non-empty question and answers");
  auto payload = call(judge, "ir.grade", "ir.grade.v1",
                      {{"question", std::string(question)},
                       {"reference", std::string(gt_answer)},
                       {"candidate", std::string(pred_answer)}});
  return {payload["correct"].get<bool>(), payload["quality"].get<int>(), payload.value("rationale", "")};
}

IRReport aggregate(std::span<const GradedPair> graded) {
  if (graded.empty()) throw InvalidArgument("aggregate needs at least one verdict");
  struct Tally {
    std::size_t n = 0, correct = 0;
    long long quality = 0;
  };
  Tally all;
  std::map<IntentAspect, Tally> per;
  for (const auto& g : graded) {
    for (Tally* t : {&all, &per[g.pair.aspect]}) {
      ++t->n;
      t->correct += g.verdict.correct ? 1 : 0;
      t->quality += g.verdict.quality;
    }
  }
  auto finish = [](const Tally& t) {
    return AspectScore{t.n, t.correct, 100.0 * static_cast<double>(t.correct) / static_cast<double>(t.n),
                       static_cast<double>(t.quality) / static_cast<double>(t.n)};
  };
  IRReport r;
  AspectScore total = finish(all);
  r.count = total.count;
  r.accuracy = total.accuracy;
  r.mean_quality = total.mean_quality;
  for (const auto& [aspect, t] : per) r.per_aspect[aspect] = finish(t);
  return r;
}

IRRun run_irscore(const StructuredCaption& gt_caption, const StructuredCaption& pred_caption,
                  const ShortPrompt& short_prompt, std::span<const std::string> condition_summaries,
                  JudgeClient& judge, unsigned jobs) {
  if (gt_caption.empty() || pred_caption.empty()) throw InvalidArgument("IRScore needs non-empty captions");
  IRRun run;
  run.intents = in_step("extract_intent", [&] { return extract_intent(short_prompt, condition_summaries, judge); });
  std::vector<IntentAspect> aspects;
  for (const auto& n : run.intents) aspects.push_back(n.aspect);
  run.pairs = in_step("build_qa_pairs", [&] { return build_qa_pairs(gt_caption, aspects, judge); });

  const std::size_t n = run.pairs.size();
  run.answers.resize(n);
  run.verdicts.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        const auto& p = run.pairs[i];
        run.answers[i] = in_step("answer_from_caption", [&] { return answer_from_caption(pred_caption, p.question, judge); });
        run.verdicts[i] = in_step("grade", [&] { return grade(p.question, p.answer, run.answers[i], judge); });
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  // Lowest failing pair first so the reported error is deterministic.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<GradedPair> graded;
  for (std::size_t i = 0; i < n; ++i) graded.push_back({run.pairs[i], run.verdicts[i]});
  run.report = aggregate(graded);
  return run;
}

nlohmann::json ir_report_to_json(const IRReport& report) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [aspect, s] : report.per_aspect)
    per[std::string(intent_aspect_name(aspect))] = {
        {"count", s.count}, {"correct", s.correct}, {"accuracy", s.accuracy}, {"mean_quality", s.mean_quality}};
  return {{"count", report.count},
          {"accuracy", report.accuracy},
          {"mean_quality", report.mean_quality},
          {"per_aspect", per}};
}

nlohmann::json ir_run_to_json(const IRRun& run) {
  nlohmann::json intents = nlohmann::json::array();
  for (const auto& n : run.intents) intents.push_back({{"aspect", intent_aspect_name(n.aspect)}, {"note", n.note}});
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < run.pairs.size(); ++i) {
    const auto& p = run.pairs[i];
    items.push_back({{"aspect", intent_aspect_name(p.aspect)},
                     {"question", p.question},
                     {"gt_answer", p.answer},
                     {"pred_answer", run.answers[i]},
                     {"correct", run.verdicts[i].correct},
                     {"quality", run.verdicts[i].quality},
                     {"rationale", run.verdicts[i].rationale}});
  }
  return {{"intents", intents}, {"qa", items}, {"report", ir_report_to_json(run.report)}};
}

}  // namespace anycap
