// Records the IRScore replay fixture with a scripted, deterministic judge.
//
//   anycap_record_ir_fixture <gt.jsonl> <pred.jsonl> <script.json> <judge_cache.jsonl>
//
// The script fixes the intents and QA pairs per record. Answers come from
// content-word overlap between the reference answer and the predicted
// caption; grades from overlap between reference and candidate answers.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anycap/caption.hpp"
#include "anycap/dataset.hpp"
#include "anycap/text_metrics.hpp"
#include "commands.hpp"

namespace {

using nlohmann::json;

const std::set<std::string> kStopwords{"a", "an", "the", "of", "on", "in", "at", "to", "and", "with", "is",
                                       "are", "her", "his", "its", "it", "he", "she", "they", "from", "by",
                                       "as", "for", "up", "yes", "no", "does", "do", "what", "how"};

std::vector<std::string> content_stems(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : anycap::tokenize(text))
    if (!kStopwords.count(t)) out.push_back(anycap::porter_stem(t));
  return out;
}

double overlap(std::string_view reference, std::string_view text) {
  const auto ref = content_stems(reference);
  if (ref.empty()) return 0;
  const auto have = content_stems(text);
  const std::set<std::string> pool(have.begin(), have.end());
  const auto hit = std::count_if(ref.begin(), ref.end(), [&](const auto& s) { return pool.count(s) > 0; });
  return static_cast<double>(hit) / static_cast<double>(ref.size());
}

std::string line_after(const std::string& text, const std::string& label) {
  const auto at = text.find("\n" + label);
  if (at == std::string::npos) throw std::runtime_error("prompt has no '" + label + "' line");
  const auto begin = at + 1 + label.size();
  return text.substr(begin, text.find('\n', begin) - begin);
}

std::string block_after(const std::string& text, const std::string& label, const std::string& end) {
  const auto begin = text.find(label);
  if (begin == std::string::npos) throw std::runtime_error("prompt has no '" + label + "' block");
  const auto from = begin + label.size();
  return text.substr(from, text.find(end, from) - from);
}

struct ScriptRecord {
  std::string id, short_prompt, gt_text, pred_text;
  json intents, qa;
  std::string malformed_question;
};

class ScriptedJudge final : public anycap::JudgeBackend {
 public:
  explicit ScriptedJudge(std::vector<ScriptRecord> records) : records_(std::move(records)) {}

  json complete(const anycap::JudgeRequest& r) override {
    const std::string& p = r.prompt_text;
    if (r.template_id == "ir.extract_intent") return {{"aspects", find([&](const auto& s) {
                                                         return p.find(s.short_prompt) != std::string::npos;
                                                       }).intents}};
    if (r.template_id == "ir.build_qa") {
      const auto& rec = find([&](const auto& s) { return p.find(s.gt_text) != std::string::npos; });
      return {{"pairs", rec.qa.at(line_after(p, "Aspect: "))}};
    }
    if (r.template_id == "ir.answer") {
      const std::string caption = block_after(p, "Caption:\n", "\n\nQuestion: ");
      const std::string question = line_after(p, "Question: ");
      const auto& rec = find([&](const auto& s) { return caption == s.pred_text; });
      for (const auto& [aspect, pairs] : rec.qa.items())
        for (const auto& q : pairs)
          if (q["question"] == question) return {{"answer", answer(q["answer"].get<std::string>(), caption)}};
      throw std::runtime_error("unscripted question: " + question);
    }
    if (r.template_id == "ir.grade") {
      const std::string question = line_after(p, "Question: ");
      const bool corrected = p.find("did not match the required format") != std::string::npos;
      for (const auto& s : records_)
        if (!corrected && question == s.malformed_question) return {{"correct", "yes"}, {"quality", 4}};
      const std::string reference = line_after(p, "Reference answer: ");
      const std::string candidate = line_after(p, "Candidate answer: ");
      if (candidate == "unanswerable") return {{"correct", false}, {"quality", 0}, {"rationale", "no answer"}};
      const double f = overlap(reference, candidate);
      const int quality = std::max(1, static_cast<int>(std::lround(5.0 * f)));
      return {{"correct", f >= 0.5}, {"quality", quality},
              {"rationale", f >= 0.5 ? "covers the reference" : "misses most of the reference"}};
    }
    throw std::runtime_error("unexpected template " + r.template_id);
  }

 private:
  template <typename Pred>
  const ScriptRecord& find(Pred pred) const {
    auto it = std::find_if(records_.begin(), records_.end(), pred);
    if (it == records_.end()) throw std::runtime_error("prompt matches no scripted record");
    return *it;
  }

  // The reference verbatim when every content word is in the caption, the
  // words found when some are, "unanswerable" when none are.
  static std::string answer(const std::string& reference, const std::string& caption) {
    const double f = overlap(reference, caption);
    if (f == 1.0) return reference;
    if (f == 0.0) return "unanswerable";
    const auto have = content_stems(caption);
    const std::set<std::string> pool(have.begin(), have.end());
    std::string out;
    for (const auto& t : anycap::tokenize(reference))
      if (!kStopwords.count(t) && pool.count(anycap::porter_stem(t))) out += (out.empty() ? "" : " ") + t;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out + ".";
  }

  std::vector<ScriptRecord> records_;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 5) {
    std::cerr << "usage: " << argv[0] << " <gt.jsonl> <pred.jsonl> <script.json> <judge_cache.jsonl>\n";
    return 2;
  }
  try {
    const auto gt = anycap::read_records(std::filesystem::path(argv[1]));
    const auto pred = anycap::read_caption_records(argv[2]);
    std::ifstream script_in(argv[3]);
    const json script = json::parse(script_in);

    std::vector<ScriptRecord> records;
    for (const auto& s : script.at("records")) {
      ScriptRecord r;
      r.id = s.at("id");
      r.intents = s.at("intents");
      r.qa = s.at("qa");
      r.malformed_question = s.value("malformed_grade_question", "");
      for (const auto& g : gt)
        if (g.id == r.id) {
          r.short_prompt = g.short_caption.text();
          r.gt_text = anycap::serialize_structured_caption(g.structured_caption);
        }
      for (const auto& p : pred)
        if (p.id == r.id) r.pred_text = anycap::serialize_structured_caption(p.caption);
      if (r.short_prompt.empty() || r.pred_text.empty()) throw std::runtime_error("script record " + r.id + " has no gt or pred");
      records.push_back(std::move(r));
    }

    std::filesystem::remove(argv[4]);
    anycap::cli::IrScoreOptions o;
    o.gt = argv[1];
    o.pred = argv[2];
    o.judge_cache = argv[4];
    o.backend = std::make_shared<ScriptedJudge>(std::move(records));
    anycap::cli::CommonOptions c;
    auto res = anycap::cli::cmd_irscore(o, c);
    for (const auto& m : res.report.metrics) std::cout << m.group << "/" << m.name << " = " << m.value << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
