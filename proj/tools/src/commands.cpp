#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "anycap/augment.hpp"
#include "anycap/caption.hpp"
#include "anycap/dataset.hpp"
#include "anycap/depth.hpp"
#include "anycap/embedding.hpp"
#include "anycap/error.hpp"
#include "anycap/hash.hpp"
#include "anycap/http.hpp"
#include "anycap/ir_score.hpp"
#include "anycap/judge.hpp"
#include "anycap/pose.hpp"
#include "anycap/rng.hpp"
#include "anycap/semantic_metrics.hpp"
#include "anycap/strings.hpp"
#include "anycap/text_metrics.hpp"
#include "anycap/version.hpp"

namespace anycap::cli {

namespace {

using nlohmann::json;

EvalReport new_report(std::string command) {
  EvalReport r;
  r.tool_version = std::string(kVersion);
  r.command = std::move(command);
  return r;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The exception of the
// lowest failing index is rethrown so failures are reported deterministically.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

// Pairs records by id in ground-truth order; any id present on one side only
// is an evaluation error.
template <class P, class G>
std::vector<std::pair<const P*, const G*>> align_by_id(const std::vector<P>& pred, const std::vector<G>& gt) {
  std::map<std::string, const P*> by_id;
  for (const auto& p : pred)
    if (!by_id.emplace(p.id, &p).second) throw EvaluationError("duplicate prediction id " + p.id);
  std::vector<std::pair<const P*, const G*>> out;
  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto& g : gt) {
    if (!seen.insert(g.id).second) throw EvaluationError("duplicate ground-truth id " + g.id);
    auto it = by_id.find(g.id);
    if (it == by_id.end()) {
      missing.push_back(g.id);
      continue;
    }
    out.emplace_back(it->second, &g);
  }
  std::vector<std::string> extra;
  for (const auto& p : pred)
    if (!seen.count(p.id)) extra.push_back(p.id);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction and ground-truth ids differ";
    if (!missing.empty()) msg += "; missing predictions: " + list_ids(missing);
    if (!extra.empty()) msg += "; predictions without ground truth: " + list_ids(extra);
    throw EvaluationError(msg);
  }
  if (out.empty()) throw EvaluationError("no records to evaluate");
  return out;
}

// --- score -----------------------------------------------------------------

constexpr std::string_view kScoreMetrics[] = {"bleu2", "rouge_l", "meteor", "bertscore", "integrity"};

struct TextScores {
  std::map<std::string, double> values;
};

TextScores score_text(const std::string& cand, const std::string& ref, const std::set<std::string>& metrics,
                      EmbeddingProvider* provider) {
  TextScores s;
  const TokenSeq c = tokenize(cand), r = tokenize(ref);
  if (metrics.count("bleu2")) s.values["bleu2"] = bleu_n(c, r, 2).value;
  if (metrics.count("rouge_l")) s.values["rouge_l"] = rouge_l(c, r).value;
  if (metrics.count("meteor")) s.values["meteor"] = meteor(c, r).value;
  if (metrics.count("bertscore")) {
    if (c.empty() || r.empty()) {
      s.values["bertscore_f1"] = 0.0;
    } else {
      s.values["bertscore_f1"] = bertscore(cand, ref, *provider).f1;
    }
  }
  return s;
}

}  // namespace

CommandResult cmd_validate(const ValidateOptions& o, const CommonOptions&) {
  CommandResult res{new_report("validate")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  std::ifstream in(o.records);
  if (!in) throw IoError("cannot open " + o.records);
  std::size_t lines = 0, records = 0;
  {
    std::ifstream count(o.records);
    std::string line;
    while (std::getline(count, line)) {
      ++lines;
      if (!strings::is_blank(line)) ++records;
    }
  }
  auto violations = validate_records(in);
  std::set<std::size_t> bad;
  for (const auto& v : violations) {
    bad.insert(v.index);
    json entry{{"index", v.index}, {"line", v.line}, {"field", v.field_path}, {"message", v.message}};
    if (!v.id.empty()) entry["id"] = v.id;
    r.records.push_back(std::move(entry));
  }
  r.conventions["schema"] = std::string(kRecordSchemaName);
  r.add("records", "total", static_cast<double>(records));
  r.add("records", "invalid", static_cast<double>(bad.size()));
  r.add("records", "violations", static_cast<double>(violations.size()));
  res.exit_code = violations.empty() ? kExitOk : kExitFailure;
  return res;
}

// Seeded mock vectors unless an endpoint is given.
std::shared_ptr<EmbeddingProvider> make_provider(const std::string& endpoint, const std::string& cache,
                                                 std::uint64_t seed) {
  if (endpoint.empty()) return std::make_shared<MockProvider>(64, seed);
  RemoteProviderConfig cfg;
  cfg.endpoint = endpoint;
  if (const char* t = std::getenv("ANYCAP_EMBED_TOKEN")) cfg.bearer_token = t;
  return std::make_shared<CachingProvider>(std::make_shared<RemoteProvider>(cfg), cache);
}

CommandResult cmd_score(const ScoreOptions& o, const CommonOptions& c) {
  std::set<std::string> metrics;
  for (const auto& m : o.metrics) {
    if (std::find(std::begin(kScoreMetrics), std::end(kScoreMetrics), m) == std::end(kScoreMetrics))
      throw UsageError("unknown metric '" + m + "' (bleu2, rouge_l, meteor, bertscore, integrity)");
    metrics.insert(m);
  }
  if (metrics.empty()) throw UsageError("no metrics selected");

  CommandResult res{new_report("score")};
  auto& r = res.report;
  r.inputs["pred"] = describe_input(o.pred);
  r.inputs["gt"] = describe_input(o.gt);
  const auto pred = read_caption_records(o.pred);
  const auto gt = read_caption_records(o.gt);
  const auto pairs = align_by_id(pred, gt);

  std::shared_ptr<EmbeddingProvider> provider;
  if (metrics.count("bertscore")) {
    provider = make_provider(o.embed_endpoint, o.embed_cache, o.seed);
    r.conventions["bertscore_provider"] = provider->describe();
    r.conventions["bertscore"] = "greedy max-cosine matching, no idf weighting";
  }

  // groups[record][group] -> scores; a group is absent when the reference
  // lacks that component.
  std::vector<std::map<std::string, TextScores>> per(pairs.size());
  parallel_for(pairs.size(), c.jobs, [&](std::size_t i) {
    const auto& p = pairs[i].first->caption;
    const auto& g = pairs[i].second->caption;
    for (Component comp : kAllComponents) {
      if (!g.has(comp)) continue;
      per[i][std::string(component_key(comp))] =
          score_text(p.get(comp).value_or(""), *g.get(comp), metrics, provider.get());
    }
    per[i]["entire"] = score_text(p.body_text(), g.body_text(), metrics, provider.get());
  });

  std::vector<std::string> groups;
  for (Component comp : kAllComponents) groups.emplace_back(component_key(comp));
  groups.emplace_back("entire");
  for (const auto& group : groups) {
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& rec : per) {
      auto it = rec.find(group);
      if (it == rec.end()) continue;
      for (const auto& [name, v] : it->second.values) {
        sums[name].first += v;
        ++sums[name].second;
      }
    }
    for (std::string_view name : {"bleu2", "rouge_l", "meteor", "bertscore_f1"}) {
      auto it = sums.find(std::string(name));
      if (it != sums.end()) r.add(group, std::string(name), it->second.first / static_cast<double>(it->second.second));
    }
  }

  std::vector<StructuredCaption> pred_caps;
  for (const auto& [p, g] : pairs) pred_caps.push_back(p->caption);
  if (metrics.count("integrity")) r.add("structure", "integrity", corpus_integrity(pred_caps));
  r.add("corpus", "records", static_cast<double>(pairs.size()));

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    json rec = {{"id", pairs[i].second->id}};
    if (metrics.count("integrity")) rec["integrity"] = structural_integrity(pairs[i].first->caption);
    json entire = json::object();
    for (const auto& [name, v] : per[i]["entire"].values) entire[name] = v;
    rec["entire"] = entire;
    r.records.push_back(rec);
  }
  r.conventions["tokenizer"] = "lowercase, whitespace split, edge punctuation stripped";
  r.conventions["bleu"] = "order 2, clipped counts, brevity penalty; orders longer than the candidate are left out";
  r.conventions["rouge_l"] = "balanced F1 over the LCS";
  r.conventions["meteor"] = "exact then Porter-stem matching; alpha 0.9, beta 3, gamma 0.5";
  r.conventions["missing_component"] = "scored 0 when the reference has it; skipped when the reference lacks it";
  r.conventions["aggregation"] = "mean over records";
  return res;
}

CommandResult cmd_similarity(const SimilarityOptions& o, const CommonOptions& c) {
  if (o.text != "short" && o.text != "structured") throw UsageError("--text must be short or structured");
  if (o.frames == 0) throw UsageError("--frames must be positive");
  CommandResult res{new_report("similarity")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  const auto records = read_records(std::filesystem::path(o.records));
  if (records.empty()) throw EvaluationError("no records in " + o.records);
  const auto provider = make_provider(o.embed_endpoint, o.embed_cache, o.seed);

  struct Row {
    double clip_t = 0;
    std::optional<double> identity;
  };
  std::vector<Row> rows(records.size());
  parallel_for(records.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    std::vector<std::string> frames;
    for (std::size_t k = 0; k < o.frames; ++k) frames.push_back(rec.video_ref + "#" + std::to_string(k));
    const std::string text = o.text == "short" ? rec.short_caption.text() : rec.structured_caption.body_text();
    rows[i].clip_t = clip_text_sim(text, frames, *provider);
    std::vector<std::string> ids;
    for (const auto& cond : rec.conditions.items())
      if (cond.kind == ConditionKind::kIdentities) ids.insert(ids.end(), cond.refs.begin(), cond.refs.end());
    if (!ids.empty()) rows[i].identity = identity_preservation(ids, frames, *provider);
  });

  double clip = 0, ident = 0;
  std::size_t with_ids = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    json rec{{"id", records[i].id}, {"clip_t", rows[i].clip_t}};
    clip += rows[i].clip_t;
    if (rows[i].identity) {
      rec["identity"] = *rows[i].identity;
      ident += *rows[i].identity;
      ++with_ids;
    }
    r.records.push_back(std::move(rec));
  }
  r.add("similarity", "clip_t", clip / static_cast<double>(rows.size()));
  if (with_ids) r.add("similarity", "identity", ident / static_cast<double>(with_ids));
  r.add("corpus", "records", static_cast<double>(rows.size()));
  r.add("corpus", "identity_records", static_cast<double>(with_ids));
  r.conventions["text_source"] = o.text == "short" ? "short caption" : "structured caption bodies";
  r.conventions["frames"] = "<video_ref>#<k> for k < " + std::to_string(o.frames);
  r.conventions["provider"] = provider->describe();
  r.conventions["identity"] = "best cosine over frames per identity image, mean over images";
  return res;
}

CommandResult cmd_irscore(const IrScoreOptions& o, const CommonOptions& c) {
  if (o.judge_cache.empty()) throw UsageError("--judge-cache is required");
  if (o.replay && !std::filesystem::exists(o.judge_cache))
    throw IoError("replay cache " + o.judge_cache + " does not exist");
  if (!o.replay && !o.backend && o.judge_endpoint.empty()) throw UsageError("--judge-endpoint is required unless --replay is given");

  CommandResult res{new_report("irscore")};
  auto& r = res.report;
  r.inputs["pred"] = describe_input(o.pred);
  r.inputs["gt"] = describe_input(o.gt);
  if (o.replay) r.inputs["judge_cache"] = describe_input(o.judge_cache);
  const auto pred = read_caption_records(o.pred);
  const auto gt = read_records(std::filesystem::path(o.gt));
  const auto pairs = align_by_id(pred, gt);

  auto cache = std::make_shared<ReplayCache>(o.judge_cache);
  std::shared_ptr<JudgeBackend> backend = o.backend;
  if (!o.replay && !backend) {
    HttpJudgeConfig cfg;
    cfg.endpoint = o.judge_endpoint;
    cfg.model = o.judge_model;
    backend = std::make_shared<HttpJudgeBackend>(cfg);
  }
  JudgeClient judge(cache, backend,
                    {o.replay ? JudgeMode::kReplay : JudgeMode::kRecord, o.max_retries,
                     static_cast<std::ptrdiff_t>(std::max(1u, c.jobs))});

  // Records run one after another; the answer and grade calls inside a
  // record use the --jobs threads.
  std::vector<IRRun> runs;
  for (const auto& [p, g] : pairs) {
    std::vector<std::string> summaries;
    for (const auto& cond : g->conditions.items())
      summaries.push_back(cond.summary.empty() ? std::string(condition_kind_name(cond.kind)) + " condition"
                                               : cond.summary);
    try {
      runs.push_back(run_irscore(g->structured_caption, p->caption, g->short_caption, summaries, judge, c.jobs));
    } catch (const CacheMissError& e) {
      // Keep the step prefix the pipeline added and put the record id in front.
      const std::string what = e.what();
      const auto cut = what.find(": judge cache miss");
      throw CacheMissError(e.key(), e.template_id(),
                           "record " + g->id + (cut == std::string::npos ? "" : ": " + what.substr(0, cut)));
    }
  }

  double acc = 0, qual = 0;
  std::vector<GradedPair> all;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    acc += runs[i].report.accuracy;
    qual += runs[i].report.mean_quality;
    for (std::size_t k = 0; k < runs[i].pairs.size(); ++k) all.push_back({runs[i].pairs[k], runs[i].verdicts[k]});
    json rec = ir_run_to_json(runs[i]);
    rec["id"] = pairs[i].second->id;
    r.records.push_back(rec);
  }
  const auto n = static_cast<double>(runs.size());
  r.add("irscore", "accuracy", acc / n);
  r.add("irscore", "quality", qual / n);
  const IRReport pooled = aggregate(all);
  r.add("pooled", "accuracy", pooled.accuracy);
  r.add("pooled", "quality", pooled.mean_quality);
  r.add("pooled", "qa_pairs", static_cast<double>(pooled.count));
  for (const auto& [aspect, s] : pooled.per_aspect) {
    const std::string g = "aspect." + std::string(intent_aspect_name(aspect));
    r.add(g, "accuracy", s.accuracy);
    r.add(g, "quality", s.mean_quality);
    r.add(g, "qa_pairs", static_cast<double>(s.count));
  }
  r.add("corpus", "records", n);
  r.add("judge", "calls", static_cast<double>(judge.total_calls()));
  r.add("judge", "backend_calls", static_cast<double>(judge.backend_calls()));
  r.conventions["aggregation"] = "irscore: mean of per-record accuracy and quality; pooled: over all QA pairs";
  r.conventions["quality_scale"] = "integer 0-5";
  r.conventions["judge_mode"] = o.replay ? "replay" : "record";
  return res;
}

CommandResult cmd_camera(const CameraOptions& o, const CommonOptions&) {
  CommandResult res{new_report("camera")};
  auto& r = res.report;
  r.inputs["pred"] = describe_input(o.pred);
  r.inputs["gt"] = describe_input(o.gt);
  TrajectoryLoadOptions lo;
  lo.normalized_intrinsics = o.normalized_intrinsics;
  lo.width = o.width;
  lo.height = o.height;
  auto pred = load_trajectory(o.pred, lo);
  auto gt = load_trajectory(o.gt, lo);
  if (!o.absolute) {
    pred = normalize_to_first(pred);
    gt = normalize_to_first(gt);
  }
  if (pred.size() != gt.size())
    throw EvaluationError("trajectories differ in length: pred " + std::to_string(pred.size()) + ", gt " +
                          std::to_string(gt.size()));
  r.add("camera", "rot_err_deg", rot_err(pred, gt, o.agg));
  r.add("camera", "trans_err", trans_err(pred, gt, o.agg));
  r.add("camera", "cam_mc", cam_mc(pred, gt, o.agg));
  r.add("camera", "frames", static_cast<double>(gt.size()));
  for (const auto& [name, t] : {std::pair{"pred", &pred}, std::pair{"gt", &gt}}) {
    json rec = {{"trajectory", name}};
    if (t->size() >= 2) {
      auto labels = classify_movement(*t);
      json names = json::array();
      for (auto m : labels) names.push_back(movement_name(m));
      rec["movement"] = names;
      rec["phrase"] = describe_movement(labels);
    }
    r.records.push_back(rec);
  }
  r.conventions["aggregation"] = std::string(aggregation_name(o.agg)) + " over frames";
  r.conventions["frame"] = o.absolute ? "as given" : "each trajectory re-expressed relative to its first frame";
  r.conventions["translation_scale"] = "camera centers divided by the largest center norm of each trajectory";
  r.conventions["rot_err"] = "geodesic angle of R_pred R_gt^T in degrees";
  r.conventions["intrinsics"] = o.normalized_intrinsics ? "normalized, scaled by image size" : "pixels";
  return res;
}

CommandResult cmd_pose(const PoseOptions& o, const CommonOptions&) {
  CommandResult res{new_report("pose")};
  auto& r = res.report;
  r.inputs["pred"] = describe_input(o.pred);
  r.inputs["gt"] = describe_input(o.gt);
  auto pred = load_pose_tracks(o.pred);
  auto gt = load_pose_tracks(o.gt);
  std::map<std::string, const PoseTrack*> by_person;
  for (const auto& t : pred) by_person[t.person_id()] = &t;
  std::size_t correct = 0, evaluated = 0;
  for (const auto& g : gt) {
    auto it = by_person.find(g.person_id());
    if (it == by_person.end()) throw EvaluationError("no predicted track for person " + g.person_id());
    PoseAccuracy a;
    try {
      a = pose_accuracy(*it->second, g, o.alpha);
    } catch (const ShapeError& e) {
      throw EvaluationError("person " + g.person_id() + ": " + e.what());
    }
    correct += a.correct;
    evaluated += a.evaluated;
    r.records.push_back({{"person_id", g.person_id()},
                         {"accuracy", a.percent},
                         {"correct", a.correct},
                         {"evaluated", a.evaluated}});
  }
  if (evaluated == 0) throw EvaluationError("no ground-truth keypoint is evaluable");
  r.add("pose", "accuracy", 100.0 * static_cast<double>(correct) / static_cast<double>(evaluated));
  r.add("pose", "keypoints_evaluated", static_cast<double>(evaluated));
  r.conventions["alpha"] = o.alpha;
  r.conventions["threshold"] = "alpha times the longer side of the ground-truth keypoint box, per frame";
  r.conventions["visibility"] = "ground-truth keypoints with confidence >= 0.5 are evaluated";
  r.conventions["aggregation"] = "pooled over frames and persons";
  return res;
}

CommandResult cmd_depth(const DepthOptions& o, const CommonOptions&) {
  CommandResult res{new_report("depth")};
  auto& r = res.report;
  r.inputs["pred"] = describe_input(o.pred);
  r.inputs["gt"] = describe_input(o.gt);
  const auto pred = load_depth(o.pred);
  const auto gt = load_depth(o.gt);
  try {
    r.add("depth", "mae", depth_mae(pred, gt));
  } catch (const ShapeError& e) {
    throw EvaluationError(e.what());
  }
  r.add("depth", "frames", static_cast<double>(gt.frames()));
  r.conventions["normalization"] = "per-frame min-max to [0, 1]; a constant frame maps to 0";
  return res;
}

CommandResult cmd_dataset_stats(const StatsOptions& o, const CommonOptions&) {
  if (o.bin_width == 0) throw UsageError("--bin-width must be positive");
  CommandResult res{new_report("dataset stats")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  const auto records = read_records(std::filesystem::path(o.records));
  if (records.empty()) throw EvaluationError("no records in " + o.records);
  const auto stats = compute_stats(records, o.bin_width);
  auto rows = [&](const std::string& group, const CategoryStats& s) {
    r.add(group, "instances", static_cast<double>(s.instances));
    r.add(group, "conditions", static_cast<double>(s.conditions));
    r.add(group, "avg_duration_s", s.avg_duration_s());
    r.add(group, "total_duration_h", s.total_duration_h());
    r.add(group, "short_mean_words", s.short_mean_words());
    r.add(group, "structured_mean_words", s.structured_mean_words());
  };
  for (const auto& [cat, s] : stats.per_category) rows(std::string(category_name(cat)), s);
  rows("total", stats.total);
  r.records.push_back(stats_to_json(stats));
  r.conventions["word_count"] = "tokens after edge punctuation is stripped";
  r.conventions["conditions"] = "identity images counted one by one";
  return res;
}

namespace {

std::vector<std::string> read_ref_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> refs;
  std::string line;
  while (std::getline(in, line)) {
    auto t = strings::trim(line);
    if (!t.empty() && t.front() != '#') refs.emplace_back(t);
  }
  return refs;
}

}  // namespace

CommandResult cmd_dataset_manifest(const ManifestOptions& o, const CommonOptions&) {
  auto stage = stage_from_name(o.stage);
  if (!stage) throw UsageError("unknown stage '" + o.stage + "' (identities, human_pose, camera, depth)");
  if (o.output.empty()) throw UsageError("--output is required");
  StageConfig cfg = default_stage_config(*stage, o.seed);
  if (o.ratio) cfg.joint_train_ratio = *o.ratio;
  if (o.sentence_rate) cfg.sentence_dropout_rate = *o.sentence_rate;
  if (o.condition_rate) cfg.condition_dropout_rate = *o.condition_rate;

  CommandResult res{new_report("dataset manifest")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  std::vector<std::string> aux;
  if (!o.aux.empty()) {
    r.inputs["aux"] = describe_input(o.aux);
    aux = read_ref_list(o.aux);
  }
  const auto records = records_for_stage(read_records(std::filesystem::path(o.records)), *stage);
  if (records.empty()) throw EvaluationError("no record carries a " + o.stage + " condition");
  TrainingManifest m;
  try {
    m = build_manifest(records, aux, cfg);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  std::ofstream out(o.output);
  if (!out) throw IoError("cannot write " + o.output);
  write_manifest(m, out);
  if (!out) throw IoError("write to " + o.output + " failed");

  const auto total = static_cast<double>(m.entries.size());
  r.add("manifest", "entries", total);
  r.add("manifest", "data_entries", total - static_cast<double>(m.aux_count()));
  r.add("manifest", "aux_entries", static_cast<double>(m.aux_count()));
  r.add("manifest", "aux_fraction", static_cast<double>(m.aux_count()) / total);
  r.conventions["stage"] = o.stage;
  r.conventions["stage_position"] = stage_position(*stage);
  r.conventions["joint_train_ratio"] = cfg.joint_train_ratio;
  r.conventions["ratio_meaning"] = "fraction of manifest entries drawn from the auxiliary pool";
  r.conventions["sentence_dropout_rate"] = cfg.sentence_dropout_rate;
  r.conventions["condition_dropout_rate"] = cfg.condition_dropout_rate;
  r.conventions["seed"] = o.seed;
  r.conventions["output"] = o.output;
  return res;
}

CommandResult cmd_dataset_assemble(const AssembleOptions& o, const CommonOptions&) {
  CommandResult res{new_report("dataset assemble")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  const auto records = read_records(std::filesystem::path(o.records));
  std::size_t balanced = 0;
  for (const auto& rec : records) {
    std::string seq = assemble_condition_sequence(rec);
    balanced += markers_balanced(seq) ? 1 : 0;
    r.records.push_back({{"id", rec.id}, {"sequence", seq}});
  }
  r.add("assemble", "records", static_cast<double>(records.size()));
  r.add("assemble", "balanced", static_cast<double>(balanced));
  if (balanced != records.size()) res.exit_code = kExitFailure;
  return res;
}

namespace {

Category category_for(const ConditionSet& conditions) {
  std::set<ConditionKind> kinds;
  for (const auto& c : conditions.items()) kinds.insert(c.kind);
  if (kinds.size() > 1) return Category::kCompositional;
  switch (*kinds.begin()) {
    case ConditionKind::kDepth: return Category::kDepth;
    case ConditionKind::kIdentities: return Category::kMultiIdentities;
    case ConditionKind::kPose: return Category::kHumanPose;
    case ConditionKind::kCamera: return Category::kCamera;
  }
  return Category::kCompositional;
}

}  // namespace

CommandResult cmd_augment(const AugmentOptions& o, const CommonOptions&) {
  for (double rate : {o.sentence_rate, o.condition_rate})
    if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("dropout rates must lie in [0, 1]");
  if (o.output.empty()) throw UsageError("--output is required");
  CommandResult res{new_report("augment")};
  auto& r = res.report;
  r.inputs["records"] = describe_input(o.records);
  auto records = read_records(std::filesystem::path(o.records));
  std::size_t sentences_before = 0, sentences_after = 0, conditions_before = 0, conditions_after = 0;
  for (auto& rec : records) {
    // Per-record seeds depend on the id, not the position in the file.
    const std::uint64_t s = mix64(o.seed ^ hash64(rec.id));
    sentences_before += split_sentences(rec.short_caption.text()).size();
    conditions_before += rec.conditions.size();
    rec.short_caption = ShortPrompt(sentence_dropout(rec.short_caption.text(), o.sentence_rate, s));
    rec.conditions = condition_dropout(rec.conditions, o.condition_rate, mix64(s));
    rec.category = category_for(rec.conditions);
    sentences_after += split_sentences(rec.short_caption.text()).size();
    conditions_after += rec.conditions.size();
  }
  write_records(records, std::filesystem::path(o.output));
  r.add("augment", "records", static_cast<double>(records.size()));
  r.add("augment", "sentences_before", static_cast<double>(sentences_before));
  r.add("augment", "sentences_after", static_cast<double>(sentences_after));
  r.add("augment", "conditions_before", static_cast<double>(conditions_before));
  r.add("augment", "conditions_after", static_cast<double>(conditions_after));
  r.conventions["seed"] = o.seed;
  r.conventions["sentence_dropout_rate"] = o.sentence_rate;
  r.conventions["condition_dropout_rate"] = o.condition_rate;
  r.conventions["record_seed"] = "mix64(seed xor hash64(id))";
  r.conventions["category"] = "recomputed from the surviving conditions";
  r.conventions["output"] = o.output;
  return res;
}

CommandResult cmd_pluecker(const PlueckerOptions& o, const CommonOptions&) {
  if (o.height == 0 || o.width == 0) throw UsageError("--height and --width must be positive");
  if (o.output.empty()) throw UsageError("--output is required");
  CommandResult res{new_report("pluecker")};
  auto& r = res.report;
  r.inputs["traj"] = describe_input(o.traj);
  TrajectoryLoadOptions lo;
  lo.normalized_intrinsics = o.normalized_intrinsics;
  lo.width = o.image_width;
  lo.height = o.image_height;
  const auto traj = load_trajectory(o.traj, lo);
  const auto map = pluecker_embedding(traj, o.height, o.width);
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw IoError("cannot write " + o.output);
  write_pluecker(map, out);

  double worst_norm = 0, worst_dot = 0;
  for (std::size_t n = 0; n < map.frames; ++n)
    for (std::size_t v = 0; v < map.height; ++v)
      for (std::size_t u = 0; u < map.width; ++u) {
        double dd = 0, md = 0;
        for (std::size_t k = 0; k < 3; ++k) {
          dd += static_cast<double>(map.at(n, k + 3, v, u)) * map.at(n, k + 3, v, u);
          md += static_cast<double>(map.at(n, k, v, u)) * map.at(n, k + 3, v, u);
        }
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(dd) - 1.0));
        worst_dot = std::max(worst_dot, std::abs(md));
      }
  r.add("pluecker", "frames", static_cast<double>(map.frames));
  r.add("pluecker", "max_direction_norm_error", worst_norm);
  r.add("pluecker", "max_moment_direction_dot", worst_dot);
  r.conventions["layout"] = "N x 6 x H x W float32, channels moment (o x d) then direction d";
  r.conventions["rays"] = "through pixel centers, intrinsics rescaled to the output grid";
  r.conventions["output"] = o.output;
  return res;
}

int execute(const std::function<CommandResult()>& command, const CommonOptions& c, std::ostream& out,
            std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    CommandResult res = command();
    if (c.timing)
      res.report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report(res.report, c.format, out);
    return res.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HttpError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace anycap::cli
