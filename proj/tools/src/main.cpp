#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anycap/version.hpp"
#include "commands.hpp"

using namespace anycap::cli;

int main(int argc, char** argv) {
  CLI::App app{"anycap: evaluation and dataset tooling for condition-aware video captioning"};
  app.set_version_flag("--version", std::string(anycap::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  std::string out_name = "json";
  app.add_option("--out", out_name, "Report format")->check(CLI::IsMember({"json", "csv", "markdown"}));
  app.add_flag("--timing", common.timing, "Add elapsed time to the report (breaks byte stability)");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::function<CommandResult()> run;

  ValidateOptions validate;
  auto* v = app.add_subcommand("validate", "Schema-check a record file");
  v->add_option("records", validate.records, "Line-delimited records")->required();
  v->callback([&] { run = [&] { return cmd_validate(validate, common); }; });

  ScoreOptions score;
  auto* s = app.add_subcommand("score", "Lexical, semantic and structure scores of predicted captions");
  s->add_option("--pred", score.pred)->required();
  s->add_option("--gt", score.gt)->required();
  s->add_option("--metrics", score.metrics, "bleu2, rouge_l, meteor, bertscore, integrity")->delimiter(',');
  s->add_option("--embed-endpoint", score.embed_endpoint, "Embedding service; token from ANYCAP_EMBED_TOKEN");
  s->add_option("--embed-cache", score.embed_cache, "Embedding cache file");
  s->add_option("--seed", score.seed, "Seed of the mock embeddings used without --embed-endpoint");
  s->callback([&] { run = [&] { return cmd_score(score, common); }; });

  SimilarityOptions sim;
  auto* sm = app.add_subcommand("similarity", "Text-to-video (CLIP-T) and identity similarity");
  sm->add_option("records", sim.records, "Dataset records")->required();
  sm->add_option("--text", sim.text, "Caption compared with the frames")->check(CLI::IsMember({"short", "structured"}));
  sm->add_option("--frames", sim.frames, "Frames per video, referenced as <video_ref>#<k>")->check(CLI::PositiveNumber);
  sm->add_option("--embed-endpoint", sim.embed_endpoint, "Embedding service; token from ANYCAP_EMBED_TOKEN");
  sm->add_option("--embed-cache", sim.embed_cache, "Embedding cache file");
  sm->add_option("--seed", sim.seed, "Seed of the mock embeddings used without --embed-endpoint");
  sm->callback([&] { run = [&] { return cmd_similarity(sim, common); }; });

  IrScoreOptions ir;
  auto* i = app.add_subcommand("irscore", "Judge-driven intent reasoning score");
  i->add_option("--pred", ir.pred)->required();
  i->add_option("--gt", ir.gt, "Full dataset records")->required();
  i->add_option("--judge-cache", ir.judge_cache)->required();
  i->add_option("--judge-endpoint", ir.judge_endpoint, "Judge service; token from ANYCAP_JUDGE_TOKEN");
  i->add_option("--judge-model", ir.judge_model);
  i->add_option("--max-retries", ir.max_retries)->check(CLI::NonNegativeNumber);
  i->add_flag("--replay", ir.replay, "Use only the cache; a miss fails the run");
  i->callback([&] { run = [&] { return cmd_irscore(ir, common); }; });

  CameraOptions cam;
  std::string agg = "mean";
  auto* c = app.add_subcommand("camera", "RotErr, TransErr and CamMC between two trajectories");
  c->add_option("--pred", cam.pred)->required();
  c->add_option("--gt", cam.gt)->required();
  c->add_flag("--normalized-intrinsics", cam.normalized_intrinsics);
  c->add_option("--width", cam.width, "Image width for normalized intrinsics");
  c->add_option("--height", cam.height, "Image height for normalized intrinsics");
  c->add_option("--agg", agg)->check(CLI::IsMember({"mean", "sum"}));
  c->add_flag("--absolute", cam.absolute, "Compare poses as given instead of relative to the first frame");
  c->callback([&] {
    cam.agg = agg == "sum" ? anycap::Aggregation::kSum : anycap::Aggregation::kMean;
    run = [&] { return cmd_camera(cam, common); };
  });

  PoseOptions pose;
  auto* p = app.add_subcommand("pose", "Keypoint accuracy between pose tracks");
  p->add_option("--pred", pose.pred)->required();
  p->add_option("--gt", pose.gt)->required();
  p->add_option("--alpha", pose.alpha)->check(CLI::NonNegativeNumber);
  p->callback([&] { run = [&] { return cmd_pose(pose, common); }; });

  DepthOptions depth;
  auto* d = app.add_subcommand("depth", "Normalized depth MAE");
  d->add_option("--pred", depth.pred)->required();
  d->add_option("--gt", depth.gt)->required();
  d->callback([&] { run = [&] { return cmd_depth(depth, common); }; });

  auto* ds = app.add_subcommand("dataset", "Dataset statistics, training manifests and condition sequences");
  ds->require_subcommand(1);
  ds->fallthrough();
  StatsOptions stats;
  auto* st = ds->add_subcommand("stats", "Per-category counts, durations and caption lengths");
  st->add_option("records", stats.records)->required();
  st->add_option("--bin-width", stats.bin_width)->check(CLI::PositiveNumber);
  st->callback([&] { run = [&] { return cmd_dataset_stats(stats, common); }; });
  ManifestOptions manifest;
  auto* mf = ds->add_subcommand("manifest", "Training manifest for one stage");
  mf->add_option("records", manifest.records)->required();
  mf->add_option("--stage", manifest.stage, "identities, human_pose, camera or depth")->required();
  mf->add_option("--aux", manifest.aux, "Auxiliary instruction refs, one per line");
  mf->add_option("--seed", manifest.seed)->required();
  mf->add_option("--ratio", manifest.ratio, "Joint-train ratio: 0, 0.4, 0.6 or 0.8");
  mf->add_option("--sentence-rate", manifest.sentence_rate);
  mf->add_option("--condition-rate", manifest.condition_rate);
  mf->add_option("--output", manifest.output)->required();
  mf->callback([&] { run = [&] { return cmd_dataset_manifest(manifest, common); }; });
  AssembleOptions assemble;
  auto* as = ds->add_subcommand("assemble", "Marker-wrapped condition sequences");
  as->add_option("records", assemble.records)->required();
  as->callback([&] { run = [&] { return cmd_dataset_assemble(assemble, common); }; });

  AugmentOptions aug;
  auto* a = app.add_subcommand("augment", "Sentence and condition dropout over a record file");
  a->add_option("records", aug.records)->required();
  a->add_option("--seed", aug.seed)->required();
  a->add_option("--sentence-rate", aug.sentence_rate);
  a->add_option("--condition-rate", aug.condition_rate);
  a->add_option("--output", aug.output)->required();
  a->callback([&] { run = [&] { return cmd_augment(aug, common); }; });

  PlueckerOptions pl;
  auto* pk = app.add_subcommand("pluecker", "Per-pixel ray embedding of a trajectory");
  pk->add_option("traj", pl.traj)->required();
  pk->add_option("--height", pl.height)->required();
  pk->add_option("--width", pl.width)->required();
  pk->add_flag("--normalized-intrinsics", pl.normalized_intrinsics);
  pk->add_option("--image-width", pl.image_width);
  pk->add_option("--image-height", pl.image_height);
  pk->add_option("--output", pl.output)->required();
  pk->callback([&] { run = [&] { return cmd_pluecker(pl, common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  common.format = *output_format_from_name(out_name);
  return execute(run, common, std::cout, std::cerr);
}
