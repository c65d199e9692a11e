#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "glyomo/io.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

bool log_enabled() {
  const char* level = std::getenv("GLYOMO_LOG");
  if (!level) return false;
  const std::string l = level;
  return l == "info" || l == "debug";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glyomo: global-local tracking-by-detection for tiny aerial targets"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "process an image sequence");
  glyomo::RunConfig cfg;
  std::string config_path;
  bool seed_given = false;
  std::uint64_t seed_flag = 1;
  run->add_option("--input", cfg.input_dir, "directory of .pgm/.ppm frames")->required();
  run->add_option("--detector", cfg.detector_kind, "detector kind: mock or file");
  run->add_option("--detections-file", cfg.detections_file, "CSV replayed by the file detector");
  run->add_option("--gt", cfg.gt_path, "ground-truth CSV used by the mock detector");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_flag("--annotate", cfg.annotate, "write annotated PPM frames");
  run->add_flag("--debug-dumps", cfg.debug_dumps, "write motion-extraction intermediates");
  run->add_option("--seed", seed_flag, "RNG seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--dropout", cfg.mock.dropout, "mock detector dropout probability");
  run->add_option("--score-base", cfg.mock.score_base, "mock detector base score");
  run->add_option("--score-jitter", cfg.mock.score_jitter, "mock detector score jitter");
  run->add_option("--box-jitter", cfg.mock.box_jitter, "mock detector box jitter (px)");

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string pred_path, gt_path, eval_out;
  double iou_threshold = 0.1;
  eval->add_option("--pred", pred_path, "detections JSONL")->required();
  eval->add_option("--gt", gt_path, "ground-truth CSV")->required();
  eval->add_option("--iou-threshold", iou_threshold, "matching IOU threshold");
  eval->add_option("--out", eval_out, "directory for report.txt and pr_curve.csv");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  std::string spec_path, synth_out = "scene";
  std::uint64_t synth_seed = 0;
  bool synth_seed_given = false;
  synth->add_option("--spec", spec_path, "scene spec JSON (defaults apply when omitted)");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "override the scene seed")
      ->each([&](const std::string&) { synth_seed_given = true; });

  app.add_subcommand("version", "print version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("version")) {
      std::printf("glyomo %s\n", kVersion);
      return 0;
    }
    if (app.got_subcommand(run)) {
      // precedence: flags > config file > defaults
      glyomo::RunConfig file_cfg;
      if (!config_path.empty()) glyomo::apply_config_json(file_cfg, config_path);
      const glyomo::RunConfig flag_cfg = cfg;
      cfg = file_cfg;
      cfg.input_dir = flag_cfg.input_dir;
      cfg.out_dir = flag_cfg.out_dir;
      cfg.annotate = flag_cfg.annotate;
      cfg.debug_dumps = flag_cfg.debug_dumps;
      if (run->count("--detector")) cfg.detector_kind = flag_cfg.detector_kind;
      if (run->count("--detections-file")) cfg.detections_file = flag_cfg.detections_file;
      if (run->count("--gt")) cfg.gt_path = flag_cfg.gt_path;
      if (run->count("--dropout")) cfg.mock.dropout = flag_cfg.mock.dropout;
      if (run->count("--score-base")) cfg.mock.score_base = flag_cfg.mock.score_base;
      if (run->count("--score-jitter")) cfg.mock.score_jitter = flag_cfg.mock.score_jitter;
      if (run->count("--box-jitter")) cfg.mock.box_jitter = flag_cfg.mock.box_jitter;
      if (seed_given) cfg.seed = seed_flag;
      if (log_enabled()) {
        std::fprintf(stderr, "[glyomo] run: input=%s detector=%s out=%s seed=%llu\n",
                     cfg.input_dir.c_str(), cfg.detector_kind.c_str(), cfg.out_dir.c_str(),
                     static_cast<unsigned long long>(cfg.seed));
      }
      const glyomo::RunSummary s = glyomo::run_command(cfg);
      std::printf("frames: %d  emissions:", s.frames_processed);
      for (int m = 0; m < 4; ++m) {
        std::printf(" %s=%lld", glyomo::mode_name(static_cast<glyomo::DetectMode>(m)),
                    s.emissions[m]);
      }
      std::printf("  fps: %.2f\n", s.fps);
      return 0;
    }
    if (app.got_subcommand(eval)) {
      const glyomo::EvalReport r =
          glyomo::eval_command(pred_path, gt_path, iou_threshold, eval_out);
      std::printf("precision: %.6f\nrecall: %.6f\nf1: %.6f\nap: %.6f\n", r.precision, r.recall,
                  r.f1, r.ap);
      return 0;
    }
    if (app.got_subcommand(synth)) {
      glyomo::SceneSpec spec;
      if (!spec_path.empty()) spec = glyomo::read_scene_spec(spec_path);
      if (synth_seed_given) spec.seed = synth_seed;
      glyomo::synth_command(spec, synth_out);
      std::printf("wrote %d frames to %s\n", spec.frame_count, synth_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
