#pragma once

#include <optional>
#include <string>

#include "glyomo/config.hpp"
#include "glyomo/detectors.hpp"
#include "glyomo/eval.hpp"
#include "glyomo/synth.hpp"
#include "glyomo/types.hpp"

namespace glyomo {

// --- raster files ---

/// Reads a PGM (P5/P2) or PPM (P6/P3) file as grayscale; color inputs are
/// converted with the BT.601 luminance weights.
Image read_image(const std::string& path);

void write_pgm(const std::string& path, const Image& img);

struct Rgb {
  std::uint8_t r, g, b;
};

/// Writes a grayscale image as PPM with colored box outlines drawn on top.
void write_ppm_annotated(const std::string& path, const Image& img,
                         const std::vector<std::pair<BBox, Rgb>>& boxes);

Rgb mode_color(DetectMode m);

// --- frame ingestion ---

/// Filename-sorted image sequence from a directory; frames receive
/// contiguous indices starting at 0. All images must share dimensions
/// (violations name the offending file).
class FrameSource {
 public:
  explicit FrameSource(const std::string& dir);
  std::size_t count() const { return paths_.size(); }
  Frame load(std::size_t index) const;

 private:
  std::vector<std::string> paths_;
  int width_ = 0;
  int height_ = 0;
};

// --- tabular formats ---

/// Ground-truth CSV rows: frame,x,y,w,h[,class_id].
GtSet read_gt_csv(const std::string& path);
void write_gt_csv(const std::string& path, const std::vector<BBox>& per_frame_boxes);

/// Detections JSONL: one object per emission with keys
/// frame, x, y, w, h, score, class_id, mode.
PredSet read_detections_jsonl(const std::string& path);

// --- run configuration ---

struct RunConfig {
  std::string input_dir;
  std::string detector_kind = "mock";  // "mock" or "file"
  std::string detections_file;         // file detector input
  std::string gt_path;                 // mock detector ground truth
  MockDetectorConfig mock;
  PipelineConfig pipeline;
  std::string out_dir = "out";
  bool annotate = false;
  bool debug_dumps = false;
  std::uint64_t seed = 1;
};

/// Applies a JSON config document onto defaults. Recognized top-level
/// keys: "pipeline", "detector", "seed".
void apply_config_json(RunConfig& cfg, const std::string& path);

SceneSpec read_scene_spec(const std::string& path);

struct RunSummary {
  int frames_processed = 0;
  long long emissions[4] = {0, 0, 0, 0};  // indexed by DetectMode
  double fps = 0.0;
};

/// Executes the pipeline over the configured input and writes
/// detections.jsonl, summary.txt, and optional annotated frames and debug
/// dumps under out_dir. Output rows are flushed per frame.
RunSummary run_command(const RunConfig& cfg);

/// Evaluates a JSONL prediction file against a ground-truth CSV and writes
/// report.txt plus pr_curve.csv under out_dir (when non-empty).
EvalReport eval_command(const std::string& pred_path, const std::string& gt_path,
                        double iou_threshold, const std::string& out_dir);

/// Generates a synthetic sequence: numbered PGM frames plus gt.csv.
void synth_command(const SceneSpec& spec, const std::string& out_dir);

}  // namespace glyomo
