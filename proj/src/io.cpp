#include "glyomo/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "glyomo/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glyomo {

namespace {

int read_pnm_token(std::istream& in) {
  // skips whitespace and '#' comments
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  return value;
}

std::uint8_t luma601(int r, int g, int b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

void draw_box_outline(std::vector<std::uint8_t>& rgb, int w, int h, const BBox& box, Rgb color) {
  const int x0 = std::clamp(static_cast<int>(std::lround(box.x)), 0, w - 1);
  const int y0 = std::clamp(static_cast<int>(std::lround(box.y)), 0, h - 1);
  const int x1 = std::clamp(static_cast<int>(std::lround(box.right())) - 1, 0, w - 1);
  const int y1 = std::clamp(static_cast<int>(std::lround(box.bottom())) - 1, 0, h - 1);
  const auto put = [&](int x, int y) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * w + x);
    rgb[i] = color.r;
    rgb[i + 1] = color.g;
    rgb[i + 2] = color.b;
  };
  for (int x = x0; x <= x1; ++x) {
    put(x, y0);
    put(x, y1);
  }
  for (int y = y0; y <= y1; ++y) {
    put(x0, y);
    put(x1, y);
  }
}

std::string frame_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.pgm", index);
  return buf;
}

double json_number(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

// --- raster files ---

Image read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2" && magic != "P6" && magic != "P3") {
    throw std::runtime_error(path + ": unsupported image format (want PGM or PPM)");
  }
  const int w = read_pnm_token(in);
  const int h = read_pnm_token(in);
  const int maxval = read_pnm_token(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw std::runtime_error(path + ": bad PNM header");
  }
  Image img(w, h);
  const std::size_t n = img.px.size();
  if (magic == "P5") {
    in.get();  // single whitespace after header
    in.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error(path + ": truncated pixel data");
  } else if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) img.px[i] = static_cast<std::uint8_t>(read_pnm_token(in));
  } else if (magic == "P6") {
    in.get();
    std::vector<std::uint8_t> rgb(n * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!in) throw std::runtime_error(path + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      img.px[i] = luma601(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    }
  } else {  // P3
    for (std::size_t i = 0; i < n; ++i) {
      const int r = read_pnm_token(in);
      const int g = read_pnm_token(in);
      const int b = read_pnm_token(in);
      img.px[i] = luma601(r, g, b);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.px.data()),
            static_cast<std::streamsize>(img.px.size()));
}

void write_ppm_annotated(const std::string& path, const Image& img,
                         const std::vector<std::pair<BBox, Rgb>>& boxes) {
  std::vector<std::uint8_t> rgb(img.px.size() * 3);
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.px[i];
  }
  for (const auto& [box, color] : boxes) {
    draw_box_outline(rgb, img.width, img.height, box, color);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

Rgb mode_color(DetectMode m) {
  switch (m) {
    case DetectMode::GlobalYolo: return {0, 255, 0};
    case DetectMode::GlobalMotion: return {80, 200, 255};
    case DetectMode::LocalYolo: return {0, 0, 180};
    case DetectMode::LocalMotion: return {255, 0, 0};
  }
  return {255, 255, 255};
}

// --- frame ingestion ---

FrameSource::FrameSource(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("input is not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") paths_.push_back(entry.path().string());
  }
  if (paths_.empty()) throw std::runtime_error("no .pgm/.ppm frames in " + dir);
  std::sort(paths_.begin(), paths_.end());
  const Image first = read_image(paths_.front());
  width_ = first.width;
  height_ = first.height;
  for (const std::string& p : paths_) {
    const Image img = read_image(p);
    if (img.width != width_ || img.height != height_) {
      throw std::runtime_error("frame dimension mismatch: " + p);
    }
  }
}

Frame FrameSource::load(std::size_t index) const {
  Frame f;
  f.index = static_cast<int>(index);
  f.gray = read_image(paths_.at(index));
  return f;
}

// --- tabular formats ---

GtSet read_gt_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ground truth: " + path);
  GtSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5 && fields.size() != 6) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected frame,x,y,w,h[,class]");
    }
    try {
      const int frame = std::stoi(fields[0]);
      GtBox gt{BBox(std::stod(fields[1]), std::stod(fields[2]), std::stod(fields[3]),
                    std::stod(fields[4])),
               fields.size() == 6 ? std::stoi(fields[5]) : 0};
      out[frame].push_back(gt);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": malformed ground-truth row");
    }
  }
  return out;
}

void write_gt_csv(const std::string& path, const std::vector<BBox>& per_frame_boxes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ground truth: " + path);
  char buf[160];
  for (std::size_t i = 0; i < per_frame_boxes.size(); ++i) {
    const BBox& b = per_frame_boxes[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g,%.10g\n", i, b.x, b.y, b.w, b.h);
    out << buf;
  }
}

PredSet read_detections_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions: " + path);
  PredSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const Detection det(BBox(j.at("x").get<double>(), j.at("y").get<double>(),
                               j.at("w").get<double>(), j.at("h").get<double>()),
                          j.at("score").get<double>(), j.at("class_id").get<int>(),
                          mode_from_name(j.at("mode").get<std::string>()));
      out[j.at("frame").get<int>()].push_back(det);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// --- configuration ---

void apply_config_json(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("pipeline")) {
    const json& p = j.at("pipeline");
    PipelineConfig& pc = cfg.pipeline;
    pc.n_g = static_cast<int>(json_number(p, "n_g", pc.n_g));
    pc.n_l = static_cast<int>(json_number(p, "n_l", pc.n_l));
    pc.tau_g = json_number(p, "tau_g", pc.tau_g);
    pc.tau_l = json_number(p, "tau_l", pc.tau_l);
    pc.r_s = json_number(p, "r_s", pc.r_s);
    pc.roi_base = json_number(p, "roi_base", pc.roi_base);
    pc.k1 = json_number(p, "k1", pc.k1);
    pc.k2 = json_number(p, "k2", pc.k2);
    pc.k3 = json_number(p, "k3", pc.k3);
    pc.delta_p = static_cast<int>(json_number(p, "delta_p", pc.delta_p));
    pc.min_match_cost = json_number(p, "min_match_cost", pc.min_match_cost);
    pc.diff_threshold_floor =
        static_cast<int>(json_number(p, "diff_threshold_floor", pc.diff_threshold_floor));
    pc.rebinarize_threshold =
        static_cast<int>(json_number(p, "rebinarize_threshold", pc.rebinarize_threshold));
    pc.erode_ksize = static_cast<int>(json_number(p, "erode_ksize", pc.erode_ksize));
    pc.dilate_ksize = static_cast<int>(json_number(p, "dilate_ksize", pc.dilate_ksize));
    pc.median_ksize = static_cast<int>(json_number(p, "median_ksize", pc.median_ksize));
    pc.blur_ksize = static_cast<int>(json_number(p, "blur_ksize", pc.blur_ksize));
    pc.blur_sigma = json_number(p, "blur_sigma", pc.blur_sigma);
    if (p.contains("median_first")) pc.median_first = p.at("median_first").get<bool>();
    pc.min_component_area =
        static_cast<int>(json_number(p, "min_component_area", pc.min_component_area));
    pc.max_candidates = static_cast<int>(json_number(p, "max_candidates", pc.max_candidates));
    pc.ncc_search_radius =
        static_cast<int>(json_number(p, "ncc_search_radius", pc.ncc_search_radius));
    if (p.contains("scales")) pc.scales = p.at("scales").get<std::vector<double>>();
    pc.lk_levels = static_cast<int>(json_number(p, "lk_levels", pc.lk_levels));
    pc.lk_win = static_cast<int>(json_number(p, "lk_win", pc.lk_win));
    pc.lk_max_iter = static_cast<int>(json_number(p, "lk_max_iter", pc.lk_max_iter));
    pc.lk_eps = json_number(p, "lk_eps", pc.lk_eps);
    pc.lk_min_eig = json_number(p, "lk_min_eig", pc.lk_min_eig);
    pc.grid_step = json_number(p, "grid_step", pc.grid_step);
    pc.ransac_iters = static_cast<int>(json_number(p, "ransac_iters", pc.ransac_iters));
    pc.ransac_tol = json_number(p, "ransac_tol", pc.ransac_tol);
    pc.kf_q_pos = json_number(p, "kf_q_pos", pc.kf_q_pos);
    pc.kf_q_vel = json_number(p, "kf_q_vel", pc.kf_q_vel);
    pc.kf_r = json_number(p, "kf_r", pc.kf_r);
    pc.kf_p0_pos = json_number(p, "kf_p0_pos", pc.kf_p0_pos);
    pc.kf_p0_vel = json_number(p, "kf_p0_vel", pc.kf_p0_vel);
  }
  if (j.contains("detector")) {
    const json& d = j.at("detector");
    if (d.contains("kind")) cfg.detector_kind = d.at("kind").get<std::string>();
    if (d.contains("path")) cfg.detections_file = d.at("path").get<std::string>();
    if (d.contains("gt")) cfg.gt_path = d.at("gt").get<std::string>();
    cfg.mock.dropout = json_number(d, "dropout", cfg.mock.dropout);
    cfg.mock.score_base = json_number(d, "score_base", cfg.mock.score_base);
    cfg.mock.score_jitter = json_number(d, "score_jitter", cfg.mock.score_jitter);
    cfg.mock.box_jitter = json_number(d, "box_jitter", cfg.mock.box_jitter);
  }
}

SceneSpec read_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene spec: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  SceneSpec s;
  s.width = static_cast<int>(json_number(j, "width", s.width));
  s.height = static_cast<int>(json_number(j, "height", s.height));
  s.frame_count = static_cast<int>(json_number(j, "frames", s.frame_count));
  if (j.contains("background")) {
    const std::string b = j.at("background").get<std::string>();
    if (b == "noise") s.background = BackgroundKind::NoiseTexture;
    else if (b == "gradient") s.background = BackgroundKind::GradientSky;
    else if (b == "composite") s.background = BackgroundKind::Composite;
    else throw std::runtime_error("scene: unknown background kind: " + b);
  }
  if (j.contains("pan")) {
    s.pan_dx = j.at("pan").at(0).get<double>();
    s.pan_dy = j.at("pan").at(1).get<double>();
  }
  if (j.contains("target")) {
    const json& t = j.at("target");
    s.has_target = true;
    if (t.contains("start")) {
      s.target_x0 = t.at("start").at(0).get<double>();
      s.target_y0 = t.at("start").at(1).get<double>();
    }
    if (t.contains("velocity")) {
      s.target_vx = t.at("velocity").at(0).get<double>();
      s.target_vy = t.at("velocity").at(1).get<double>();
    }
    if (t.contains("size")) {
      s.target_w = t.at("size").at(0).get<double>();
      s.target_h = t.at("size").at(1).get<double>();
    }
    s.target_contrast = json_number(t, "contrast", s.target_contrast);
  } else if (j.contains("has_target")) {
    s.has_target = j.at("has_target").get<bool>();
  }
  s.noise_sigma = json_number(j, "noise_sigma", s.noise_sigma);
  if (j.contains("distractors")) {
    const json& d = j.at("distractors");
    s.distractor_count = static_cast<int>(json_number(d, "count", s.distractor_count));
    s.distractor_min_size = json_number(d, "min_size", s.distractor_min_size);
    s.distractor_max_size = json_number(d, "max_size", s.distractor_max_size);
  }
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

// --- commands ---

RunSummary run_command(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);

  std::shared_ptr<Detector> detector;
  if (cfg.detector_kind == "mock") {
    if (cfg.gt_path.empty()) {
      throw std::runtime_error("mock detector needs a ground-truth CSV (--gt)");
    }
    MockTruth truth;
    for (const auto& [frame, boxes] : read_gt_csv(cfg.gt_path)) {
      if (!boxes.empty()) {
        truth.boxes.emplace(frame, boxes.front().box);
        truth.class_id = boxes.front().class_id;
      }
    }
    MockDetectorConfig mc = cfg.mock;
    mc.seed = cfg.seed;
    detector = std::make_shared<MockDetector>(std::move(truth), mc);
  } else if (cfg.detector_kind == "file") {
    if (cfg.detections_file.empty()) {
      throw std::runtime_error("file detector needs --detections-file");
    }
    detector = std::make_shared<FileDetector>(cfg.detections_file);
  } else {
    throw std::runtime_error("unknown detector kind: " + cfg.detector_kind);
  }

  PipelineConfig pc = cfg.pipeline;
  pc.ransac_seed = cfg.seed;
  GlYomoPipeline pipeline(detector, pc);

  const std::string debug_dir = cfg.out_dir + "/debug";
  if (cfg.debug_dumps) {
    fs::create_directories(debug_dir);
    pipeline.set_debug_callback([&debug_dir](int frame_index, const ExtractionDebug& d) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "/%06d_", frame_index);
      const std::string prefix = debug_dir + buf;
      write_pgm(prefix + "aligned.pgm", d.aligned);
      write_pgm(prefix + "diff.pgm", d.diff);
      write_pgm(prefix + "binary.pgm", d.binary_final);
    });
  }

  const std::string annotate_dir = cfg.out_dir + "/annotated";
  if (cfg.annotate) fs::create_directories(annotate_dir);

  FrameSource source(cfg.input_dir);
  std::ofstream jsonl(cfg.out_dir + "/detections.jsonl");
  if (!jsonl) throw std::runtime_error("cannot write " + cfg.out_dir + "/detections.jsonl");

  RunSummary summary;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < source.count(); ++i) {
    Frame frame = source.load(i);
    const Image gray = frame.gray;  // kept for annotation; pipeline owns the frame
    const auto det = pipeline.step(std::move(frame));
    ++summary.frames_processed;
    if (det) {
      ++summary.emissions[static_cast<int>(det->mode)];
      json j;
      j["frame"] = static_cast<int>(i);
      j["x"] = det->box.x;
      j["y"] = det->box.y;
      j["w"] = det->box.w;
      j["h"] = det->box.h;
      j["score"] = det->score;
      j["class_id"] = det->class_id;
      j["mode"] = mode_name(det->mode);
      jsonl << j.dump() << "\n";
      jsonl.flush();
    }
    if (cfg.annotate) {
      std::vector<std::pair<BBox, Rgb>> boxes;
      if (det) boxes.emplace_back(det->box, mode_color(det->mode));
      char buf[64];
      std::snprintf(buf, sizeof(buf), "/%06d.ppm", static_cast<int>(i));
      write_ppm_annotated(annotate_dir + buf, gray, boxes);
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  summary.fps = seconds > 0.0 ? summary.frames_processed / seconds : 0.0;

  std::ofstream sum(cfg.out_dir + "/summary.txt");
  sum << "frames_processed: " << summary.frames_processed << "\n";
  for (int m = 0; m < 4; ++m) {
    sum << mode_name(static_cast<DetectMode>(m)) << ": " << summary.emissions[m] << "\n";
  }
  char fps_buf[64];
  std::snprintf(fps_buf, sizeof(fps_buf), "fps: %.2f\n", summary.fps);
  sum << fps_buf;
  return summary;
}

EvalReport eval_command(const std::string& pred_path, const std::string& gt_path,
                        double iou_threshold, const std::string& out_dir) {
  const PredSet preds = read_detections_jsonl(pred_path);
  const GtSet gts = read_gt_csv(gt_path);
  const EvalReport report = evaluate(preds, gts, iou_threshold);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir + "/report.txt");
    char buf[96];
    out << "iou_threshold: " << report.iou_threshold << "\n";
    out << "tp: " << report.tp << "\n";
    out << "fp: " << report.fp << "\n";
    out << "fn: " << report.fn << "\n";
    std::snprintf(buf, sizeof(buf), "precision: %.6f\n", report.precision);
    out << buf;
    std::snprintf(buf, sizeof(buf), "recall: %.6f\n", report.recall);
    out << buf;
    std::snprintf(buf, sizeof(buf), "f1: %.6f\n", report.f1);
    out << buf;
    std::snprintf(buf, sizeof(buf), "ap: %.6f\n", report.ap);
    out << buf;
    std::ofstream curve(out_dir + "/pr_curve.csv");
    curve << "recall,precision\n";
    for (const auto& [r, p] : report.pr_curve) {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r, p);
      curve << buf;
    }
  }
  return report;
}

void synth_command(const SceneSpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const GeneratedScene scene = generate(spec);
  for (const Frame& frame : scene.frames) {
    write_pgm(out_dir + "/" + frame_filename(frame.index), frame.gray);
  }
  if (!scene.ground_truth.empty()) {
    write_gt_csv(out_dir + "/gt.csv", scene.ground_truth);
  }
}

}  // namespace glyomo
