#include "glyomo/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "glyomo/rng.hpp"

namespace glyomo {

namespace {

// Clips a full-frame box to the region and rebases it to region
// coordinates. nullopt when the overlap is empty.
std::optional<BBox> clip_to_region(double x, double y, double w, double h, const BBox& region) {
  const double x0 = std::max(x, region.x);
  const double y0 = std::max(y, region.y);
  const double x1 = std::min(x + w, region.right());
  const double y1 = std::min(y + h, region.bottom());
  if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0) return std::nullopt;
  return BBox(x0 - region.x, y0 - region.y, x1 - x0, y1 - y0);
}

DetectMode yolo_mode(DetectContext ctx) {
  return ctx == DetectContext::Global ? DetectMode::GlobalYolo : DetectMode::LocalYolo;
}

}  // namespace

// --- MockDetector ---

MockDetector::MockDetector(MockTruth truth, MockDetectorConfig cfg)
    : truth_(std::move(truth)), cfg_(cfg) {}

DetectorOutput MockDetector::detect(const Frame& frame, const BBox& region, DetectContext ctx) {
  DetectorOutput out;
  const auto it = truth_.boxes.find(frame.index);
  if (it == truth_.boxes.end()) return out;

  Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(frame.index)));
  const double u_drop = rng.next_double();
  const double u_score = rng.uniform(-1.0, 1.0);
  const double u_jx = rng.uniform(-1.0, 1.0);
  const double u_jy = rng.uniform(-1.0, 1.0);
  if (u_drop < cfg_.dropout) return out;

  const BBox& gt = it->second;
  const double score = std::clamp(cfg_.score_base + cfg_.score_jitter * u_score, 0.0, 1.0);
  const auto clipped = clip_to_region(gt.x + cfg_.box_jitter * u_jx,
                                      gt.y + cfg_.box_jitter * u_jy, gt.w, gt.h, region);
  if (!clipped) return out;
  out.detections.emplace_back(*clipped, score, truth_.class_id, yolo_mode(ctx));
  return out;
}

// --- FileDetector ---

FileDetector::FileDetector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("detections file not found: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 7 comma-separated fields");
    }
    try {
      const int frame = std::stoi(fields[0]);
      Row row{std::stod(fields[1]), std::stod(fields[2]), std::stod(fields[3]),
              std::stod(fields[4]), std::stod(fields[5]), std::stoi(fields[6])};
      if (!(row.w > 0.0) || !(row.h > 0.0) || row.score < 0.0 || row.score > 1.0) {
        throw std::invalid_argument("out-of-range value");
      }
      rows_[frame].push_back(row);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": malformed detection row");
    }
  }
}

DetectorOutput FileDetector::detect(const Frame& frame, const BBox& region, DetectContext ctx) {
  DetectorOutput out;
  const auto it = rows_.find(frame.index);
  if (it == rows_.end()) return out;
  for (const Row& row : it->second) {
    const auto clipped = clip_to_region(row.x, row.y, row.w, row.h, region);
    if (!clipped) continue;
    out.detections.emplace_back(*clipped, row.score, row.class_id, yolo_mode(ctx));
  }
  return out;
}

}  // namespace glyomo
