#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "glyomo/types.hpp"

namespace glyomo {

enum class DetectContext { Global, Local };

struct DetectorOutput {
  std::vector<Detection> detections;  // coordinates relative to the region origin
  std::optional<double> latency_ms;
};

/// Appearance-detector contract. The pipeline hands over the full frame
/// plus the region to examine; implementations return boxes in region
/// coordinates, clipped to the region, and must be deterministic given
/// their configuration and the frame index.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectorOutput detect(const Frame& frame, const BBox& region, DetectContext ctx) = 0;
};

/// Ground-truth box keyed by frame, used by the mock detector.
struct MockTruth {
  std::map<int, BBox> boxes;
  int class_id = 0;
};

struct MockDetectorConfig {
  double dropout = 0.0;      // probability of emitting nothing on a frame
  double score_base = 0.9;
  double score_jitter = 0.0; // score = base + jitter * u, u in [-1,1]
  double box_jitter = 0.0;   // uniform +/- pixels applied to the box corner
  std::uint64_t seed = 1;
};

/// Deterministic test double: replays per-frame ground truth with seeded
/// dropout, score, and position jitter. The per-frame draw depends only on
/// (seed, frame index).
class MockDetector : public Detector {
 public:
  MockDetector(MockTruth truth, MockDetectorConfig cfg);
  DetectorOutput detect(const Frame& frame, const BBox& region, DetectContext ctx) override;

 private:
  MockTruth truth_;
  MockDetectorConfig cfg_;
};

/// Replays detections recorded as header-less CSV rows:
///   frame_index,x,y,w,h,score,class_id
/// Real-valued coordinates are allowed. Parse failures throw at load time
/// with the offending line number.
class FileDetector : public Detector {
 public:
  explicit FileDetector(const std::string& path);
  DetectorOutput detect(const Frame& frame, const BBox& region, DetectContext ctx) override;

 private:
  struct Row {
    double x, y, w, h, score;
    int class_id;
  };
  std::map<int, std::vector<Row>> rows_;
};

}  // namespace glyomo
