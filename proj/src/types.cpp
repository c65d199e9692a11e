#include "glyomo/types.hpp"

#include <algorithm>

namespace glyomo {

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(a.x, b.x);
  const double iy = std::max(a.y, b.y);
  const double ix2 = std::min(a.right(), b.right());
  const double iy2 = std::min(a.bottom(), b.bottom());
  const double iw = ix2 - ix;
  const double ih = iy2 - iy;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // areas go through the same right()-x rounding path as the intersection,
  // so identical boxes give exactly 1
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  return inter / (area_a + area_b - inter);
}

const char* mode_name(DetectMode m) {
  switch (m) {
    case DetectMode::GlobalYolo: return "global_yolo";
    case DetectMode::GlobalMotion: return "global_motion";
    case DetectMode::LocalYolo: return "local_yolo";
    case DetectMode::LocalMotion: return "local_motion";
  }
  return "unknown";
}

DetectMode mode_from_name(const std::string& name) {
  if (name == "global_yolo") return DetectMode::GlobalYolo;
  if (name == "global_motion") return DetectMode::GlobalMotion;
  if (name == "local_yolo") return DetectMode::LocalYolo;
  if (name == "local_motion") return DetectMode::LocalMotion;
  throw std::invalid_argument("unknown detection mode: " + name);
}

}  // namespace glyomo
