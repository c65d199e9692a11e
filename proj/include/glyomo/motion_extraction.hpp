#pragma once

#include "glyomo/config.hpp"
#include "glyomo/imgproc.hpp"
#include "glyomo/types.hpp"

namespace glyomo {

/// A moving region isolated by aligned frame differencing, in full-frame
/// coordinates.
struct MotionCandidate {
  BBox bbox;
  int area;
  Point2d centroid;
};

/// Intermediate rasters of one extraction, for debug dumps.
struct ExtractionDebug {
  int crop_x = 0;
  int crop_y = 0;
  Image crop_prev;
  Image crop_curr;
  Image aligned;
  Image diff;
  Image binary_initial;
  Image binary_final;
};

/// Isolates moving regions between f_prev2 and f_curr inside a square crop
/// centered on the anchor box. The crop is aligned by a flow-estimated
/// perspective transform (translation fallback, then identity) before
/// differencing; candidates are sorted by area, largest first, and capped
/// at cfg.max_candidates. The anchor center must lie inside the frame.
std::vector<MotionCandidate> extract_candidates(const Frame& f_prev2, const Frame& f_curr,
                                                const BBox& anchor, const PipelineConfig& cfg,
                                                ExtractionDebug* debug = nullptr);

}  // namespace glyomo
