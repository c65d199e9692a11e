#pragma once

#include "glyomo/types.hpp"

namespace glyomo {

struct FlowPoint {
  Point2d src;
  Point2d dst;       // meaningful only when tracked
  bool tracked = false;
  double residual = 0.0;  // mean absolute window difference, intensity levels
};

struct LkParams {
  int levels = 3;
  int win = 11;       // odd, >= 3
  int max_iter = 20;
  double eps = 0.01;  // convergence step in pixels
  double min_eig = 1e-4;  // per-pixel min eigenvalue gate, intensities in [0,1]
};

/// Symmetric lattice of keypoints at the given spacing inside region,
/// keeping at least `margin` pixels from the image borders. A region
/// smaller than one step yields its center as the single point.
std::vector<Point2d> grid_keypoints(const BBox& region, double step, int img_w, int img_h,
                                    int margin);

/// Iterative coarse-to-fine Lucas-Kanade tracking of sparse points from
/// prev to curr. Untracked points are flagged, never dropped, so the
/// output is index-aligned with pts.
std::vector<FlowPoint> pyr_lk_track(const Image& prev, const Image& curr,
                                    const std::vector<Point2d>& pts, const LkParams& params);

}  // namespace glyomo
