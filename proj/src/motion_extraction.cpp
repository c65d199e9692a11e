#include "glyomo/motion_extraction.hpp"

#include <algorithm>
#include <cmath>

#include "glyomo/homography.hpp"
#include "glyomo/optical_flow.hpp"

namespace glyomo {

namespace {

// Alignment fallback chain: full perspective fit, then the mean flow as a
// pure translation, then identity.
Homography3x3 align_transform(const std::vector<FlowPoint>& flow, const PipelineConfig& cfg) {
  const HomographyEstimate est =
      estimate_homography(flow, cfg.ransac_iters, cfg.ransac_tol, cfg.ransac_seed);
  if (est.status == HomographyStatus::Ok) return est.h;

  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (const FlowPoint& fp : flow) {
    if (!fp.tracked) continue;
    sx += fp.dst.x - fp.src.x;
    sy += fp.dst.y - fp.src.y;
    ++n;
  }
  if (n > 0) return Homography3x3::translation(sx / n, sy / n);
  return Homography3x3::identity();
}

}  // namespace

std::vector<MotionCandidate> extract_candidates(const Frame& f_prev2, const Frame& f_curr,
                                                const BBox& anchor, const PipelineConfig& cfg,
                                                ExtractionDebug* debug) {
  if (!f_prev2.gray.same_size(f_curr.gray)) {
    throw std::invalid_argument("extract_candidates: frames differ in size");
  }
  const int fw = f_curr.width(), fh = f_curr.height();
  const Point2d c = anchor.center();
  if (c.x < 0.0 || c.y < 0.0 || c.x > fw || c.y > fh) {
    throw std::invalid_argument("extract_candidates: anchor outside frame");
  }

  // square crop around the anchor, shifted (not shrunk) at frame edges
  const int side = std::min({cfg.delta_p, fw, fh});
  int cx = static_cast<int>(std::lround(c.x - side / 2.0));
  int cy = static_cast<int>(std::lround(c.y - side / 2.0));
  cx = std::clamp(cx, 0, fw - side);
  cy = std::clamp(cy, 0, fh - side);

  const Image crop_prev = crop(f_prev2.gray, cx, cy, side, side);
  const Image crop_curr = crop(f_curr.gray, cx, cy, side, side);

  LkParams lk;
  lk.levels = cfg.lk_levels;
  lk.win = cfg.lk_win;
  lk.max_iter = cfg.lk_max_iter;
  lk.eps = cfg.lk_eps;
  lk.min_eig = cfg.lk_min_eig;

  const BBox crop_region(0.0, 0.0, side, side);
  const auto keypoints =
      grid_keypoints(crop_region, cfg.grid_step, side, side, cfg.lk_win / 2 + 1);
  const auto flow = pyr_lk_track(crop_prev, crop_curr, keypoints, lk);

  const Homography3x3 h = align_transform(flow, cfg);

  Image valid;
  Image aligned = warp_perspective(crop_prev, h, side, side, &valid);

  // global photometric correction toward the current crop
  const double mean_aligned = mean_intensity(aligned, &valid);
  const double mean_curr = mean_intensity(crop_curr, &valid);
  aligned = add_offset_clamped(aligned, mean_curr - mean_aligned);

  Image diff = abs_diff(aligned, crop_curr);
  for (std::size_t i = 0; i < diff.px.size(); ++i) {
    if (valid.px[i] == 0) diff.px[i] = 0;
  }

  const int t1 = std::max(otsu_threshold(diff, &valid), cfg.diff_threshold_floor);
  const Image binary_initial = threshold_binary(diff, t1);

  Image refined = dilate(erode(binary_initial, cfg.erode_ksize), cfg.dilate_ksize);
  if (cfg.median_first) {
    refined = median_filter(refined, cfg.median_ksize);
    refined = gaussian_blur(refined, cfg.blur_sigma, cfg.blur_ksize);
  } else {
    refined = gaussian_blur(refined, cfg.blur_sigma, cfg.blur_ksize);
    refined = median_filter(refined, cfg.median_ksize);
  }
  const Image binary_final = threshold_binary(refined, cfg.rebinarize_threshold);

  auto components = connected_components(binary_final, cfg.min_component_area);

  std::vector<MotionCandidate> out;
  out.reserve(components.size());
  for (const ComponentStats& comp : components) {
    out.push_back(MotionCandidate{
        BBox(comp.bbox.x + cx, comp.bbox.y + cy, comp.bbox.w, comp.bbox.h),
        comp.area,
        {comp.centroid.x + cx, comp.centroid.y + cy},
    });
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MotionCandidate& a, const MotionCandidate& b) {
                     return a.area > b.area;
                   });
  if (static_cast<int>(out.size()) > cfg.max_candidates) {
    out.erase(out.begin() + cfg.max_candidates, out.end());
  }

  if (debug) {
    debug->crop_x = cx;
    debug->crop_y = cy;
    debug->crop_prev = crop_prev;
    debug->crop_curr = crop_curr;
    debug->aligned = aligned;
    debug->diff = diff;
    debug->binary_initial = binary_initial;
    debug->binary_final = binary_final;
  }
  return out;
}

}  // namespace glyomo
