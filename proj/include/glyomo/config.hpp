#pragma once

#include <cstdint>
#include <vector>

namespace glyomo {

/// All tunable thresholds for the detection pipeline. Defaults follow the
/// reference configuration: full-frame detection hands off to a 300x300
/// local region after 30 consecutive hits, reverts after 60 local misses.
struct PipelineConfig {
  // Global/local switching
  int n_g = 30;              // consecutive global hits before switching to local
  int n_l = 60;              // consecutive local misses before reverting to global
  double tau_g = 0.3;        // confidence gate for global appearance detections
  double tau_l = 0.1;        // confidence gate for local appearance detections
  double r_s = 4.0 / 5.0;    // fraction of ROI half-side within which the ROI stays put
  double roi_base = 300.0;   // base ROI side in pixels
  double k1 = 1.0;           // ROI growth per lost frame (pixels/frame)

  // Motion extraction. Erosion defaults to the identity kernel: diff
  // crescents of the smallest targets are thinner than any erosion
  // structuring element, and the smoothing rebinarization already prunes
  // isolated pixels.
  int delta_p = 50;          // side of the motion-extraction crop
  int diff_threshold_floor = 15;   // lower bound on the Otsu diff threshold
  int rebinarize_threshold = 100;  // threshold applied after smoothing
  int erode_ksize = 1;
  int dilate_ksize = 3;
  int median_ksize = 3;
  int blur_ksize = 5;
  double blur_sigma = 1.0;
  bool median_first = true;  // median before Gaussian in post-processing
  int min_component_area = 2;
  int max_candidates = 8;

  // Alignment correspondences come from the extraction crop by default;
  // full-frame estimation trades speed for robustness on sparse texture.
  bool align_full_frame = false;

  // Optical flow
  int lk_levels = 3;
  int lk_win = 11;
  int lk_max_iter = 20;
  double lk_eps = 0.01;
  double lk_min_eig = 1e-4;  // per-pixel min eigenvalue, intensities in [0,1]
  double grid_step = 5.0;

  // Homography estimation
  int ransac_iters = 200;
  double ransac_tol = 1.5;   // inlier reprojection tolerance in pixels
  std::uint64_t ransac_seed = 7;

  // Template matching
  double k2 = 0.6;           // weight of visual similarity
  double k3 = 0.4;           // weight of displacement similarity
  std::vector<double> scales = {0.7, 1.0, 1.3};
  int ncc_search_radius = 2; // +/- pixels around the candidate centroid
  double min_match_cost = 0.5;

  // Kalman filter noise model (pixels, frames)
  double kf_q_pos = 1.0;
  double kf_q_vel = 0.25;
  double kf_r = 4.0;
  double kf_p0_pos = 10.0;
  double kf_p0_vel = 100.0;

  /// Throws std::invalid_argument when a structural invariant is violated.
  void validate() const;
};

}  // namespace glyomo
