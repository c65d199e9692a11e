#pragma once

#include <cstdint>

#include "glyomo/imgproc.hpp"
#include "glyomo/optical_flow.hpp"

namespace glyomo {

enum class HomographyStatus {
  Ok,
  DegenerateCorrespondences,  // fewer than 4 tracked pairs
  EstimationFailed,           // RANSAC consensus below the minimal sample size
};

struct HomographyEstimate {
  HomographyStatus status = HomographyStatus::EstimationFailed;
  Homography3x3 h;
  int inlier_count = 0;
  std::vector<std::uint8_t> inlier_mask;  // aligned with the input pairs
};

/// Least-squares projective fit (normalized DLT) wrapped in RANSAC with a
/// minimal sample of 4. The final transform is refit on all inliers and
/// has h33 normalized to 1. Untracked pairs are ignored.
HomographyEstimate estimate_homography(const std::vector<FlowPoint>& pairs, int ransac_iters,
                                       double inlier_tol, std::uint64_t seed);

/// Direct DLT fit on explicitly given correspondences (no RANSAC).
/// Returns an estimate with status Ok, or EstimationFailed when the system
/// is numerically degenerate.
HomographyEstimate fit_homography_dlt(const std::vector<Point2d>& src,
                                      const std::vector<Point2d>& dst);

}  // namespace glyomo
