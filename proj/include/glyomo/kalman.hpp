#pragma once

#include <Eigen/Dense>
#include <optional>

#include "glyomo/config.hpp"
#include "glyomo/types.hpp"

namespace glyomo {

/// Constant-velocity filter over [x, y, w, h, vx, vy, vw, vh] with the box
/// corner, size, and their per-frame rates. The observation is the box
/// [x, y, w, h]. Operations are pure: each returns a new state.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> x;
  Eigen::Matrix<double, 8, 8> p;
  Eigen::Matrix<double, 8, 8> f;
  Eigen::Matrix<double, 4, 8> h;
  Eigen::Matrix<double, 8, 8> q;
  Eigen::Matrix<double, 4, 4> r;

  /// max |P - P^T|; the filter keeps this below 1e-9.
  double asymmetry() const { return (p - p.transpose()).cwiseAbs().maxCoeff(); }
};

enum class MatchVerdict {
  ConfirmMatch,
  UsePrediction,
};

KalmanState kf_init(const Detection& det, const PipelineConfig& cfg);

/// Time update: x <- F x, P <- F P F^T + Q.
KalmanState kf_predict(const KalmanState& s);

/// Measurement update with z = [box.x, box.y, box.w, box.h].
/// nullopt when the innovation covariance is numerically singular
/// (the caller reinitializes the filter).
std::optional<KalmanState> kf_update(const KalmanState& s, const BBox& z);

/// The state's box, with size floored at a small positive value.
BBox predicted_box(const KalmanState& s);

/// ConfirmMatch when the matched box overlaps the predicted (prior) box
/// with strictly positive IOU; UsePrediction otherwise.
MatchVerdict verify_match(const KalmanState& prior, const BBox& matched);

}  // namespace glyomo
