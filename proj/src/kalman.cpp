#include "glyomo/kalman.hpp"

#include <algorithm>
#include <cmath>

namespace glyomo {

namespace {

void symmetrize(Eigen::Matrix<double, 8, 8>& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

KalmanState kf_init(const Detection& det, const PipelineConfig& cfg) {
  KalmanState s;
  s.x.setZero();
  s.x(0) = det.box.x;
  s.x(1) = det.box.y;
  s.x(2) = det.box.w;
  s.x(3) = det.box.h;

  s.f.setIdentity();
  for (int i = 0; i < 4; ++i) s.f(i, i + 4) = 1.0;  // dt = 1 frame

  s.h.setZero();
  for (int i = 0; i < 4; ++i) s.h(i, i) = 1.0;

  s.p.setZero();
  s.q.setZero();
  for (int i = 0; i < 4; ++i) {
    s.p(i, i) = cfg.kf_p0_pos;
    s.p(i + 4, i + 4) = cfg.kf_p0_vel;
    s.q(i, i) = cfg.kf_q_pos;
    s.q(i + 4, i + 4) = cfg.kf_q_vel;
  }
  s.r = cfg.kf_r * Eigen::Matrix<double, 4, 4>::Identity();
  return s;
}

KalmanState kf_predict(const KalmanState& s) {
  KalmanState out = s;
  out.x = s.f * s.x;
  out.p = s.f * s.p * s.f.transpose() + s.q;
  symmetrize(out.p);
  return out;
}

std::optional<KalmanState> kf_update(const KalmanState& s, const BBox& z) {
  Eigen::Matrix<double, 4, 1> zv;
  zv << z.x, z.y, z.w, z.h;

  const Eigen::Matrix<double, 4, 1> y = zv - s.h * s.x;
  const Eigen::Matrix<double, 4, 4> innov_cov = s.h * s.p * s.h.transpose() + s.r;

  const Eigen::FullPivLU<Eigen::Matrix<double, 4, 4>> lu(innov_cov);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Matrix<double, 4, 4> s_inv = lu.inverse();

  const Eigen::Matrix<double, 8, 4> k = s.p * s.h.transpose() * s_inv;

  KalmanState out = s;
  out.x = s.x + k * y;
  out.p = (Eigen::Matrix<double, 8, 8>::Identity() - k * s.h) * s.p;
  symmetrize(out.p);
  if (!out.x.allFinite() || !out.p.allFinite()) return std::nullopt;
  return out;
}

BBox predicted_box(const KalmanState& s) {
  constexpr double kMinSide = 1e-6;
  return BBox(s.x(0), s.x(1), std::max(s.x(2), kMinSide), std::max(s.x(3), kMinSide));
}

MatchVerdict verify_match(const KalmanState& prior, const BBox& matched) {
  return iou(predicted_box(prior), matched) > 0.0 ? MatchVerdict::ConfirmMatch
                                                  : MatchVerdict::UsePrediction;
}

}  // namespace glyomo
