#include "glyomo/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "glyomo/rng.hpp"

namespace glyomo {

namespace {

struct Normalization {
  double cx = 0.0, cy = 0.0, scale = 1.0;

  Point2d apply(const Point2d& p) const { return {(p.x - cx) * scale, (p.y - cy) * scale}; }
};

// Translate to centroid, scale so the RMS distance from the origin is sqrt(2).
Normalization normalize_points(const std::vector<Point2d>& pts) {
  Normalization n;
  for (const auto& p : pts) {
    n.cx += p.x;
    n.cy += p.y;
  }
  n.cx /= pts.size();
  n.cy /= pts.size();
  double ms = 0.0;
  for (const auto& p : pts) {
    const double dx = p.x - n.cx, dy = p.y - n.cy;
    ms += dx * dx + dy * dy;
  }
  ms /= pts.size();
  n.scale = ms > 1e-12 ? std::sqrt(2.0 / ms) : 1.0;
  return n;
}

}  // namespace

HomographyEstimate fit_homography_dlt(const std::vector<Point2d>& src,
                                      const std::vector<Point2d>& dst) {
  HomographyEstimate est;
  if (src.size() < 4 || src.size() != dst.size()) {
    est.status = HomographyStatus::DegenerateCorrespondences;
    return est;
  }
  const Normalization ns = normalize_points(src);
  const Normalization nd = normalize_points(dst);

  const int n = static_cast<int>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Point2d s = ns.apply(src[i]);
    const Point2d d = nd.apply(dst[i]);
    a.row(2 * i) << -s.x, -s.y, -1, 0, 0, 0, d.x * s.x, d.x * s.y, d.x;
    a.row(2 * i + 1) << 0, 0, 0, -s.x, -s.y, -1, d.y * s.x, d.y * s.y, d.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);

  // denormalize: H = T_dst^-1 * Hn * T_src
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d ts, td_inv;
  ts << ns.scale, 0, -ns.scale * ns.cx, 0, ns.scale, -ns.scale * ns.cy, 0, 0, 1;
  td_inv << 1.0 / nd.scale, 0, nd.cx, 0, 1.0 / nd.scale, nd.cy, 0, 0, 1;
  const Eigen::Matrix3d full = td_inv * hn * ts;

  Homography3x3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.m[3 * r + c] = full(r, c);
  }
  out = out.normalized();
  if (!out.finite() || !out.inverse().has_value()) {
    est.status = HomographyStatus::EstimationFailed;
    return est;
  }
  est.status = HomographyStatus::Ok;
  est.h = out;
  return est;
}

HomographyEstimate estimate_homography(const std::vector<FlowPoint>& pairs, int ransac_iters,
                                       double inlier_tol, std::uint64_t seed) {
  HomographyEstimate est;
  std::vector<Point2d> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  std::vector<std::size_t> orig_index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].tracked) continue;
    src.push_back(pairs[i].src);
    dst.push_back(pairs[i].dst);
    orig_index.push_back(i);
  }
  est.inlier_mask.assign(pairs.size(), 0);
  if (src.size() < 4) {
    est.status = HomographyStatus::DegenerateCorrespondences;
    return est;
  }

  const std::size_t n = src.size();
  const double tol2 = inlier_tol * inlier_tol;
  const auto count_inliers = [&](const Homography3x3& h, std::vector<std::uint8_t>& mask) {
    int count = 0;
    mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Point2d p = h.apply(src[i].x, src[i].y);
      const double dx = p.x - dst[i].x, dy = p.y - dst[i].y;
      if (dx * dx + dy * dy <= tol2) {
        mask[i] = 1;
        ++count;
      }
    }
    return count;
  };

  Rng rng(seed);
  int best_count = 0;
  std::vector<std::uint8_t> best_mask;
  std::vector<Point2d> ssrc(4), sdst(4);
  std::vector<std::uint8_t> mask;
  for (int it = 0; it < ransac_iters; ++it) {
    std::size_t idx[4];
    idx[0] = rng.index(n);
    for (int k = 1; k < 4; ++k) {
      bool fresh = false;
      while (!fresh) {
        idx[k] = rng.index(n);
        fresh = true;
        for (int j = 0; j < k; ++j) {
          if (idx[j] == idx[k]) {
            fresh = false;
            break;
          }
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      ssrc[k] = src[idx[k]];
      sdst[k] = dst[idx[k]];
    }
    const HomographyEstimate cand = fit_homography_dlt(ssrc, sdst);
    if (cand.status != HomographyStatus::Ok) continue;
    const int count = count_inliers(cand.h, mask);
    if (count > best_count) {
      best_count = count;
      best_mask = mask;
    }
  }

  if (best_count < 4) {
    est.status = HomographyStatus::EstimationFailed;
    return est;
  }

  // refit on the consensus set
  std::vector<Point2d> isrc, idst;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask[i]) {
      isrc.push_back(src[i]);
      idst.push_back(dst[i]);
    }
  }
  HomographyEstimate refit = fit_homography_dlt(isrc, idst);
  if (refit.status != HomographyStatus::Ok) {
    est.status = HomographyStatus::EstimationFailed;
    return est;
  }
  est.status = HomographyStatus::Ok;
  est.h = refit.h;
  est.inlier_count = count_inliers(est.h, mask);
  if (est.inlier_count < 4) {
    est.status = HomographyStatus::EstimationFailed;
    est.inlier_count = 0;
    return est;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) est.inlier_mask[orig_index[i]] = 1;
  }
  return est;
}

}  // namespace glyomo
