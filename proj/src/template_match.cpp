#include "glyomo/template_match.hpp"

#include <algorithm>
#include <cmath>

namespace glyomo {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kStationaryPx = 0.5;  // below this step, direction is undefined

double wrap_angle_abs(double delta) {
  double d = std::fmod(std::abs(delta), 2.0 * kPi);
  if (d > kPi) d = 2.0 * kPi - d;
  return d;
}

// Zero-mean correlation of two equal-length float patches.
// Returns nullopt when either patch has (near-)zero variance.
std::optional<double> correlate_patches(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va < 1e-9 || vb < 1e-9) return std::nullopt;
  return num / std::sqrt(va * vb);
}

}  // namespace

// --- TrackHistory ---

void TrackHistory::observe(int frame_index, const BBox& box, const Image& frame_gray,
                           bool update_template) {
  const Point2d c = box.center();
  if (last_center_) {
    const double dx = c.x - last_center_->pos.x;
    const double dy = c.y - last_center_->pos.y;
    const double d = std::hypot(dx, dy);
    last_distance_ = d;
    if (d >= kStationaryPx) {
      last_direction_ = std::atan2(dy, dx);
    }
    // below the stationary threshold the previous direction carries over
    has_displacement_ = true;
    prev_center_ = last_center_;
  }
  last_center_ = Center{c, frame_index};
  anchor_box_ = box;

  if (update_template && !frame_gray.empty()) {
    int w = std::max(1, static_cast<int>(std::lround(box.w)));
    int h = std::max(1, static_cast<int>(std::lround(box.h)));
    w = std::min(w, frame_gray.width);
    h = std::min(h, frame_gray.height);
    int x = static_cast<int>(std::lround(box.x));
    int y = static_cast<int>(std::lround(box.y));
    x = std::clamp(x, 0, frame_gray.width - w);
    y = std::clamp(y, 0, frame_gray.height - h);
    template_patch_ = crop(frame_gray, x, y, w, h);
  }
}

void TrackHistory::clear() { *this = TrackHistory{}; }

void TrackHistory::set_displacement(double distance, double direction) {
  last_distance_ = distance;
  last_direction_ = direction;
  has_displacement_ = true;
}

// --- NccMatcher ---

NccMatcher::NccMatcher(const Image& image) : image_(image) {
  const int w = image_.width, h = image_.height;
  integral_.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  integral_sq_.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  const auto at = [w](std::vector<std::uint64_t>& t, int x, int y) -> std::uint64_t& {
    return t[static_cast<std::size_t>(y) * (w + 1) + x];
  };
  for (int y = 1; y <= h; ++y) {
    std::uint64_t row = 0, row_sq = 0;
    for (int x = 1; x <= w; ++x) {
      const std::uint64_t v = image_.at(x - 1, y - 1);
      row += v;
      row_sq += v * v;
      at(integral_, x, y) = at(integral_, x, y - 1) + row;
      at(integral_sq_, x, y) = at(integral_sq_, x, y - 1) + row_sq;
    }
  }
}

std::optional<double> NccMatcher::score(const Image& tmpl, int x, int y) const {
  const int tw = tmpl.width, th = tmpl.height;
  if (tw <= 0 || th <= 0 || x < 0 || y < 0 || x + tw > image_.width || y + th > image_.height) {
    throw std::invalid_argument("ncc: template placement outside image");
  }
  const int w1 = image_.width + 1;
  const auto rect_sum = [&](const std::vector<std::uint64_t>& t) -> std::uint64_t {
    return t[static_cast<std::size_t>(y + th) * w1 + (x + tw)] -
           t[static_cast<std::size_t>(y) * w1 + (x + tw)] -
           t[static_cast<std::size_t>(y + th) * w1 + x] +
           t[static_cast<std::size_t>(y) * w1 + x];
  };

  const std::uint64_t n = static_cast<std::uint64_t>(tw) * th;
  std::uint64_t sum_t = 0, sum_t2 = 0, cross = 0;
  for (int v = 0; v < th; ++v) {
    const std::uint8_t* trow = &tmpl.px[static_cast<std::size_t>(v) * tw];
    const std::uint8_t* irow = &image_.px[static_cast<std::size_t>(y + v) * image_.width + x];
    for (int u = 0; u < tw; ++u) {
      sum_t += trow[u];
      sum_t2 += static_cast<std::uint64_t>(trow[u]) * trow[u];
      cross += static_cast<std::uint64_t>(trow[u]) * irow[u];
    }
  }
  const std::uint64_t sum_i = rect_sum(integral_);
  const std::uint64_t sum_i2 = rect_sum(integral_sq_);

  // n * var terms stay integral: zero variance is detected exactly
  const std::uint64_t nvar_t = n * sum_t2 - sum_t * sum_t;
  const std::uint64_t nvar_i = n * sum_i2 - sum_i * sum_i;
  if (nvar_t == 0 || nvar_i == 0) return std::nullopt;

  const double num = static_cast<double>(n) * cross -
                     static_cast<double>(sum_t) * static_cast<double>(sum_i);
  const double den = std::sqrt(static_cast<double>(nvar_t)) *
                     std::sqrt(static_cast<double>(nvar_i));
  return std::clamp(num / den, -1.0, 1.0);
}

std::optional<double> ncc(const Image& tmpl, const Image& image, int x, int y) {
  return NccMatcher(image).score(tmpl, x, y);
}

// --- multi-scale similarity ---

std::pair<double, double> multi_scale_similarity(const TrackHistory& hist,
                                                 const MotionCandidate& cand, const Image& frame,
                                                 const std::vector<double>& scales,
                                                 int search_radius) {
  const Image& tmpl = hist.template_patch();
  if (tmpl.empty()) return {0.0, scales.empty() ? 1.0 : scales.front()};
  const int tw = tmpl.width, th = tmpl.height;

  std::vector<double> tvals(static_cast<std::size_t>(tw) * th);
  for (std::size_t i = 0; i < tvals.size(); ++i) tvals[i] = tmpl.px[i];

  double best = 0.0;
  double best_scale = scales.front();
  std::vector<double> patch(tvals.size());

  for (double s : scales) {
    if (tw * s < 0.5 || th * s < 0.5) continue;  // degenerate after scaling
    double scale_best = 0.0;
    bool scale_any = false;
    for (int oy = -search_radius; oy <= search_radius; ++oy) {
      for (int ox = -search_radius; ox <= search_radius; ++ox) {
        const double cx = cand.centroid.x + ox;
        const double cy = cand.centroid.y + oy;
        // sample the candidate window (template size scaled by s),
        // resampled to template resolution in one pass
        for (int v = 0; v < th; ++v) {
          for (int u = 0; u < tw; ++u) {
            const double fx = cx + ((u + 0.5) - tw / 2.0) * s - 0.5;
            const double fy = cy + ((v + 0.5) - th / 2.0) * s - 0.5;
            patch[static_cast<std::size_t>(v) * tw + u] =
                sample_bilinear_clamped(frame, fx, fy);
          }
        }
        const auto corr = correlate_patches(tvals, patch);
        if (!corr) continue;  // zero variance scores 0
        scale_any = true;
        scale_best = std::max(scale_best, ncc_normalized(*corr));
      }
    }
    const double value = scale_any ? scale_best : 0.0;
    if (value > best) {
      best = value;
      best_scale = s;
    }
  }
  return {best, best_scale};
}

// --- displacement similarity ---

std::optional<DisplacementScore> displacement_similarity(const TrackHistory& hist,
                                                         const Point2d& cand_center,
                                                         double norm_width, double norm_height) {
  if (!hist.last_center() || !hist.has_displacement()) return std::nullopt;

  const Point2d& last = hist.last_center()->pos;
  const double dx = cand_center.x - last.x;
  const double dy = cand_center.y - last.y;
  const double d_now = std::hypot(dx, dy);

  const double diag = std::hypot(norm_width, norm_height);
  double dd_norm = diag > 0.0 ? std::abs(d_now - hist.last_distance()) / diag : 0.0;
  dd_norm = std::min(dd_norm, 1.0);

  double dtheta_norm = 0.0;
  if (d_now >= kStationaryPx) {
    const double theta_now = std::atan2(dy, dx);
    dtheta_norm = wrap_angle_abs(theta_now - hist.last_direction()) / kPi;
  }
  // a near-stationary candidate carries the previous direction forward

  const double c_d = std::clamp(1.0 - (dd_norm + dtheta_norm) / 2.0, 0.0, 1.0);
  return DisplacementScore{c_d, dd_norm, dtheta_norm};
}

// --- candidate selection ---

std::optional<MatchResult> match_candidates(const TrackHistory& hist,
                                            const std::vector<MotionCandidate>& cands,
                                            const Image& frame, double norm_width,
                                            double norm_height, const PipelineConfig& cfg) {
  if (cands.empty()) return std::nullopt;

  std::optional<MatchResult> best;
  double best_dist = 0.0;

  for (const MotionCandidate& cand : cands) {
    MatchScore score;
    const auto [c_c, best_scale] =
        multi_scale_similarity(hist, cand, frame, cfg.scales, cfg.ncc_search_radius);
    score.c_c = c_c;
    score.best_scale = best_scale;

    const auto disp = displacement_similarity(hist, cand.centroid, norm_width, norm_height);
    if (disp) {
      score.c_d = disp->c_d;
      score.dd_norm = disp->dd_norm;
      score.dtheta_norm = disp->dtheta_norm;
    } else {
      score.c_d = 0.5;  // neutral when no displacement history exists
    }
    score.c_w = weighted_cost(score.c_c, score.c_d, cfg.k2, cfg.k3);

    double dist = 0.0;
    if (hist.last_center()) {
      dist = std::hypot(cand.centroid.x - hist.last_center()->pos.x,
                        cand.centroid.y - hist.last_center()->pos.y);
    }

    bool take = false;
    if (!best) {
      take = true;
    } else if (score.c_w != best->score.c_w) {
      take = score.c_w > best->score.c_w;
    } else if (score.c_c != best->score.c_c) {
      take = score.c_c > best->score.c_c;
    } else if (dist != best_dist) {
      take = dist < best_dist;
    } else if (cand.centroid.y != best->candidate.centroid.y) {
      take = cand.centroid.y < best->candidate.centroid.y;
    } else {
      take = cand.centroid.x < best->candidate.centroid.x;
    }
    if (take) {
      best = MatchResult{cand, score};
      best_dist = dist;
    }
  }

  if (!best || best->score.c_w < cfg.min_match_cost) return std::nullopt;
  return best;
}

}  // namespace glyomo
