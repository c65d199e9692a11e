#include "glyomo/optical_flow.hpp"

#include <algorithm>
#include <cmath>

namespace glyomo {

namespace {

struct Level {
  ImageF img;
  ImageF gx;
  ImageF gy;
};

ImageF to_unit_float(const Image& img) {
  ImageF out(img.width, img.height);
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    out.px[i] = static_cast<float>(img.px[i]) / 255.0f;
  }
  return out;
}

ImageF downsample2(const ImageF& img) {
  const int w = std::max(1, img.width / 2);
  const int h = std::max(1, img.height / 2);
  ImageF out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, img.height - 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, img.width - 1);
      out.at(x, y) =
          0.25f * (img.at(x0, y0) + img.at(x1, y0) + img.at(x0, y1) + img.at(x1, y1));
    }
  }
  return out;
}

void central_gradients(const ImageF& img, ImageF& gx, ImageF& gy) {
  const int w = img.width, h = img.height;
  gx = ImageF(w, h);
  gy = ImageF(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(0, x - 1), xr = std::min(w - 1, x + 1);
      const int yu = std::max(0, y - 1), yd = std::min(h - 1, y + 1);
      gx.at(x, y) = 0.5f * (img.at(xr, y) - img.at(xl, y));
      gy.at(x, y) = 0.5f * (img.at(x, yd) - img.at(x, yu));
    }
  }
}

std::vector<Level> build_pyramid(const Image& img, int levels, int win) {
  std::vector<Level> pyr;
  ImageF cur = to_unit_float(img);
  for (int l = 0; l < levels; ++l) {
    if (cur.width < win + 2 || cur.height < win + 2) break;
    Level lev;
    lev.img = cur;
    central_gradients(lev.img, lev.gx, lev.gy);
    pyr.push_back(std::move(lev));
    if (l + 1 < levels) cur = downsample2(cur);
  }
  return pyr;
}

inline double sample(const ImageF& img, double fx, double fy) {
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double ax = fx - x0, ay = fy - y0;
  return (1 - ax) * (1 - ay) * img.at(x0, y0) + ax * (1 - ay) * img.at(x1, y0) +
         (1 - ax) * ay * img.at(x0, y1) + ax * ay * img.at(x1, y1);
}

inline bool window_inside(const ImageF& img, double cx, double cy, int half) {
  return cx - half >= 0.0 && cy - half >= 0.0 && cx + half <= img.width - 1.0 &&
         cy + half <= img.height - 1.0;
}

}  // namespace

std::vector<Point2d> grid_keypoints(const BBox& region, double step, int img_w, int img_h,
                                    int margin) {
  if (!(step >= 1.0)) throw std::invalid_argument("grid step must be >= 1");
  const auto lattice = [&](double origin, double extent) {
    std::vector<double> vals;
    const int n = std::max(1, static_cast<int>(extent / step));
    const double offset = (extent - (n - 1) * step) / 2.0;
    for (int i = 0; i < n; ++i) vals.push_back(origin + offset + i * step);
    return vals;
  };
  const auto xs = lattice(region.x, region.w);
  const auto ys = lattice(region.y, region.h);
  std::vector<Point2d> out;
  out.reserve(xs.size() * ys.size());
  for (double y : ys) {
    for (double x : xs) {
      if (x < margin || y < margin || x > img_w - 1 - margin || y > img_h - 1 - margin) {
        continue;
      }
      out.push_back({x, y});
    }
  }
  if (out.empty()) {
    out.push_back(region.center());
  }
  return out;
}

std::vector<FlowPoint> pyr_lk_track(const Image& prev, const Image& curr,
                                    const std::vector<Point2d>& pts, const LkParams& params) {
  if (!prev.same_size(curr)) throw std::invalid_argument("pyr_lk_track: dimension mismatch");
  if (params.win < 3 || params.win % 2 == 0) {
    throw std::invalid_argument("pyr_lk_track: window must be odd >= 3");
  }
  if (params.levels < 1) throw std::invalid_argument("pyr_lk_track: levels must be >= 1");

  const auto pyr_prev = build_pyramid(prev, params.levels, params.win);
  const auto pyr_curr = build_pyramid(curr, params.levels, params.win);
  const int half = params.win / 2;
  const int npix = params.win * params.win;

  std::vector<FlowPoint> out;
  out.reserve(pts.size());

  for (const Point2d& p : pts) {
    FlowPoint fp;
    fp.src = p;
    if (pyr_prev.empty()) {
      out.push_back(fp);
      continue;
    }

    double gx_acc = 0.0, gy_acc = 0.0;  // accumulated guess, coarse-to-fine
    bool ok = true;
    bool any_level = false;
    double dx = 0.0, dy = 0.0;

    for (int l = static_cast<int>(pyr_prev.size()) - 1; l >= 0; --l) {
      const Level& lp = pyr_prev[l];
      const Level& lc = pyr_curr[l];
      const double scale = 1.0 / static_cast<double>(1 << l);
      const double px = p.x * scale;
      const double py = p.y * scale;
      dx = 0.0;
      dy = 0.0;

      // gradient sampling needs one extra pixel around the window
      if (!window_inside(lp.img, px, py, half + 1)) {
        if (l == 0 && !any_level) ok = false;
        gx_acc *= (l > 0) ? 2.0 : 1.0;
        gy_acc *= (l > 0) ? 2.0 : 1.0;
        continue;
      }
      any_level = true;

      // spatial gradient matrix over the window
      double g11 = 0.0, g12 = 0.0, g22 = 0.0;
      for (int wy = -half; wy <= half; ++wy) {
        for (int wx = -half; wx <= half; ++wx) {
          const double ix = sample(lp.gx, px + wx, py + wy);
          const double iy = sample(lp.gy, px + wx, py + wy);
          g11 += ix * ix;
          g12 += ix * iy;
          g22 += iy * iy;
        }
      }
      const double tr = g11 + g22;
      const double det_term = std::sqrt((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12);
      const double min_eig = 0.5 * (tr - det_term) / npix;
      const double det = g11 * g22 - g12 * g12;
      if (min_eig < params.min_eig || det <= 0.0) {
        // the trackability gate applies at full resolution; a weak coarse
        // level only loses its guess refinement
        if (l == 0) {
          ok = false;
          break;
        }
        gx_acc *= 2.0;
        gy_acc *= 2.0;
        continue;
      }

      for (int it = 0; it < params.max_iter; ++it) {
        const double qx = px + gx_acc + dx;
        const double qy = py + gy_acc + dy;
        if (!window_inside(lc.img, qx, qy, half)) {
          ok = false;
          break;
        }
        double b1 = 0.0, b2 = 0.0;
        for (int wy = -half; wy <= half; ++wy) {
          for (int wx = -half; wx <= half; ++wx) {
            const double di = sample(lp.img, px + wx, py + wy) - sample(lc.img, qx + wx, qy + wy);
            b1 += di * sample(lp.gx, px + wx, py + wy);
            b2 += di * sample(lp.gy, px + wx, py + wy);
          }
        }
        const double nx = (g22 * b1 - g12 * b2) / det;
        const double ny = (g11 * b2 - g12 * b1) / det;
        dx += nx;
        dy += ny;
        if (std::hypot(dx, dy) > 2.0 * params.win) {  // diverged
          ok = false;
          break;
        }
        if (std::hypot(nx, ny) < params.eps) break;
      }
      if (!ok) break;
      if (l > 0) {
        gx_acc = 2.0 * (gx_acc + dx);
        gy_acc = 2.0 * (gy_acc + dy);
      }
    }

    if (ok && any_level) {
      fp.tracked = true;
      fp.dst = {p.x + gx_acc + dx, p.y + gy_acc + dy};
      // residual at the converged displacement, full resolution
      const Level& lp = pyr_prev[0];
      const Level& lc = pyr_curr[0];
      if (window_inside(lp.img, p.x, p.y, half) &&
          window_inside(lc.img, fp.dst.x, fp.dst.y, half)) {
        double acc = 0.0;
        for (int wy = -half; wy <= half; ++wy) {
          for (int wx = -half; wx <= half; ++wx) {
            acc += std::abs(sample(lp.img, p.x + wx, p.y + wy) -
                            sample(lc.img, fp.dst.x + wx, fp.dst.y + wy));
          }
        }
        fp.residual = 255.0 * acc / npix;
      }
    }
    out.push_back(fp);
  }
  return out;
}

}  // namespace glyomo
