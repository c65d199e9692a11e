#include "glyomo/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>

namespace glyomo {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline std::uint8_t to_u8(double v) {
  const long r = std::lround(v);
  return static_cast<std::uint8_t>(clampi(static_cast<int>(r), 0, 255));
}

void require_odd_ksize(int ksize) {
  if (ksize < 1 || ksize % 2 == 0) {
    throw std::invalid_argument("kernel size must be odd and >= 1");
  }
}

void require_binary(const Image& img) {
  for (std::uint8_t v : img.px) {
    if (v != 0 && v != 255) {
      throw std::invalid_argument("morphology requires a binary {0,255} image");
    }
  }
}

std::vector<double> gaussian_kernel(double sigma, int ksize) {
  require_odd_ksize(ksize);
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be > 0");
  std::vector<double> k(ksize);
  const int c = ksize / 2;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - c;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

// --- Homography3x3 ---

Homography3x3 Homography3x3::translation(double dx, double dy) {
  Homography3x3 h;
  h.m = {1, 0, dx, 0, 1, dy, 0, 0, 1};
  return h;
}

Homography3x3 operator*(const Homography3x3& a, const Homography3x3& b) {
  Homography3x3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out.m[3 * r + c] = a.m[3 * r] * b.m[c] + a.m[3 * r + 1] * b.m[3 + c] +
                         a.m[3 * r + 2] * b.m[6 + c];
    }
  }
  return out;
}

Point2d Homography3x3::apply(double x, double y) const {
  const double px = m[0] * x + m[1] * y + m[2];
  const double py = m[3] * x + m[4] * y + m[5];
  const double pz = m[6] * x + m[7] * y + m[8];
  return {px / pz, py / pz};
}

std::optional<Homography3x3> Homography3x3::inverse() const {
  const auto& a = m;
  const double c00 = a[4] * a[8] - a[5] * a[7];
  const double c01 = a[5] * a[6] - a[3] * a[8];
  const double c02 = a[3] * a[7] - a[4] * a[6];
  const double det = a[0] * c00 + a[1] * c01 + a[2] * c02;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * scale * scale * scale) {
    return std::nullopt;
  }
  Homography3x3 inv;
  inv.m[0] = c00 / det;
  inv.m[1] = (a[2] * a[7] - a[1] * a[8]) / det;
  inv.m[2] = (a[1] * a[5] - a[2] * a[4]) / det;
  inv.m[3] = c01 / det;
  inv.m[4] = (a[0] * a[8] - a[2] * a[6]) / det;
  inv.m[5] = (a[2] * a[3] - a[0] * a[5]) / det;
  inv.m[6] = c02 / det;
  inv.m[7] = (a[1] * a[6] - a[0] * a[7]) / det;
  inv.m[8] = (a[0] * a[4] - a[1] * a[3]) / det;
  return inv.normalized();
}

Homography3x3 Homography3x3::normalized() const {
  Homography3x3 out = *this;
  if (std::abs(m[8]) > 0.0) {
    for (double& v : out.m) v /= m[8];
  }
  return out;
}

bool Homography3x3::finite() const {
  for (double v : m) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// --- filters ---

ImageF gaussian_blur_f(const ImageF& img, double sigma, int ksize) {
  const auto k = gaussian_kernel(sigma, ksize);
  const int c = ksize / 2;
  const int w = img.width, h = img.height;
  ImageF tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < ksize; ++i) {
        acc += k[i] * img.at(clampi(x + i - c, 0, w - 1), y);
      }
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < ksize; ++i) {
        acc += k[i] * tmp.at(x, clampi(y + i - c, 0, h - 1));
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma, int ksize) {
  require_odd_ksize(ksize);
  if (ksize == 1) return img;
  ImageF f(img.width, img.height);
  for (std::size_t i = 0; i < img.px.size(); ++i) f.px[i] = img.px[i];
  const ImageF blurred = gaussian_blur_f(f, sigma, ksize);
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < out.px.size(); ++i) out.px[i] = to_u8(blurred.px[i]);
  return out;
}

Image median_filter(const Image& img, int ksize) {
  require_odd_ksize(ksize);
  if (ksize == 1) return img;
  const int w = img.width, h = img.height, c = ksize / 2;
  const int window = ksize * ksize;
  const int mid = window / 2;  // window is odd
  Image out(w, h);
  std::array<int, 256> hist{};
  for (int y = 0; y < h; ++y) {
    hist.fill(0);
    // seed histogram for x = 0
    for (int dy = -c; dy <= c; ++dy) {
      const int sy = clampi(y + dy, 0, h - 1);
      for (int dx = -c; dx <= c; ++dx) {
        ++hist[img.at(clampi(dx, 0, w - 1), sy)];
      }
    }
    for (int x = 0; x < w; ++x) {
      if (x > 0) {
        const int xr = clampi(x + c, 0, w - 1);
        const int xl = clampi(x - 1 - c, 0, w - 1);
        for (int dy = -c; dy <= c; ++dy) {
          const int sy = clampi(y + dy, 0, h - 1);
          ++hist[img.at(xr, sy)];
          --hist[img.at(xl, sy)];
        }
      }
      int cum = 0;
      for (int v = 0; v < 256; ++v) {
        cum += hist[v];
        if (cum > mid) {
          out.at(x, y) = static_cast<std::uint8_t>(v);
          break;
        }
      }
    }
  }
  return out;
}

namespace {

template <typename Cmp>
Image morph(const Image& img, int ksize, std::uint8_t init, Cmp better) {
  require_odd_ksize(ksize);
  require_binary(img);
  if (ksize == 1) return img;
  const int w = img.width, h = img.height, c = ksize / 2;
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = init;
      for (int dy = -c; dy <= c; ++dy) {
        const int sy = clampi(y + dy, 0, h - 1);
        for (int dx = -c; dx <= c; ++dx) {
          const std::uint8_t s = img.at(clampi(x + dx, 0, w - 1), sy);
          if (better(s, v)) v = s;
        }
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

}  // namespace

Image erode(const Image& img, int ksize) {
  return morph(img, ksize, 255, [](std::uint8_t s, std::uint8_t v) { return s < v; });
}

Image dilate(const Image& img, int ksize) {
  return morph(img, ksize, 0, [](std::uint8_t s, std::uint8_t v) { return s > v; });
}

// --- point ops ---

Image threshold_binary(const Image& img, int t) {
  if (t < 0 || t > 255) throw std::invalid_argument("threshold must be in [0,255]");
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    out.px[i] = img.px[i] > t ? 255 : 0;
  }
  return out;
}

Image abs_diff(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw std::invalid_argument("abs_diff: dimension mismatch");
  Image out(a.width, a.height);
  for (std::size_t i = 0; i < a.px.size(); ++i) {
    const int d = static_cast<int>(a.px[i]) - static_cast<int>(b.px[i]);
    out.px[i] = static_cast<std::uint8_t>(d < 0 ? -d : d);
  }
  return out;
}

int otsu_threshold(const Image& img, const Image* mask) {
  std::array<long long, 256> hist{};
  long long total = 0;
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    if (mask && mask->px[i] == 0) continue;
    ++hist[img.px[i]];
    ++total;
  }
  if (total == 0) return 0;
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];
  double sum_b = 0.0;
  long long w_b = 0;
  double best_var = -1.0;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    w_b += hist[t];
    if (w_b == 0) continue;
    const long long w_f = total - w_b;
    if (w_f == 0) break;
    sum_b += static_cast<double>(t) * hist[t];
    const double m_b = sum_b / w_b;
    const double m_f = (sum_all - sum_b) / w_f;
    const double between = static_cast<double>(w_b) * w_f * (m_b - m_f) * (m_b - m_f);
    if (between > best_var) {
      best_var = between;
      best_t = t;
    }
  }
  return best_t;
}

// --- geometric ---

Image warp_perspective(const Image& img, const Homography3x3& h, int out_w, int out_h,
                       Image* valid_mask) {
  const auto inv = h.inverse();
  if (!inv) throw std::runtime_error("warp_perspective: singular homography");
  Image out(out_w, out_h);
  if (valid_mask) *valid_mask = Image(out_w, out_h);
  const auto& a = inv->m;
  const int w = img.width, hh = img.height;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double pz = a[6] * x + a[7] * y + a[8];
      if (std::abs(pz) < 1e-12) continue;
      const double sx = (a[0] * x + a[1] * y + a[2]) / pz;
      const double sy = (a[3] * x + a[4] * y + a[5]) / pz;
      if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > hh - 1) continue;
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, hh - 1);
      const double fx = sx - x0, fy = sy - y0;
      const double v = (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x1, y0) +
                       (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1);
      out.at(x, y) = to_u8(v);
      if (valid_mask) valid_mask->at(x, y) = 255;
    }
  }
  return out;
}

Image crop(const Image& img, int x, int y, int w, int h) {
  if (w <= 0 || h <= 0 || x < 0 || y < 0 || x + w > img.width || y + h > img.height) {
    throw std::invalid_argument("crop: rect outside image");
  }
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    std::memcpy(&out.px[static_cast<std::size_t>(r) * w],
                &img.px[static_cast<std::size_t>(y + r) * img.width + x],
                static_cast<std::size_t>(w));
  }
  return out;
}

double sample_bilinear_clamped(const Image& img, double fx, double fy) {
  const double cx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
  const double cy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double ax = cx - x0, ay = cy - y0;
  return (1 - ax) * (1 - ay) * img.at(x0, y0) + ax * (1 - ay) * img.at(x1, y0) +
         (1 - ax) * ay * img.at(x0, y1) + ax * ay * img.at(x1, y1);
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw std::invalid_argument("resize: output dims must be > 0");
  Image out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const double fy = (y + 0.5) * sy - 0.5;
      out.at(x, y) = to_u8(sample_bilinear_clamped(img, fx, fy));
    }
  }
  return out;
}

double mean_intensity(const Image& img, const Image* mask) {
  double sum = 0.0;
  long long n = 0;
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    if (mask && mask->px[i] == 0) continue;
    sum += img.px[i];
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

Image add_offset_clamped(const Image& img, double offset) {
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    out.px[i] = to_u8(img.px[i] + offset);
  }
  return out;
}

// --- connected components ---

std::vector<ComponentStats> connected_components(const Image& img, int min_area) {
  require_binary(img);
  const int w = img.width, h = img.height;
  std::vector<std::uint8_t> visited(img.px.size(), 0);
  std::vector<ComponentStats> out;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (img.px[idx] == 0 || visited[idx]) continue;
      int minx = x, maxx = x, miny = y, maxy = y, area = 0;
      double sx = 0.0, sy = 0.0;
      visited[idx] = 1;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        ++area;
        sx += cx;
        sy += cy;
        minx = std::min(minx, cx);
        maxx = std::max(maxx, cx);
        miny = std::min(miny, cy);
        maxy = std::max(maxy, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (img.px[nidx] == 0 || visited[nidx]) continue;
            visited[nidx] = 1;
            queue.emplace_back(nx, ny);
          }
        }
      }
      if (area < min_area) continue;
      // centroid of pixel centers; bbox spans whole pixels
      out.push_back(ComponentStats{
          BBox(minx, miny, maxx - minx + 1, maxy - miny + 1),
          area,
          {sx / area + 0.5, sy / area + 0.5},
      });
    }
  }
  return out;
}

}  // namespace glyomo
