#pragma once

#include <array>
#include <optional>

#include "glyomo/types.hpp"

namespace glyomo {

/// 3x3 projective transform, row-major. h33 is normalized to 1 when nonzero.
struct Homography3x3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography3x3 identity() { return {}; }
  static Homography3x3 translation(double dx, double dy);

  /// Matrix product: (a * b).apply(p) == a.apply(b.apply(p)).
  friend Homography3x3 operator*(const Homography3x3& a, const Homography3x3& b);

  Point2d apply(double x, double y) const;
  std::optional<Homography3x3> inverse() const;
  Homography3x3 normalized() const;   // divides by h33 when |h33| > 0
  bool finite() const;
};

// --- filters (all preserve dimensions; borders replicate) ---

/// Separable Gaussian convolution. ksize must be odd >= 1; ksize = 1 is identity.
Image gaussian_blur(const Image& img, double sigma, int ksize);

/// Float-space variant, used internally and by precision checks.
ImageF gaussian_blur_f(const ImageF& img, double sigma, int ksize);

/// Sliding-window median with a 256-bin histogram. ksize must be odd >= 1.
Image median_filter(const Image& img, int ksize);

// --- binary morphology (inputs must hold only {0, 255}) ---

Image erode(const Image& img, int ksize);
Image dilate(const Image& img, int ksize);

// --- point ops ---

/// pixel > t -> 255 else 0.
Image threshold_binary(const Image& img, int t);

/// Per-pixel |a - b|; dimensions must match.
Image abs_diff(const Image& a, const Image& b);

/// Otsu's threshold over the (optionally masked) intensity histogram.
/// mask, when given, selects contributing pixels (nonzero = included).
int otsu_threshold(const Image& img, const Image* mask = nullptr);

// --- geometric ---

/// Inverse-mapped bilinear warp; samples falling outside the source are 0.
/// valid_mask, when non-null, receives 255 where the source was sampled.
/// Throws std::runtime_error when h is not invertible.
Image warp_perspective(const Image& img, const Homography3x3& h, int out_w, int out_h,
                       Image* valid_mask = nullptr);

/// Integer-rect crop; the rect must lie fully inside the image.
Image crop(const Image& img, int x, int y, int w, int h);

Image resize_bilinear(const Image& img, int out_w, int out_h);

/// Bilinear sample with clamp-to-edge coordinates.
double sample_bilinear_clamped(const Image& img, double fx, double fy);

double mean_intensity(const Image& img, const Image* mask = nullptr);

/// Adds a constant offset to every pixel, clamping to [0,255].
Image add_offset_clamped(const Image& img, double offset);

// --- connected components ---

struct ComponentStats {
  BBox bbox;
  int area;          // foreground pixel count
  Point2d centroid;  // mean of member pixel centers
};

/// 8-connectivity labeling of a binary image. Components with area below
/// min_area are dropped; results are ordered by first pixel in scan order.
std::vector<ComponentStats> connected_components(const Image& img, int min_area);

}  // namespace glyomo
