#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace glyomo {

struct Point2d {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in pixel coordinates, real-valued. Width and height
/// must be strictly positive; degenerate boxes are rejected at construction.
struct BBox {
  double x;
  double y;
  double w;
  double h;

  BBox(double x_, double y_, double w_, double h_) : x(x_), y(y_), w(w_), h(h_) {
    if (!(w > 0.0) || !(h > 0.0)) {
      throw std::invalid_argument("BBox: width and height must be > 0");
    }
  }

  Point2d center() const { return {x + w / 2.0, y + h / 2.0}; }
  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
};

/// Intersection-over-union of two boxes. 0 when disjoint, 1 when identical.
double iou(const BBox& a, const BBox& b);

enum class DetectMode {
  GlobalYolo,
  GlobalMotion,
  LocalYolo,
  LocalMotion,
};

const char* mode_name(DetectMode m);
DetectMode mode_from_name(const std::string& name);

struct Detection {
  BBox box;
  double score;    // in [0,1]
  int class_id;
  DetectMode mode;

  Detection(BBox b, double s, int cls, DetectMode m)
      : box(b), score(s), class_id(cls), mode(m) {
    if (score < 0.0 || score > 1.0) {
      throw std::invalid_argument("Detection: score must be in [0,1]");
    }
  }
};

/// Row-major 8-bit grayscale raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> px;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("Image: negative dimensions");
  }

  bool empty() const { return px.empty(); }
  std::uint8_t at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  bool same_size(const Image& o) const { return width == o.width && height == o.height; }
};

/// Float raster used for intermediate filter and flow computations.
struct ImageF {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  ImageF() = default;
  ImageF(int w, int h, float fill = 0.0f)
      : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
};

/// One unit of pipeline input: a timestamped grayscale raster.
struct Frame {
  int index = 0;
  Image gray;

  int width() const { return gray.width; }
  int height() const { return gray.height; }
};

}  // namespace glyomo
