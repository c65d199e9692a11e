#include "glyomo/synth.hpp"

#include <algorithm>
#include <cmath>

#include "glyomo/rng.hpp"

namespace glyomo {

namespace {

struct Canvas {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  float at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }

  double sample(double fx, double fy) const {
    const double cx = std::clamp(fx, 0.0, width - 1.0);
    const double cy = std::clamp(fy, 0.0, height - 1.0);
    const int x0 = static_cast<int>(cx), y0 = static_cast<int>(cy);
    const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
    const double ax = cx - x0, ay = cy - y0;
    return (1 - ax) * (1 - ay) * at(x0, y0) + ax * (1 - ay) * at(x1, y0) +
           (1 - ax) * ay * at(x0, y1) + ax * ay * at(x1, y1);
  }
};

// Bilinearly upsampled lattice of random values: smooth texture with
// gradients everywhere, cheap to evaluate.
void add_value_noise(Canvas& canvas, Rng& rng, double cell, double amplitude) {
  const int gw = static_cast<int>(canvas.width / cell) + 2;
  const int gh = static_cast<int>(canvas.height / cell) + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (double& v : lattice) v = rng.uniform(-1.0, 1.0);
  for (int y = 0; y < canvas.height; ++y) {
    const double gy = y / cell;
    const int y0 = static_cast<int>(gy);
    const double ay = gy - y0;
    for (int x = 0; x < canvas.width; ++x) {
      const double gx = x / cell;
      const int x0 = static_cast<int>(gx);
      const double ax = gx - x0;
      const double v00 = lattice[static_cast<std::size_t>(y0) * gw + x0];
      const double v10 = lattice[static_cast<std::size_t>(y0) * gw + x0 + 1];
      const double v01 = lattice[static_cast<std::size_t>(y0 + 1) * gw + x0];
      const double v11 = lattice[static_cast<std::size_t>(y0 + 1) * gw + x0 + 1];
      const double v = (1 - ax) * (1 - ay) * v00 + ax * (1 - ay) * v10 + (1 - ax) * ay * v01 +
                       ax * ay * v11;
      canvas.at(x, y) += static_cast<float>(amplitude * v);
    }
  }
}

// coverage of pixel [px, px+1) by interval [lo, hi)
double overlap_1d(double px, double lo, double hi) {
  return std::max(0.0, std::min(hi, px + 1.0) - std::max(lo, px));
}

void render_rect(Canvas& canvas, double cx, double cy, double w, double h, double delta) {
  const double x0 = cx - w / 2.0, x1 = cx + w / 2.0;
  const double y0 = cy - h / 2.0, y1 = cy + h / 2.0;
  const int px0 = std::max(0, static_cast<int>(std::floor(x0)));
  const int px1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(x1)));
  const int py0 = std::max(0, static_cast<int>(std::floor(y0)));
  const int py1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(y1)));
  for (int y = py0; y <= py1; ++y) {
    const double covy = overlap_1d(y, y0, y1);
    if (covy <= 0.0) continue;
    for (int x = px0; x <= px1; ++x) {
      const double cov = covy * overlap_1d(x, x0, x1);
      if (cov <= 0.0) continue;
      canvas.at(x, y) += static_cast<float>(delta * cov);
    }
  }
}

BBox tight_box(double cx, double cy, double w, double h) {
  const double x0 = cx - w / 2.0, x1 = cx + w / 2.0;
  const double y0 = cy - h / 2.0, y1 = cy + h / 2.0;
  const double bx0 = std::floor(x0);
  const double by0 = std::floor(y0);
  const double bx1 = std::ceil(x1);
  const double by1 = std::ceil(y1);
  return BBox(bx0, by0, std::max(1.0, bx1 - bx0), std::max(1.0, by1 - by0));
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0 || frame_count <= 0) {
    throw std::invalid_argument("scene: dimensions and frame count must be > 0");
  }
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("scene: noise_sigma must be >= 0");
  if (has_target) {
    if (!(target_w >= 1.0) || !(target_h >= 1.0)) {
      throw std::invalid_argument("scene: target must be at least 1x1 px");
    }
    for (int t = 0; t < frame_count; ++t) {
      const double cx = target_x0 + t * target_vx;
      const double cy = target_y0 + t * target_vy;
      if (cx - target_w / 2.0 < 1.0 || cy - target_h / 2.0 < 1.0 ||
          cx + target_w / 2.0 > width - 1.0 || cy + target_h / 2.0 > height - 1.0) {
        throw std::invalid_argument("scene: target path leaves the frame at frame " +
                                    std::to_string(t));
      }
    }
  }
}

GeneratedScene generate(const SceneSpec& spec) {
  spec.validate();

  // the canvas covers every camera offset the pan will visit
  const double total_dx = spec.pan_dx * (spec.frame_count - 1);
  const double total_dy = spec.pan_dy * (spec.frame_count - 1);
  const int pad = 2;
  const int cw = spec.width + static_cast<int>(std::ceil(std::abs(total_dx))) + 2 * pad;
  const int ch = spec.height + static_cast<int>(std::ceil(std::abs(total_dy))) + 2 * pad;
  const double ox0 = pad + std::max(0.0, -total_dx);
  const double oy0 = pad + std::max(0.0, -total_dy);

  Canvas canvas;
  canvas.width = cw;
  canvas.height = ch;
  canvas.px.assign(static_cast<std::size_t>(cw) * ch, 0.0f);

  // the fine octave keeps window gradients above the flow trackability
  // gate, so alignment locks to the background rather than the target
  Rng bg_rng(mix_seed(spec.seed, 0xB06));
  switch (spec.background) {
    case BackgroundKind::NoiseTexture:
      for (auto& v : canvas.px) v = 128.0f;
      add_value_noise(canvas, bg_rng, 32.0, 40.0);
      add_value_noise(canvas, bg_rng, 8.0, 18.0);
      add_value_noise(canvas, bg_rng, 4.0, 22.0);
      break;
    case BackgroundKind::GradientSky:
      for (int y = 0; y < ch; ++y) {
        const float v = 180.0f - 80.0f * static_cast<float>(y) / ch;
        for (int x = 0; x < cw; ++x) canvas.at(x, y) = v;
      }
      break;
    case BackgroundKind::Composite:
      for (int y = 0; y < ch; ++y) {
        const float v = 170.0f - 60.0f * static_cast<float>(y) / ch;
        for (int x = 0; x < cw; ++x) canvas.at(x, y) = v;
      }
      add_value_noise(canvas, bg_rng, 24.0, 26.0);
      add_value_noise(canvas, bg_rng, 7.0, 12.0);
      add_value_noise(canvas, bg_rng, 4.0, 20.0);
      break;
  }

  // static distractor blobs, kept clear of the target's swept path
  if (spec.distractor_count > 0) {
    Rng drng(mix_seed(spec.seed, 0xD15));
    constexpr double kClearance = 12.0;
    for (int i = 0; i < spec.distractor_count; ++i) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double dx = drng.uniform(4.0, cw - 4.0);
        const double dy = drng.uniform(4.0, ch - 4.0);
        const double size = drng.uniform(spec.distractor_min_size, spec.distractor_max_size);
        const double delta = drng.uniform(30.0, 70.0) * (drng.next_double() < 0.5 ? -1.0 : 1.0);
        bool clear = true;
        if (spec.has_target) {
          for (int t = 0; t < spec.frame_count && clear; ++t) {
            const double tx = spec.target_x0 + t * spec.target_vx + ox0 + t * spec.pan_dx;
            const double ty = spec.target_y0 + t * spec.target_vy + oy0 + t * spec.pan_dy;
            if (std::abs(tx - dx) < kClearance + size && std::abs(ty - dy) < kClearance + size) {
              clear = false;
            }
          }
        }
        if (clear) {
          render_rect(canvas, dx, dy, size, size, delta);
          break;
        }
      }
    }
  }

  GeneratedScene scene;
  scene.frames.reserve(spec.frame_count);
  if (spec.has_target) scene.ground_truth.reserve(spec.frame_count);

  for (int t = 0; t < spec.frame_count; ++t) {
    const double ox = ox0 + t * spec.pan_dx;
    const double oy = oy0 + t * spec.pan_dy;

    Frame frame;
    frame.index = t;
    frame.gray = Image(spec.width, spec.height);

    const double tcx = spec.has_target ? spec.target_x0 + t * spec.target_vx : 0.0;
    const double tcy = spec.has_target ? spec.target_y0 + t * spec.target_vy : 0.0;
    const double tx0 = tcx - spec.target_w / 2.0, tx1 = tcx + spec.target_w / 2.0;
    const double ty0 = tcy - spec.target_h / 2.0, ty1 = tcy + spec.target_h / 2.0;

    Rng noise_rng(mix_seed(spec.seed, 0xF00 + static_cast<std::uint64_t>(t)));
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        double v = canvas.sample(x + ox, y + oy);
        if (spec.has_target) {
          const double cov = overlap_1d(x, tx0, tx1) * overlap_1d(y, ty0, ty1);
          if (cov > 0.0) v += spec.target_contrast * cov;
        }
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise_rng.normal();
        frame.gray.at(x, y) =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
    scene.frames.push_back(std::move(frame));
    if (spec.has_target) {
      scene.ground_truth.push_back(tight_box(tcx, tcy, spec.target_w, spec.target_h));
    }
  }
  return scene;
}

}  // namespace glyomo
