#pragma once

#include <cstdint>

#include "glyomo/types.hpp"

namespace glyomo {

enum class BackgroundKind { NoiseTexture, GradientSky, Composite };

/// Parameters of a synthetic tiny-target sequence: a textured background
/// panned by a per-frame camera translation, a sub-pixel anti-aliased
/// moving target, optional static distractor blobs, and per-frame sensor
/// noise. Everything is deterministic given the seed.
struct SceneSpec {
  int width = 1280;
  int height = 720;
  int frame_count = 300;
  BackgroundKind background = BackgroundKind::Composite;

  // camera path: translation per frame, in pixels
  double pan_dx = 1.0;
  double pan_dy = 0.0;

  // target path: linear, in frame coordinates
  double target_x0 = 152.0;  // initial center
  double target_y0 = 200.0;
  double target_vx = 2.0;    // pixels per frame
  double target_vy = 0.5;
  double target_w = 4.0;
  double target_h = 3.0;
  double target_contrast = 60.0;  // added intensity
  bool has_target = true;

  double noise_sigma = 4.0;

  int distractor_count = 6;
  double distractor_min_size = 2.0;
  double distractor_max_size = 6.0;

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument when the target path leaves the frame
  /// (a margin of 1 px is required on every side).
  void validate() const;
};

struct GeneratedScene {
  std::vector<Frame> frames;
  std::vector<BBox> ground_truth;  // tight integer box per frame (target scenes)
};

GeneratedScene generate(const SceneSpec& spec);

}  // namespace glyomo
