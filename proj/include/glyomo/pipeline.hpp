#pragma once

#include <deque>
#include <functional>
#include <memory>

#include "glyomo/config.hpp"
#include "glyomo/detectors.hpp"
#include "glyomo/kalman.hpp"
#include "glyomo/motion_extraction.hpp"
#include "glyomo/template_match.hpp"
#include "glyomo/types.hpp"

namespace glyomo {

enum class Mode { Global, Local };

/// Controller bookkeeping: detection mode, switch counters, ROI geometry,
/// track memory, and the frame history window.
struct ControllerState {
  Mode mode = Mode::Global;
  int n_g_count = 0;  // consecutive global hits
  int n_l_count = 0;  // consecutive local misses
  int f_lost = 0;     // consecutive lost frames driving ROI growth
  std::optional<Point2d> roi_center;
  double roi_side = 0.0;  // roi_base + k1 * f_lost while local; clamped on use
  std::optional<Point2d> roi_seed;  // last global hit center, seeds the ROI on switch
  TrackHistory history;
  std::optional<KalmanState> kf;
  bool track_confirmed = false;
  std::deque<std::shared_ptr<const Frame>> prev_frames;  // [t-2, t-1]
  int last_frame_index = -1;
  int track_class = 0;
};

/// Single-target detection pipeline: an appearance detector gated by a
/// confidence threshold, with a motion-detection fallback (aligned frame
/// differencing + template matching + filter verification), wrapped in the
/// global/local switching controller. Frames must arrive in index order.
class GlYomoPipeline {
 public:
  GlYomoPipeline(std::shared_ptr<Detector> detector, PipelineConfig cfg);

  /// Processes one frame; at most one detection is emitted per frame.
  std::optional<Detection> step(Frame frame);

  const ControllerState& state() const { return state_; }
  const PipelineConfig& config() const { return cfg_; }

  /// The ROI crop the local detector would use, clamped inside the frame.
  std::optional<BBox> current_roi(int frame_w, int frame_h) const;

  /// Receives motion-extraction intermediates for every frame on which the
  /// motion path ran.
  void set_debug_callback(std::function<void(int frame_index, const ExtractionDebug&)> cb) {
    debug_cb_ = std::move(cb);
  }

 private:
  std::optional<Detection> yomo_step(const Frame& frame);
  void apply_observation(const Detection& det);
  void handle_hit(const Detection& det, const Frame& frame);
  void handle_miss();

  std::shared_ptr<Detector> detector_;
  PipelineConfig cfg_;
  ControllerState state_;
  std::function<void(int, const ExtractionDebug&)> debug_cb_;
};

}  // namespace glyomo
