#include "glyomo/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace glyomo {

namespace {

BBox full_frame_box(const Frame& frame) {
  return BBox(0.0, 0.0, frame.width(), frame.height());
}

// Shifts a box inside the frame, preserving size where possible.
BBox clamp_box_to_frame(const BBox& b, int fw, int fh) {
  const double w = std::min(b.w, static_cast<double>(fw));
  const double h = std::min(b.h, static_cast<double>(fh));
  const double x = std::clamp(b.x, 0.0, fw - w);
  const double y = std::clamp(b.y, 0.0, fh - h);
  return BBox(x, y, w, h);
}

}  // namespace

GlYomoPipeline::GlYomoPipeline(std::shared_ptr<Detector> detector, PipelineConfig cfg)
    : detector_(std::move(detector)), cfg_(std::move(cfg)) {
  if (!detector_) throw std::invalid_argument("pipeline: detector is required");
  cfg_.validate();
}

std::optional<BBox> GlYomoPipeline::current_roi(int frame_w, int frame_h) const {
  if (!state_.roi_center) return std::nullopt;
  const double side =
      std::min({state_.roi_side, static_cast<double>(frame_w), static_cast<double>(frame_h)});
  if (!(side > 0.0)) return std::nullopt;
  const double x = std::clamp(state_.roi_center->x - side / 2.0, 0.0, frame_w - side);
  const double y = std::clamp(state_.roi_center->y - side / 2.0, 0.0, frame_h - side);
  return BBox(x, y, side, side);
}

void GlYomoPipeline::apply_observation(const Detection& det) {
  if (state_.kf) {
    auto updated = kf_update(*state_.kf, det.box);
    if (updated) {
      state_.kf = *updated;
    } else {
      state_.kf = kf_init(det, cfg_);  // diverged: restart the filter
    }
  } else {
    state_.kf = kf_init(det, cfg_);
  }
}

std::optional<Detection> GlYomoPipeline::yomo_step(const Frame& frame) {
  const bool local = state_.mode == Mode::Local && state_.roi_center.has_value();
  const BBox region =
      local ? *current_roi(frame.width(), frame.height()) : full_frame_box(frame);
  const DetectContext ctx = local ? DetectContext::Local : DetectContext::Global;

  // one time update per frame; the filter then holds the prior for t
  if (state_.kf) state_.kf = kf_predict(*state_.kf);

  const DetectorOutput out = detector_->detect(frame, region, ctx);
  const Detection* best = nullptr;
  for (const Detection& d : out.detections) {
    if (!best || d.score > best->score) best = &d;
  }

  const double tau = local ? cfg_.tau_l : cfg_.tau_g;
  if (best && best->score > tau) {
    const BBox box(best->box.x + region.x, best->box.y + region.y, best->box.w, best->box.h);
    const Detection det(box, best->score, best->class_id,
                        local ? DetectMode::LocalYolo : DetectMode::GlobalYolo);
    apply_observation(det);
    state_.history.observe(frame.index, det.box, frame.gray, /*update_template=*/true);
    state_.track_confirmed = true;
    state_.track_class = det.class_id;
    return det;
  }

  // Below-threshold boxes seed the track tentatively before the first
  // confident detection, so the motion detector has a template and anchor
  // to work from; they are neither emitted nor counted.
  if (best && !state_.track_confirmed) {
    const BBox box(best->box.x + region.x, best->box.y + region.y, best->box.w, best->box.h);
    const Detection seed(box, best->score, best->class_id,
                         local ? DetectMode::LocalYolo : DetectMode::GlobalYolo);
    apply_observation(seed);
    state_.history.observe(frame.index, seed.box, frame.gray, /*update_template=*/true);
    state_.track_class = seed.class_id;
  }

  if (!state_.history.has_template() || state_.prev_frames.size() < 2) {
    return std::nullopt;  // cold start: no template or no F_{t-2} yet
  }

  const BBox anchor = *state_.history.anchor_box();
  ExtractionDebug debug;
  const auto cands = extract_candidates(*state_.prev_frames.front(), frame, anchor, cfg_,
                                        debug_cb_ ? &debug : nullptr);
  if (debug_cb_) debug_cb_(frame.index, debug);

  const double norm_w = local ? region.w : frame.width();
  const double norm_h = local ? region.h : frame.height();
  const auto match = match_candidates(state_.history, cands, frame.gray, norm_w, norm_h, cfg_);
  if (!match) return std::nullopt;

  const DetectMode mmode = local ? DetectMode::LocalMotion : DetectMode::GlobalMotion;
  const double score = std::clamp(match->score.c_w, 0.0, 1.0);

  if (!state_.kf) {
    const Detection det(match->candidate.bbox, score, state_.track_class, mmode);
    apply_observation(det);
    state_.history.observe(frame.index, det.box, frame.gray, /*update_template=*/true);
    state_.track_confirmed = true;
    return det;
  }

  if (verify_match(*state_.kf, match->candidate.bbox) == MatchVerdict::ConfirmMatch) {
    const Detection det(match->candidate.bbox, score, state_.track_class, mmode);
    apply_observation(det);
    state_.history.observe(frame.index, det.box, frame.gray, /*update_template=*/true);
    state_.track_confirmed = true;
    return det;
  }

  // mismatch against the filter: emit the prediction, keep the prior
  const BBox pb = clamp_box_to_frame(predicted_box(*state_.kf), frame.width(), frame.height());
  const Detection det(pb, score, state_.track_class, mmode);
  state_.history.observe(frame.index, det.box, frame.gray, /*update_template=*/false);
  return det;
}

void GlYomoPipeline::handle_hit(const Detection& det, const Frame& frame) {
  if (state_.mode == Mode::Global) {
    state_.roi_seed = det.box.center();
    state_.n_g_count += 1;
    state_.n_l_count = 0;
    if (state_.n_g_count >= cfg_.n_g) {
      state_.mode = Mode::Local;
      state_.roi_center = det.box.center();
      state_.roi_side = cfg_.roi_base;
      state_.f_lost = 0;
    }
    return;
  }

  // local hit: the ROI stays put while the target remains well inside it
  state_.n_l_count = 0;
  const auto roi = current_roi(frame.width(), frame.height());
  const Point2d c = det.box.center();
  if (roi) {
    const Point2d rc = roi->center();
    const double band = cfg_.r_s * (roi->w / 2.0);
    if (std::max(std::abs(c.x - rc.x), std::abs(c.y - rc.y)) > band) {
      state_.roi_center = c;
    }
  } else {
    state_.roi_center = c;
  }
  state_.f_lost = 0;
  state_.roi_side = cfg_.roi_base;
}

void GlYomoPipeline::handle_miss() {
  if (state_.mode == Mode::Global) {
    state_.n_g_count = 0;
    return;
  }
  state_.n_l_count += 1;
  state_.f_lost += 1;
  state_.roi_side = cfg_.roi_base + cfg_.k1 * state_.f_lost;
  if (state_.n_l_count >= cfg_.n_l) {
    state_.mode = Mode::Global;
    state_.n_g_count = 0;
    state_.roi_center.reset();
    state_.roi_side = 0.0;
    state_.f_lost = 0;
    state_.track_confirmed = false;  // allow re-seeding during reacquisition
  }
}

std::optional<Detection> GlYomoPipeline::step(Frame frame) {
  if (state_.last_frame_index >= 0 && frame.index != state_.last_frame_index + 1) {
    throw std::invalid_argument("pipeline: frames must arrive in index order");
  }

  const auto emission = yomo_step(frame);

  if (emission) {
    handle_hit(*emission, frame);
  } else {
    handle_miss();
  }

  state_.prev_frames.push_back(std::make_shared<const Frame>(std::move(frame)));
  while (state_.prev_frames.size() > 2) state_.prev_frames.pop_front();
  state_.last_frame_index = state_.prev_frames.back()->index;

  return emission;
}

}  // namespace glyomo
