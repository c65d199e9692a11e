#pragma once

#include <map>

#include "glyomo/types.hpp"

namespace glyomo {

struct GtBox {
  BBox box;
  int class_id = 0;
};

using PredSet = std::map<int, std::vector<Detection>>;  // frame index -> detections
using GtSet = std::map<int, std::vector<GtBox>>;        // frame index -> ground truth

struct MatchRecord {
  int frame;
  int pred_index;  // position within the frame's detection list
  int gt_index;    // matched ground-truth index, -1 for a false positive
  double iou;
  double score;
};

struct EvalReport {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap = 0.0;
  double iou_threshold = 0.0;
  std::vector<MatchRecord> matches;
  // score-ranked precision/recall points, for PR-curve output
  std::vector<std::pair<double, double>> pr_curve;  // (recall, precision)
};

/// Greedy per-frame matching at the given IOU threshold: detections are
/// taken in descending score order, each claiming the unmatched ground
/// truth with the highest overlap. AP is the area under the precision
/// envelope of the pooled score-ranked detection list.
EvalReport evaluate(const PredSet& preds, const GtSet& gts, double iou_threshold);

}  // namespace glyomo
