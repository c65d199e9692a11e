#include "glyomo/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace glyomo {

EvalReport evaluate(const PredSet& preds, const GtSet& gts, double iou_threshold) {
  if (!(iou_threshold > 0.0) || iou_threshold > 1.0) {
    throw std::invalid_argument("evaluate: iou threshold must be in (0,1]");
  }
  EvalReport report;
  report.iou_threshold = iou_threshold;

  long long total_gt = 0;
  for (const auto& [frame, boxes] : gts) {
    (void)frame;
    total_gt += static_cast<long long>(boxes.size());
  }

  struct Ranked {
    double score;
    int frame;
    int pred_index;
    bool tp;
  };
  std::vector<Ranked> ranked;

  for (const auto& [frame, dets] : preds) {
    const auto git = gts.find(frame);
    const std::vector<GtBox>* frame_gt = git != gts.end() ? &git->second : nullptr;
    std::vector<std::uint8_t> gt_used(frame_gt ? frame_gt->size() : 0, 0);

    // detections in descending score order; stable on ties
    std::vector<int> order(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dets[a].score > dets[b].score; });

    for (int idx : order) {
      const Detection& det = dets[idx];
      int best_gt = -1;
      double best_iou = 0.0;
      if (frame_gt) {
        for (std::size_t g = 0; g < frame_gt->size(); ++g) {
          if (gt_used[g]) continue;
          if ((*frame_gt)[g].class_id != det.class_id) continue;
          const double v = iou(det.box, (*frame_gt)[g].box);
          if (v >= iou_threshold && v > best_iou) {
            best_iou = v;
            best_gt = static_cast<int>(g);
          }
        }
      }
      const bool tp = best_gt >= 0;
      if (tp) {
        gt_used[best_gt] = 1;
        ++report.tp;
      } else {
        ++report.fp;
      }
      report.matches.push_back(MatchRecord{frame, idx, best_gt, best_iou, det.score});
      ranked.push_back(Ranked{det.score, frame, idx, tp});
    }
  }
  report.fn = total_gt - report.tp;

  report.precision =
      (report.tp + report.fp) > 0 ? static_cast<double>(report.tp) / (report.tp + report.fp) : 0.0;
  report.recall = total_gt > 0 ? static_cast<double>(report.tp) / total_gt : 0.0;
  report.f1 = (report.precision + report.recall) > 0.0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;

  // pooled ranking: score descending, then frame, then in-frame order
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.pred_index < b.pred_index;
  });

  if (total_gt > 0 && !ranked.empty()) {
    std::vector<double> prec(ranked.size()), rec(ranked.size());
    long long cum_tp = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i].tp) ++cum_tp;
      prec[i] = static_cast<double>(cum_tp) / static_cast<double>(i + 1);
      rec[i] = static_cast<double>(cum_tp) / static_cast<double>(total_gt);
      report.pr_curve.emplace_back(rec[i], prec[i]);
    }
    // precision envelope, then area under it at every recall step
    for (int i = static_cast<int>(prec.size()) - 2; i >= 0; --i) {
      prec[i] = std::max(prec[i], prec[i + 1]);
    }
    double ap = 0.0;
    double prev_rec = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (rec[i] > prev_rec) {
        ap += (rec[i] - prev_rec) * prec[i];
        prev_rec = rec[i];
      }
    }
    report.ap = ap;
  }
  return report;
}

}  // namespace glyomo
