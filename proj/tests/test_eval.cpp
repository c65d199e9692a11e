#include <doctest.h>

#include <cmath>

#include "glyomo/eval.hpp"
#include "glyomo/rng.hpp"

using namespace glyomo;

namespace {

Detection pred(double x, double y, double w, double h, double score) {
  return Detection(BBox(x, y, w, h), score, 0, DetectMode::GlobalYolo);
}

// random prediction/ground-truth sets over a handful of frames
void random_sets(Rng& rng, PredSet& preds, GtSet& gts) {
  preds.clear();
  gts.clear();
  const int frames = 3 + static_cast<int>(rng.index(4));
  for (int f = 0; f < frames; ++f) {
    const int n_gt = static_cast<int>(rng.index(4));
    for (int g = 0; g < n_gt; ++g) {
      gts[f].push_back(GtBox{BBox(rng.uniform(0, 80), rng.uniform(0, 80), 5, 5), 0});
    }
    const int n_pred = static_cast<int>(rng.index(5));
    for (int p = 0; p < n_pred; ++p) {
      // half the predictions sit near some ground truth
      if (!gts[f].empty() && rng.next_double() < 0.5) {
        const auto& g = gts[f][rng.index(gts[f].size())].box;
        preds[f].push_back(
            pred(g.x + rng.uniform(-2, 2), g.y + rng.uniform(-2, 2), 5, 5, rng.next_double()));
      } else {
        preds[f].push_back(pred(rng.uniform(0, 80), rng.uniform(0, 80), 5, 5, rng.next_double()));
      }
    }
  }
}

}  // namespace

TEST_CASE("perfect predictions score 1 across the board") {
  GtSet gts;
  PredSet preds;
  for (int f = 0; f < 5; ++f) {
    const BBox box(10.0 + f, 20.0, 4, 4);
    gts[f].push_back(GtBox{box, 0});
    preds[f].push_back(pred(box.x, box.y, box.w, box.h, 0.9));
  }
  for (double t : {0.1, 0.5, 1.0}) {
    const EvalReport r = evaluate(preds, gts, t);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
    CHECK(r.ap == 1.0);
  }
}

TEST_CASE("no predictions: precision and AP degenerate to 0") {
  GtSet gts;
  gts[0].push_back(GtBox{BBox(1, 1, 4, 4), 0});
  const EvalReport r = evaluate({}, gts, 0.1);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK(r.ap == 0.0);
  CHECK(r.fn == 1);
}

TEST_CASE("hand case: one TP at 0.9, one FP at 0.8 over 2 ground truths") {
  GtSet gts;
  gts[0].push_back(GtBox{BBox(10, 10, 4, 4), 0});
  gts[1].push_back(GtBox{BBox(30, 30, 4, 4), 0});
  PredSet preds;
  preds[0].push_back(pred(10, 10, 4, 4, 0.9));   // exact hit
  preds[1].push_back(pred(60, 60, 4, 4, 0.8));   // miss
  const EvalReport r = evaluate(preds, gts, 0.1);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 0.5);
  CHECK(r.ap == 0.5);  // precision envelope 1.0 up to recall 0.5
}

TEST_CASE("AP is invariant under strictly monotone score transforms") {
  Rng rng(501);
  for (int trial = 0; trial < 100; ++trial) {
    PredSet preds;
    GtSet gts;
    random_sets(rng, preds, gts);
    const EvalReport base = evaluate(preds, gts, 0.1);

    PredSet transformed;
    for (const auto& [f, dets] : preds) {
      for (const auto& d : dets) {
        // x -> x^3 * 0.5 + 0.2, strictly increasing on [0,1]
        const double s = 0.2 + 0.5 * d.score * d.score * d.score;
        transformed[f].push_back(Detection(d.box, s, d.class_id, d.mode));
      }
    }
    const EvalReport after = evaluate(transformed, gts, 0.1);
    CHECK(after.ap == doctest::Approx(base.ap).epsilon(1e-12));
    CHECK(after.tp == base.tp);
    CHECK(after.fp == base.fp);
  }
}

TEST_CASE("appending a lowest-scored FP never increases AP") {
  Rng rng(502);
  for (int trial = 0; trial < 50; ++trial) {
    PredSet preds;
    GtSet gts;
    random_sets(rng, preds, gts);
    const EvalReport base = evaluate(preds, gts, 0.1);

    PredSet more = preds;
    more[0].push_back(pred(500, 500, 3, 3, 1e-6));  // guaranteed FP, lowest score
    const EvalReport after = evaluate(more, gts, 0.1);
    CHECK(after.ap <= base.ap + 1e-12);
    CHECK(after.precision <= base.precision + 1e-12);
  }
}

TEST_CASE("greedy matching picks the highest-overlap ground truth") {
  GtSet gts;
  gts[0].push_back(GtBox{BBox(0, 0, 10, 10), 0});
  gts[0].push_back(GtBox{BBox(6, 0, 10, 10), 0});
  PredSet preds;
  preds[0].push_back(pred(5.5, 0, 10, 10, 0.9));  // overlaps both, closer to the second
  const EvalReport r = evaluate(preds, gts, 0.1);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].gt_index == 1);
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
}

TEST_CASE("each ground truth is claimed at most once") {
  GtSet gts;
  gts[0].push_back(GtBox{BBox(10, 10, 6, 6), 0});
  PredSet preds;
  preds[0].push_back(pred(10, 10, 6, 6, 0.9));
  preds[0].push_back(pred(11, 11, 6, 6, 0.8));  // overlaps the same gt: FP
  const EvalReport r = evaluate(preds, gts, 0.1);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
}

TEST_CASE("class mismatch prevents matching") {
  GtSet gts;
  gts[0].push_back(GtBox{BBox(10, 10, 6, 6), 1});
  PredSet preds;
  preds[0].push_back(pred(10, 10, 6, 6, 0.9));  // class 0
  const EvalReport r = evaluate(preds, gts, 0.1);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
}

TEST_CASE("iou threshold bounds are validated") {
  CHECK_THROWS_AS(evaluate({}, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evaluate({}, {}, 1.5), std::invalid_argument);
}

TEST_CASE("self-evaluation is perfect at any threshold") {
  Rng rng(503);
  PredSet preds;
  GtSet gts;
  for (int f = 0; f < 4; ++f) {
    for (int i = 0; i < 3; ++i) {
      const BBox b(rng.uniform(0, 60), rng.uniform(0, 60), 4, 4);
      preds[f].push_back(pred(b.x, b.y, b.w, b.h, rng.next_double()));
      gts[f].push_back(GtBox{b, 0});
    }
  }
  const EvalReport r = evaluate(preds, gts, 1.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.ap == 1.0);
}
