#include <doctest.h>

#include "glyomo/config.hpp"
#include "glyomo/rng.hpp"
#include "glyomo/types.hpp"

using namespace glyomo;

TEST_CASE("iou of identical boxes is exactly 1") {
  const BBox a(0, 0, 10, 10);
  CHECK(iou(a, a) == 1.0);
}

TEST_CASE("iou of disjoint boxes is 0") {
  CHECK(iou(BBox(0, 0, 5, 5), BBox(10, 10, 5, 5)) == 0.0);
}

TEST_CASE("iou hand-enumerated overlap") {
  // intersection 1x2 = 2, union 4 + 4 - 2 = 6
  CHECK(iou(BBox(0, 0, 2, 2), BBox(1, 0, 2, 2)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou symmetry and bounds over random boxes") {
  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    const BBox a(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.1, 40),
                 rng.uniform(0.1, 40));
    const BBox b(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.1, 40),
                 rng.uniform(0.1, 40));
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(iou(a, a) == 1.0);
  }
}

TEST_CASE("degenerate boxes are rejected at construction") {
  CHECK_THROWS_AS(BBox(0, 0, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(BBox(0, 0, 5, -1), std::invalid_argument);
}

TEST_CASE("box center uses real arithmetic") {
  const BBox b(1, 2, 3, 5);
  CHECK(b.center().x == doctest::Approx(2.5));
  CHECK(b.center().y == doctest::Approx(4.5));
}

TEST_CASE("detection score range is enforced") {
  CHECK_THROWS_AS(Detection(BBox(0, 0, 1, 1), 1.5, 0, DetectMode::GlobalYolo),
                  std::invalid_argument);
}

TEST_CASE("config defaults satisfy their invariants") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.k2 + cfg.k3 == doctest::Approx(1.0));

  PipelineConfig bad = cfg;
  bad.scales.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.r_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.roi_base = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
