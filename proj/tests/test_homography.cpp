#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "glyomo/homography.hpp"
#include "glyomo/rng.hpp"

using namespace glyomo;

namespace {

std::vector<FlowPoint> make_pairs(const std::vector<Point2d>& src, const Homography3x3& h) {
  std::vector<FlowPoint> out;
  for (const auto& p : src) {
    FlowPoint fp;
    fp.src = p;
    fp.dst = h.apply(p.x, p.y);
    fp.tracked = true;
    out.push_back(fp);
  }
  return out;
}

std::vector<Point2d> lattice_points(int n_side, double spacing) {
  std::vector<Point2d> pts;
  for (int y = 0; y < n_side; ++y) {
    for (int x = 0; x < n_side; ++x) pts.push_back({x * spacing + 3.0, y * spacing + 3.0});
  }
  return pts;
}

Homography3x3 random_homography(Rng& rng) {
  Homography3x3 h;
  const double angle = rng.uniform(-0.15, 0.15);
  const double scale = rng.uniform(0.9, 1.1);
  h.m = {scale * std::cos(angle),
         -scale * std::sin(angle),
         rng.uniform(-15.0, 15.0),
         scale * std::sin(angle),
         scale * std::cos(angle),
         rng.uniform(-15.0, 15.0),
         rng.uniform(-1e-4, 1e-4),
         rng.uniform(-1e-4, 1e-4),
         1.0};
  return h;
}

double max_reprojection_error(const Homography3x3& h, const std::vector<FlowPoint>& pairs) {
  double worst = 0.0;
  for (const auto& fp : pairs) {
    if (!fp.tracked) continue;
    const Point2d p = h.apply(fp.src.x, fp.src.y);
    worst = std::max(worst, std::hypot(p.x - fp.dst.x, p.y - fp.dst.y));
  }
  return worst;
}

}  // namespace

TEST_CASE("identity correspondences recover the identity") {
  const auto pairs = make_pairs(lattice_points(5, 10.0), Homography3x3::identity());
  const auto est = estimate_homography(pairs, 200, 1.5, 7);
  REQUIRE(est.status == HomographyStatus::Ok);
  const Homography3x3 n = est.h.normalized();
  for (int i = 0; i < 9; ++i) {
    const double expect = (i % 4 == 0) ? 1.0 : 0.0;  // diagonal of the row-major 3x3
    CHECK(n.m[i] == doctest::Approx(expect).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("planted homography is recovered from exact pairs") {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const Homography3x3 h = random_homography(rng);
    const auto pairs = make_pairs(lattice_points(5, 12.0), h);  // 25 >= 20 points
    const auto est = estimate_homography(pairs, 200, 1.5, 7);
    REQUIRE(est.status == HomographyStatus::Ok);
    CHECK(max_reprojection_error(est.h, pairs) <= 1e-3);
  }
}

TEST_CASE("gross outliers are rejected") {
  Rng rng(66);
  const Homography3x3 h = random_homography(rng);
  std::vector<Point2d> src = lattice_points(5, 10.0);
  src.resize(20);
  auto pairs = make_pairs(src, h);
  // plant 5 gross outliers
  std::vector<std::size_t> outlier_idx;
  for (int k = 0; k < 5; ++k) {
    FlowPoint fp;
    fp.src = {rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0)};
    const Point2d good = h.apply(fp.src.x, fp.src.y);
    fp.dst = {good.x + rng.uniform(20.0, 40.0), good.y - rng.uniform(20.0, 40.0)};
    fp.tracked = true;
    outlier_idx.push_back(pairs.size());
    pairs.push_back(fp);
  }
  const auto est = estimate_homography(pairs, 200, 1.0, 7);
  REQUIRE(est.status == HomographyStatus::Ok);
  CHECK(est.inlier_count == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(est.inlier_mask[i] == 1);
  for (std::size_t i : outlier_idx) CHECK(est.inlier_mask[i] == 0);
}

TEST_CASE("fewer than 4 tracked pairs is degenerate") {
  auto pairs = make_pairs(lattice_points(5, 10.0), Homography3x3::identity());
  for (std::size_t i = 3; i < pairs.size(); ++i) pairs[i].tracked = false;
  CHECK(estimate_homography(pairs, 200, 1.5, 7).status ==
        HomographyStatus::DegenerateCorrespondences);
}

TEST_CASE("pure translation yields an affine perspective row") {
  const auto pairs = make_pairs(lattice_points(4, 9.0), Homography3x3::translation(4.5, -2.25));
  const auto est = estimate_homography(pairs, 200, 1.5, 7);
  REQUIRE(est.status == HomographyStatus::Ok);
  const Homography3x3 n = est.h.normalized();
  CHECK(std::abs(n.m[6]) < 1e-6);
  CHECK(std::abs(n.m[7]) < 1e-6);
  CHECK(n.m[8] == doctest::Approx(1.0));
  CHECK(n.m[2] == doctest::Approx(4.5).epsilon(1e-6));
  CHECK(n.m[5] == doctest::Approx(-2.25).epsilon(1e-6));
}

TEST_CASE("estimate is invariant under input permutation with exact inliers") {
  Rng rng(77);
  const Homography3x3 h = random_homography(rng);
  auto pairs = make_pairs(lattice_points(5, 11.0), h);
  const auto est_a = estimate_homography(pairs, 200, 1.5, 7);
  std::reverse(pairs.begin(), pairs.end());
  const auto est_b = estimate_homography(pairs, 200, 1.5, 7);
  REQUIRE(est_a.status == HomographyStatus::Ok);
  REQUIRE(est_b.status == HomographyStatus::Ok);
  // same transform within reprojection tolerance over the shared points
  for (const auto& fp : pairs) {
    const Point2d pa = est_a.h.apply(fp.src.x, fp.src.y);
    const Point2d pb = est_b.h.apply(fp.src.x, fp.src.y);
    CHECK(std::hypot(pa.x - pb.x, pa.y - pb.y) < 1e-6);
  }
}

TEST_CASE("estimate composed with the inverse is the identity on points") {
  Rng rng(88);
  const Homography3x3 h = random_homography(rng);
  const auto pts = lattice_points(5, 10.0);
  const auto pairs = make_pairs(pts, h);
  const auto est = estimate_homography(pairs, 200, 1.5, 7);
  REQUIRE(est.status == HomographyStatus::Ok);
  const auto inv = est.h.inverse();
  REQUIRE(inv.has_value());
  for (const auto& p : pts) {
    const Point2d fwd = est.h.apply(p.x, p.y);
    const Point2d back = inv->apply(fwd.x, fwd.y);
    CHECK(std::hypot(back.x - p.x, back.y - p.y) < 1e-6);
  }
}
