#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyomo/imgproc.hpp"
#include "glyomo/rng.hpp"

using namespace glyomo;

namespace {

Image random_image(int w, int h, Rng& rng) {
  Image img(w, h);
  for (auto& p : img.px) p = static_cast<std::uint8_t>(rng.index(256));
  return img;
}

Image random_binary(int w, int h, Rng& rng, double fg_prob = 0.4) {
  Image img(w, h);
  for (auto& p : img.px) p = rng.next_double() < fg_prob ? 255 : 0;
  return img;
}

// brute-force per-pixel window sort, the independent median oracle
Image median_oracle(const Image& img, int ksize) {
  const int c = ksize / 2;
  Image out(img.width, img.height);
  std::vector<std::uint8_t> window;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      window.clear();
      for (int dy = -c; dy <= c; ++dy) {
        for (int dx = -c; dx <= c; ++dx) {
          const int sx = std::clamp(x + dx, 0, img.width - 1);
          const int sy = std::clamp(y + dy, 0, img.height - 1);
          window.push_back(img.at(sx, sy));
        }
      }
      std::sort(window.begin(), window.end());
      out.at(x, y) = window[window.size() / 2];
    }
  }
  return out;
}

// dense 2D Gaussian convolution in double precision
ImageF gaussian_oracle(const ImageF& img, double sigma, int ksize) {
  const int c = ksize / 2;
  std::vector<double> k(ksize);
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - c;
    k[i] = std::exp(-d * d / (2 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  ImageF out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int dy = -c; dy <= c; ++dy) {
        for (int dx = -c; dx <= c; ++dx) {
          const int sx = std::clamp(x + dx, 0, img.width - 1);
          const int sy = std::clamp(y + dy, 0, img.height - 1);
          acc += k[dx + c] * k[dy + c] * img.at(sx, sy);
        }
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("gaussian blur of a constant image is the same constant") {
  const Image img(16, 12, 77);
  const Image out = gaussian_blur(img, 2.0, 7);
  CHECK(out.px == img.px);
}

TEST_CASE("gaussian blur with ksize 1 is the identity") {
  Rng rng(1);
  const Image img = random_image(9, 9, rng);
  CHECK(gaussian_blur(img, 1.0, 1).px == img.px);
}

TEST_CASE("gaussian impulse response matches the kernel") {
  ImageF img(11, 11, 0.0f);
  img.at(5, 5) = 255.0f;
  const ImageF out = gaussian_blur_f(img, 1.0, 5);
  // center weight of the normalized 2D kernel
  double k[5], sum = 0;
  for (int i = 0; i < 5; ++i) {
    k[i] = std::exp(-(i - 2.0) * (i - 2.0) / 2.0);
    sum += k[i];
  }
  const double center = (k[2] / sum) * (k[2] / sum) * 255.0;
  CHECK(out.at(5, 5) == doctest::Approx(center).epsilon(1e-6));
}

TEST_CASE("gaussian blur agrees with the dense 2D oracle") {
  Rng rng(7);
  ImageF img(14, 10);
  for (auto& p : img.px) p = static_cast<float>(rng.uniform(0, 255));
  const ImageF fast = gaussian_blur_f(img, 1.3, 5);
  const ImageF slow = gaussian_oracle(img, 1.3, 5);
  for (std::size_t i = 0; i < fast.px.size(); ++i) {
    CHECK(std::abs(fast.px[i] - slow.px[i]) < 1e-4);  // float storage noise
  }
}

TEST_CASE("gaussian blur rejects even kernel sizes") {
  CHECK_THROWS_AS(gaussian_blur(Image(4, 4), 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_blur(Image(4, 4), 1.0, -3), std::invalid_argument);
}

TEST_CASE("median filter leaves a constant image unchanged") {
  const Image img(8, 8, 99);
  CHECK(median_filter(img, 3).px == img.px);
}

TEST_CASE("median filter removes an isolated impulse") {
  Image img(8, 8, 0);
  img.at(4, 4) = 255;
  const Image out = median_filter(img, 3);
  for (auto p : out.px) CHECK(p == 0);
}

TEST_CASE("median filter matches the window-sort oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = random_image(8, 8, rng);
    for (int ksize : {3, 5}) {
      CHECK(median_filter(img, ksize).px == median_oracle(img, ksize).px);
    }
  }
}

TEST_CASE("median filter rejects even kernel sizes") {
  CHECK_THROWS_AS(median_filter(Image(4, 4), 2), std::invalid_argument);
}

TEST_CASE("morphology on an all-zero image") {
  const Image img(10, 10, 0);
  CHECK(erode(img, 3).px == img.px);
  CHECK(dilate(img, 3).px == img.px);
}

TEST_CASE("erode collapses a 3x3 square to its center") {
  Image img(9, 9, 0);
  for (int y = 3; y <= 5; ++y) {
    for (int x = 3; x <= 5; ++x) img.at(x, y) = 255;
  }
  const Image out = erode(img, 3);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      CHECK(out.at(x, y) == ((x == 4 && y == 4) ? 255 : 0));
    }
  }
}

TEST_CASE("dilate grows a single pixel into a 3x3 square") {
  Image img(9, 9, 0);
  img.at(4, 4) = 255;
  const Image out = dilate(img, 3);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const bool inside = std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1;
      CHECK(out.at(x, y) == (inside ? 255 : 0));
    }
  }
}

TEST_CASE("morphology rejects non-binary input") {
  Image img(4, 4, 0);
  img.at(1, 1) = 100;
  CHECK_THROWS_AS(erode(img, 3), std::invalid_argument);
  CHECK_THROWS_AS(dilate(img, 3), std::invalid_argument);
}

TEST_CASE("erode subset / dilate superset of the foreground") {
  Rng rng(5);
  const Image img = random_binary(16, 16, rng);
  const Image er = erode(img, 3);
  const Image di = dilate(img, 3);
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    if (er.px[i] == 255) CHECK(img.px[i] == 255);
    if (img.px[i] == 255) CHECK(di.px[i] == 255);
  }
}

TEST_CASE("erode/dilate duality on interior pixels") {
  Rng rng(17);
  const Image img = random_binary(16, 16, rng);
  Image inv(16, 16);
  for (std::size_t i = 0; i < img.px.size(); ++i) inv.px[i] = 255 - img.px[i];
  const Image lhs = erode(img, 3);
  const Image rhs_d = dilate(inv, 3);
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      CHECK(lhs.at(x, y) == 255 - rhs_d.at(x, y));
    }
  }
}

TEST_CASE("threshold basics") {
  Rng rng(3);
  const Image img = random_image(12, 12, rng);
  const Image all_zero = threshold_binary(img, 255);
  for (auto p : all_zero.px) CHECK(p == 0);

  Image two(4, 4, 0);
  two.at(1, 1) = 10;
  const Image mapped = threshold_binary(two, 0);
  CHECK(mapped.at(1, 1) == 255);
  CHECK(mapped.at(0, 0) == 0);

  // idempotence: thresholding twice equals once
  const Image once = threshold_binary(img, 128);
  CHECK(threshold_binary(once, 128).px == once.px);
}

TEST_CASE("abs_diff basics") {
  const Image a(6, 6, 200), b(6, 6, 10);
  const Image d = abs_diff(a, b);
  for (auto p : d.px) CHECK(p == 190);
  CHECK(abs_diff(a, a).px == Image(6, 6, 0).px);

  Rng rng(9);
  const Image x = random_image(6, 6, rng), y = random_image(6, 6, rng);
  CHECK(abs_diff(x, y).px == abs_diff(y, x).px);
  CHECK_THROWS_AS(abs_diff(x, Image(5, 6)), std::invalid_argument);
}

TEST_CASE("warp with identity homography reproduces the image") {
  Rng rng(21);
  const Image img = random_image(20, 15, rng);
  const Image out = warp_perspective(img, Homography3x3::identity(), 20, 15);
  CHECK(out.px == img.px);
}

TEST_CASE("warp with pure translation shifts content") {
  Rng rng(22);
  const Image img = random_image(20, 15, rng);
  const Image out = warp_perspective(img, Homography3x3::translation(3, 0), 20, 15);
  for (int y = 0; y < 15; ++y) {
    for (int x = 3; x < 20; ++x) {
      CHECK(out.at(x, y) == img.at(x - 3, y));
    }
    for (int x = 0; x < 3; ++x) CHECK(out.at(x, y) == 0);  // zero-fill outside
  }
}

TEST_CASE("warp rejects a singular homography") {
  Homography3x3 h;
  h.m = {1, 0, 0, 2, 0, 0, 0, 0, 1};  // rank-deficient
  CHECK_THROWS_AS(warp_perspective(Image(4, 4), h, 4, 4), std::runtime_error);
}

TEST_CASE("warp valid mask marks in-bounds samples") {
  const Image img(10, 10, 50);
  Image mask;
  const Image out = warp_perspective(img, Homography3x3::translation(4, 0), 10, 10, &mask);
  for (int x = 0; x < 10; ++x) {
    CHECK(mask.at(x, 5) == (x >= 4 ? 255 : 0));
  }
  CHECK(out.at(5, 5) == 50);
}

TEST_CASE("connected components on an empty image") {
  CHECK(connected_components(Image(8, 8, 0), 1).empty());
}

TEST_CASE("connected components finds two disjoint squares") {
  Image img(12, 12, 0);
  for (int y = 1; y <= 2; ++y) {
    for (int x = 1; x <= 2; ++x) img.at(x, y) = 255;
  }
  for (int y = 7; y <= 8; ++y) {
    for (int x = 8; x <= 9; ++x) img.at(x, y) = 255;
  }
  const auto comps = connected_components(img, 1);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].area == 4);
  CHECK(comps[0].bbox.x == 1.0);
  CHECK(comps[0].bbox.y == 1.0);
  CHECK(comps[0].bbox.w == 2.0);
  CHECK(comps[0].bbox.h == 2.0);
  CHECK(comps[0].centroid.x == doctest::Approx(2.0));
  CHECK(comps[1].area == 4);
  CHECK(comps[1].bbox.x == 8.0);
  CHECK(comps[1].bbox.y == 7.0);
}

TEST_CASE("diagonal-touching pixels join under 8-connectivity") {
  Image img(6, 6, 0);
  img.at(1, 1) = 255;
  img.at(2, 2) = 255;
  img.at(3, 3) = 255;
  const auto comps = connected_components(img, 1);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].area == 3);
}

TEST_CASE("component min_area filter and area conservation") {
  Rng rng(31);
  const Image img = random_binary(24, 24, rng, 0.3);
  const long long fg = std::count(img.px.begin(), img.px.end(), 255);

  const auto all = connected_components(img, 1);
  long long total = 0;
  for (const auto& c : all) {
    total += c.area;
    // centroid lies inside the component bbox
    CHECK(c.centroid.x >= c.bbox.x);
    CHECK(c.centroid.x <= c.bbox.right());
    CHECK(c.centroid.y >= c.bbox.y);
    CHECK(c.centroid.y <= c.bbox.bottom());
  }
  CHECK(total == fg);

  const auto filtered = connected_components(img, 5);
  long long filtered_total = 0;
  for (const auto& c : filtered) {
    CHECK(c.area >= 5);
    filtered_total += c.area;
  }
  CHECK(filtered_total <= fg);
}

TEST_CASE("otsu separates a bimodal histogram") {
  Image img(10, 10, 20);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = 200;
  }
  const int t = otsu_threshold(img);
  CHECK(t >= 20);
  CHECK(t < 200);
  const Image bin = threshold_binary(img, t);
  CHECK(bin.at(0, 0) == 255);
  CHECK(bin.at(9, 9) == 0);
}

TEST_CASE("crop copies the requested rect and validates bounds") {
  Rng rng(41);
  const Image img = random_image(10, 8, rng);
  const Image c = crop(img, 2, 3, 4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) CHECK(c.at(x, y) == img.at(x + 2, y + 3));
  }
  CHECK_THROWS_AS(crop(img, 8, 0, 4, 4), std::invalid_argument);
}

TEST_CASE("filters preserve raster dimensions") {
  Rng rng(43);
  const Image img = random_image(13, 9, rng);
  CHECK(gaussian_blur(img, 1.0, 3).same_size(img));
  CHECK(median_filter(img, 3).same_size(img));
  CHECK(threshold_binary(img, 100).same_size(img));
  const Image bin = threshold_binary(img, 128);
  CHECK(erode(bin, 3).same_size(img));
  CHECK(dilate(bin, 3).same_size(img));
}
