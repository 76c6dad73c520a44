#include <doctest.h>

#include <random>

#include "facestat/measures.hpp"
#include "oracles.hpp"

using namespace facestat;

namespace {

RgbImage rotate90(const RgbImage& img) {
  RgbImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(img.height() - 1 - y, x, c) = img.at(x, y, c);
  return out;
}

void check_close(const PropertyVector& a, const PropertyVector& b, double tol) {
  for (Property p : kAllProperties) {
    INFO(property_name(p));
    CHECK(std::abs(a[p] - b[p]) <= tol * (1.0 + std::abs(b[p])));
  }
}

}  // namespace

TEST_CASE("region_rects tiles the frame") {
  const auto small = region_rects(3, 3);
  for (int i = 0; i < 9; ++i) CHECK(small[i] == Rect{i % 3, i / 3, 1, 1});

  const auto faces = region_rects(256, 256);
  CHECK(faces[0] == Rect{0, 0, 85, 85});
  CHECK(faces[4] == Rect{85, 85, 85, 85});
  CHECK(faces[8] == Rect{170, 170, 86, 86});

  CHECK_THROWS_AS(region_rects(2, 10), Error);
  CHECK_THROWS_AS(region_rects(10, 2), Error);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 3 + static_cast<int>(rng() % 120);
    const int h = 3 + static_cast<int>(rng() % 120);
    std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
    for (const Rect& r : region_rects(w, h)) {
      REQUIRE(contains(w, h, r));
      for (int y = r.y0; y < r.y0 + r.h; ++y)
        for (int x = r.x0; x < r.x0 + r.w; ++x) ++cover[static_cast<std::size_t>(y) * w + x];
    }
    CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("brightness and contrast") {
  CHECK(brightness(GrayPlane::Constant(4, 4, 128.0)) == 128.0);
  CHECK(contrast(GrayPlane::Constant(4, 4, 128.0)) == 0.0);
  GrayPlane half(2, 4);
  half << 0, 0, 255, 255, 0, 0, 255, 255;
  CHECK(brightness(half) == 127.5);
  CHECK(contrast(half) == 127.5);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayPlane p = oracle::random_plane(rng, 8, 8);
    const auto grid = oracle::to_grid(p);
    CHECK(std::abs(brightness(p) - oracle::mean(grid)) <= 1e-12);
    CHECK(std::abs(contrast(p) - std::sqrt(oracle::variance(grid))) <= 1e-10);
  }
}

TEST_CASE("sharpness") {
  CHECK(sharpness(GrayPlane::Constant(5, 5, 77.0)) == 0.0);
  GrayPlane ramp(6, 9);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 9; ++x) ramp(y, x) = 3.0 * x - 2.0 * y + 40.0;
  // Linear ramps vanish in the interior; only the reflected border responds.
  const GrayPlane lap = convolve3x3(ramp, laplacian_kernel());
  CHECK((lap.block(1, 1, 4, 7).abs() <= 1e-12).all());
  CHECK(sharpness(ramp) == doctest::Approx(oracle::sharpness(oracle::to_grid(ramp))).epsilon(1e-12));

  // 5x5 spike: response is -4 at the center and 1 at its four neighbours,
  // zero elsewhere (the spike is two samples from every border).
  GrayPlane spike = GrayPlane::Zero(5, 5);
  spike(2, 2) = 1.0;
  // mean = 0 / 25, variance = (16 + 4) / 25
  CHECK(sharpness(spike) == doctest::Approx(20.0 / 25.0).epsilon(1e-15));
  CHECK(sharpness(spike) == doctest::Approx(oracle::sharpness(oracle::to_grid(spike))));

  CHECK_THROWS_AS(sharpness(GrayPlane::Zero(2, 5)), Error);
}

TEST_CASE("detail") {
  CHECK(detail(GrayPlane::Constant(4, 4, 9.0)) == 0.0);
  GrayPlane step(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) step(y, x) = x < 4 ? 0.0 : 255.0;
  const double d = detail(step);
  CHECK(d > 0.0);
  // Columns 3 and 4 see |Gx| = 4 * 255, all others zero.
  CHECK(d == doctest::Approx(2.0 * 8 * 4 * 255 / 64.0).epsilon(1e-14));
  CHECK(d == doctest::Approx(oracle::detail(oracle::to_grid(step))).epsilon(1e-14));

  GrayPlane rotated = step.transpose();
  CHECK(detail(rotated) == doctest::Approx(d).epsilon(1e-14));
  CHECK_THROWS_AS(detail(GrayPlane::Zero(5, 2)), Error);
}

TEST_CASE("gray-level shift and scale properties") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const GrayPlane p = oracle::random_plane(rng, 12, 10);
    const double c = std::uniform_real_distribution<double>(-50, 50)(rng);
    const double s = std::uniform_real_distribution<double>(0, 3)(rng);
    const GrayPlane shifted = p + c;
    const GrayPlane scaled = p * s;
    CHECK(std::abs(brightness(shifted) - (brightness(p) + c)) <= 1e-10);
    CHECK(std::abs(contrast(shifted) - contrast(p)) <= 1e-10);
    CHECK(std::abs(sharpness(shifted) - sharpness(p)) <= 1e-10 * sharpness(p));
    CHECK(std::abs(detail(shifted) - detail(p)) <= 1e-10);
    CHECK(contrast(scaled) == doctest::Approx(s * contrast(p)).epsilon(1e-12));
    CHECK(detail(scaled) == doctest::Approx(s * detail(p)).epsilon(1e-12));
    CHECK(sharpness(scaled) == doctest::Approx(s * s * sharpness(p)).epsilon(1e-12));
  }
}

TEST_CASE("channel_means") {
  const auto m = channel_means(RgbImage::filled(4, 4, 10, 20, 30));
  CHECK(m.red == 10.0);
  CHECK(m.green == 20.0);
  CHECK(m.blue == 30.0);

  RgbImage split(4, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) {
      split.at(x, y, 0) = x < 2 ? 255 : 0;
      split.at(x, y, 2) = x < 2 ? 0 : 255;
    }
  const auto sm = channel_means(split);
  CHECK(sm.red == 127.5);
  CHECK(sm.green == 0.0);
  CHECK(sm.blue == 127.5);

  std::mt19937_64 rng(8);
  const RgbImage img = oracle::random_image(rng, 8, 8);
  double sums[3] = {0, 0, 0};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      for (int c = 0; c < 3; ++c) sums[c] += img.at(x, y, c);
  const auto rm = channel_means(img);
  CHECK(std::abs(rm.red - sums[0] / 64) <= 1e-12);
  CHECK(std::abs(rm.green - sums[1] / 64) <= 1e-12);
  CHECK(std::abs(rm.blue - sums[2] / 64) <= 1e-12);
}

TEST_CASE("property_vector") {
  const PropertyVector gray = property_vector(RgbImage::filled(16, 16, 128, 128, 128));
  CHECK(gray.brightness == doctest::Approx(128.0).epsilon(1e-14));
  CHECK(gray.sharpness == 0.0);
  CHECK(gray.contrast == 0.0);
  CHECK(gray.detail == 0.0);
  CHECK(gray.red_mean == 128.0);
  CHECK(gray.green_mean == 128.0);
  CHECK(gray.blue_mean == 128.0);
  CHECK(gray.luminosity == doctest::Approx(oracle::lightness(128, 128, 128)).epsilon(1e-12));
  CHECK(gray.luminosity == doctest::Approx(53.585).epsilon(1e-4));

  CHECK(property_vector(RgbImage::filled(4, 4, 255, 255, 255)).luminosity ==
        doctest::Approx(100.0).epsilon(1e-8));
  CHECK(property_vector(RgbImage::filled(4, 4, 0, 0, 0)).luminosity == 0.0);
  RgbImage bw = RgbImage::filled(4, 4, 0, 0, 0);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) bw.at(x, y, c) = 255;
  CHECK(std::abs(property_vector(bw).luminosity - 50.0) <= 1e-6);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const RgbImage img = oracle::random_image(rng, 9 + trial, 7 + trial);
    const PropertyVector v = property_vector(img);
    const GrayPlane g = to_grayscale(img);
    CHECK(v.brightness == brightness(g));
    CHECK(v.sharpness == sharpness(g));
    CHECK(v.contrast == contrast(g));
    CHECK(v.detail == detail(g));
    CHECK(v.luminosity == luminosity(rgb_to_lab_l(img)));
    CHECK(v.red_mean == channel_means(img).red);

    check_close(property_vector(rotate180(img)), v, 1e-12);
    check_close(property_vector(flip_horizontal(img)), v, 1e-12);
    for (Property p : kAllProperties) CHECK(v[p] >= 0.0);
  }
  CHECK_THROWS_AS(property_vector(RgbImage::filled(2, 8, 1, 2, 3)), Error);
}

TEST_CASE("detail is invariant under 90 degree rotation of the image") {
  std::mt19937_64 rng(44);
  const RgbImage img = oracle::random_image(rng, 11, 11);
  CHECK(property_vector(rotate90(img)).detail ==
        doctest::Approx(property_vector(img).detail).epsilon(1e-12));
}

TEST_CASE("region_property_vectors") {
  const RgbImage flat = RgbImage::filled(30, 21, 40, 90, 200);
  const auto same = region_property_vectors(flat);
  for (const auto& v : same) CHECK(v == same[0]);

  RgbImage block = RgbImage::filled(256, 256, 0, 0, 0);
  for (int y = 0; y < 85; ++y)
    for (int x = 0; x < 85; ++x)
      for (int c = 0; c < 3; ++c) block.at(x, y, c) = 255;
  const auto regions = region_property_vectors(block);
  CHECK(regions[0].brightness == doctest::Approx(255.0).epsilon(1e-14));
  for (int r = 5; r <= 9; ++r) CHECK(regions[r - 1].brightness == 0.0);

  // Region crops get their own borders: each one matches measuring the crop.
  std::mt19937_64 rng(99);
  const RgbImage img = oracle::random_image(rng, 40, 31);
  const auto rv = region_property_vectors(img);
  const auto rects = region_rects(40, 31);
  for (int i = 0; i < 9; ++i) CHECK(rv[i] == property_vector(crop(img, rects[i])));

  const auto all = measure_all_regions(img);
  CHECK(all[0] == property_vector(img));
  for (int i = 0; i < 9; ++i) CHECK(all[i + 1] == rv[i]);
}

TEST_CASE("linear measures aggregate over the grid by area") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 9 + static_cast<int>(rng() % 60);
    const int h = 9 + static_cast<int>(rng() % 60);
    const RgbImage img = oracle::random_image(rng, w, h);
    const auto all = measure_all_regions(img);
    const auto rects = region_rects(w, h);
    for (Property p : {Property::Brightness, Property::Luminosity, Property::RedMean,
                       Property::GreenMean, Property::BlueMean}) {
      double weighted = 0;
      for (int i = 0; i < 9; ++i) weighted += all[i + 1][p] * rects[i].w * rects[i].h;
      CHECK(std::abs(weighted / (w * h) - all[0][p]) <= 1e-9);
    }
  }
}

TEST_CASE("property names round trip") {
  for (Property p : kAllProperties) CHECK(property_from_name(property_name(p)) == p);
  CHECK_THROWS_AS(property_from_name("hue"), Error);
}
