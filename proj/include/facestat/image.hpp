#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "facestat/error.hpp"

namespace facestat {

/// Scalar sample plane, rows = image height, cols = image width.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grayscale intensity in [0,255] or CIE L* in [0,100], depending on producer.
using GrayPlane = Plane<double>;

/// 3x3 correlation kernel, row-major: k(j, i) multiplies the sample at
/// (y + j - 1, x + i - 1).
template <typename Scalar>
using Kernel3 = Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor>;

using Kernel3x3 = Kernel3<double>;

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 1;
  int h = 1;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Interleaved 8-bit sRGB raster, row-major, channel order R,G,B.
class RgbImage {
 public:
  using ChannelMap =
      Eigen::Map<const Plane<std::uint8_t>, Eigen::Unaligned,
                 Eigen::Stride<Eigen::Dynamic, 3>>;

  RgbImage() = default;
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  /// Uniform image filled with one color.
  static RgbImage filled(int width, int height, std::uint8_t r, std::uint8_t g,
                         std::uint8_t b);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  /// Strided view of one channel (0 = R, 1 = G, 2 = B) as a height x width plane.
  ChannelMap channel(int c) const {
    return ChannelMap(data_.data() + c, height_, width_,
                      Eigen::Stride<Eigen::Dynamic, 3>(3 * width_, 3));
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Color conversion ----------------------------------------------------------

/// BT.601 luma, unrounded.
GrayPlane to_grayscale(const RgbImage& img);

/// CIE L* (D65) of sRGB pixels, on the [0,100] scale.
GrayPlane rgb_to_lab_l(const RgbImage& img);

/// L* for a single sRGB triplet.
double srgb_lightness(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Convolution ---------------------------------------------------------------

/// Reflect-101 index folding: -1 -> 1, n -> n - 2. Single-sample axes fold to 0.
inline Eigen::Index reflect101(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Same-size 3x3 correlation with reflect-101 borders.
template <typename Derived>
Plane<typename Derived::Scalar> convolve3x3(
    const Eigen::ArrayBase<Derived>& plane,
    const Kernel3<typename Derived::Scalar>& k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = plane.rows();
  const Eigen::Index cols = plane.cols();
  Plane<Scalar> out(rows, cols);
  const Scalar ksum = k.sum();
  std::array<Eigen::Index, 3> ys{};
  std::array<Eigen::Index, 3> xs{};
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (int j = 0; j < 3; ++j) ys[j] = reflect101(y + j - 1, rows);
    for (Eigen::Index x = 0; x < cols; ++x) {
      for (int i = 0; i < 3; ++i) xs[i] = reflect101(x + i - 1, cols);
      // Taps are taken relative to the center so flat input cancels exactly.
      const Scalar center = plane(y, x);
      Scalar acc(0);
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) acc += k(j, i) * (plane(ys[j], xs[i]) - center);
      out(y, x) = acc + ksum * center;
    }
  }
  return out;
}

template <typename Scalar = double>
Kernel3<Scalar> laplacian_kernel() {
  Kernel3<Scalar> k;
  k << 0, 1, 0, 1, -4, 1, 0, 1, 0;
  return k;
}

template <typename Scalar = double>
Kernel3<Scalar> sobel_x_kernel() {
  Kernel3<Scalar> k;
  k << -1, 0, 1, -2, 0, 2, -1, 0, 1;
  return k;
}

template <typename Scalar = double>
Kernel3<Scalar> sobel_y_kernel() {
  return sobel_x_kernel<Scalar>().transpose();
}

// Geometry ------------------------------------------------------------------

inline bool contains(int width, int height, const Rect& r) {
  return r.w >= 1 && r.h >= 1 && r.x0 >= 0 && r.y0 >= 0 &&
         r.x0 + r.w <= width && r.y0 + r.h <= height;
}

RgbImage crop(const RgbImage& img, const Rect& r);

template <typename Derived>
Plane<typename Derived::Scalar> crop(const Eigen::ArrayBase<Derived>& plane,
                                     const Rect& r) {
  if (!contains(static_cast<int>(plane.cols()), static_cast<int>(plane.rows()), r))
    throw Error(ErrorCode::OutOfBounds, "crop rectangle exceeds plane bounds");
  return plane.block(r.y0, r.x0, r.h, r.w);
}

/// Half-pixel-centered bilinear resampling, rounded and clamped to 8 bits.
RgbImage bilinear_resize(const RgbImage& img, int width, int height);

RgbImage flip_horizontal(const RgbImage& img);
RgbImage rotate180(const RgbImage& img);

// Codecs --------------------------------------------------------------------

/// Decodes a PNG or JPEG stream. Alpha is composited over black; gray
/// sources are replicated into all three channels.
RgbImage decode_image(std::span<const std::uint8_t> bytes);
RgbImage read_image(const std::string& path);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_jpeg(const RgbImage& img, int quality = 90);
void write_png(const RgbImage& img, const std::string& path);

}  // namespace facestat
