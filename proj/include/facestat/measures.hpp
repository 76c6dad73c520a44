#pragma once

#include <array>
#include <string_view>

#include "facestat/image.hpp"

namespace facestat {

/// 0 = whole image, 1..9 = 3x3 grid cells in row-major order.
using RegionId = int;
inline constexpr int kRegionCount = 10;

/// The eight per-image measures, in report column order.
enum class Property {
  Brightness,
  Sharpness,
  Luminosity,
  RedMean,
  GreenMean,
  BlueMean,
  Contrast,
  Detail,
};
inline constexpr int kPropertyCount = 8;

inline constexpr std::array<Property, kPropertyCount> kAllProperties = {
    Property::Brightness, Property::Sharpness, Property::Luminosity,
    Property::RedMean,    Property::GreenMean, Property::BlueMean,
    Property::Contrast,   Property::Detail};

std::string_view property_name(Property p) noexcept;
/// Throws Error(Parse) for names outside the eight above.
Property property_from_name(std::string_view name);

struct PropertyVector {
  double brightness = 0;
  double sharpness = 0;
  double luminosity = 0;
  double red_mean = 0;
  double green_mean = 0;
  double blue_mean = 0;
  double contrast = 0;
  double detail = 0;

  double operator[](Property p) const noexcept;
  double& operator[](Property p) noexcept;

  friend bool operator==(const PropertyVector&, const PropertyVector&) = default;
};

/// Tiles width x height into a 3x3 grid; the last row/column absorbs the
/// remainder. Throws TooSmall below 3x3.
std::array<Rect, 9> region_rects(int width, int height);

// Single-plane measures, templated so they also accept Eigen blocks. -----

template <typename Derived>
typename Derived::Scalar brightness(const Eigen::ArrayBase<Derived>& gray) {
  return gray.mean();
}

template <typename Derived>
typename Derived::Scalar luminosity(const Eigen::ArrayBase<Derived>& l_plane) {
  return l_plane.mean();
}

/// Population variance, computed mean-first.
template <typename Derived>
typename Derived::Scalar population_variance(const Eigen::ArrayBase<Derived>& v) {
  // Shifted by the first sample so constant input yields exactly zero.
  const auto shift = v.size() > 0 ? v.coeff(0) : typename Derived::Scalar(0);
  const auto d = (v - shift).eval();
  const auto mean = d.mean();
  return (d - mean).square().sum() / static_cast<typename Derived::Scalar>(v.size());
}

template <typename Derived>
typename Derived::Scalar contrast(const Eigen::ArrayBase<Derived>& gray) {
  using std::sqrt;
  return sqrt(population_variance(gray));
}

inline void require_3x3(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 3 || cols < 3)
    throw Error(ErrorCode::TooSmall, "measure requires a plane of at least 3x3");
}

/// Variance of the 4-neighbour Laplacian response.
template <typename Derived>
typename Derived::Scalar sharpness(const Eigen::ArrayBase<Derived>& gray) {
  using Scalar = typename Derived::Scalar;
  require_3x3(gray.rows(), gray.cols());
  return population_variance(convolve3x3(gray, laplacian_kernel<Scalar>()));
}

/// Mean Sobel gradient magnitude.
template <typename Derived>
typename Derived::Scalar detail(const Eigen::ArrayBase<Derived>& gray) {
  using Scalar = typename Derived::Scalar;
  require_3x3(gray.rows(), gray.cols());
  const Plane<Scalar> gx = convolve3x3(gray, sobel_x_kernel<Scalar>());
  const Plane<Scalar> gy = convolve3x3(gray, sobel_y_kernel<Scalar>());
  return (gx.square() + gy.square()).sqrt().mean();
}

struct ChannelMeans {
  double red = 0;
  double green = 0;
  double blue = 0;
};

ChannelMeans channel_means(const RgbImage& img);

/// All eight measures over the whole image.
PropertyVector property_vector(const RgbImage& img);

/// Measures for grid regions 1..9 (index 0 of the result is region 1).
/// Each region is measured on its own crop with fresh convolution borders.
std::array<PropertyVector, 9> region_property_vectors(const RgbImage& img);

/// Whole image followed by the nine regions, indexed by RegionId.
std::array<PropertyVector, kRegionCount> measure_all_regions(const RgbImage& img);

}  // namespace facestat
