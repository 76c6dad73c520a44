#include "facestat/measures.hpp"

#include <string>

namespace facestat {

std::string_view property_name(Property p) noexcept {
  switch (p) {
    case Property::Brightness: return "brightness";
    case Property::Sharpness: return "sharpness";
    case Property::Luminosity: return "luminosity";
    case Property::RedMean: return "red_mean";
    case Property::GreenMean: return "green_mean";
    case Property::BlueMean: return "blue_mean";
    case Property::Contrast: return "contrast";
    case Property::Detail: return "detail";
  }
  return "unknown";
}

Property property_from_name(std::string_view name) {
  for (Property p : kAllProperties)
    if (property_name(p) == name) return p;
  throw Error(ErrorCode::Parse, "unknown property '" + std::string(name) + "'");
}

double PropertyVector::operator[](Property p) const noexcept {
  return const_cast<PropertyVector&>(*this)[p];
}

double& PropertyVector::operator[](Property p) noexcept {
  switch (p) {
    case Property::Brightness: return brightness;
    case Property::Sharpness: return sharpness;
    case Property::Luminosity: return luminosity;
    case Property::RedMean: return red_mean;
    case Property::GreenMean: return green_mean;
    case Property::BlueMean: return blue_mean;
    case Property::Contrast: return contrast;
    case Property::Detail: return detail;
  }
  return brightness;
}

std::array<Rect, 9> region_rects(int width, int height) {
  if (width < 3 || height < 3)
    throw Error(ErrorCode::TooSmall, "region grid requires an image of at least 3x3");
  const int cw = width / 3;
  const int ch = height / 3;
  const std::array<int, 3> xs{0, cw, 2 * cw};
  const std::array<int, 3> ws{cw, cw, width - 2 * cw};
  const std::array<int, 3> ys{0, ch, 2 * ch};
  const std::array<int, 3> hs{ch, ch, height - 2 * ch};
  std::array<Rect, 9> rects;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col)
      rects[row * 3 + col] = Rect{xs[col], ys[row], ws[col], hs[row]};
  return rects;
}

ChannelMeans channel_means(const RgbImage& img) {
  return {img.channel(0).cast<double>().mean(),
          img.channel(1).cast<double>().mean(),
          img.channel(2).cast<double>().mean()};
}

namespace {

template <typename GrayDerived, typename LDerived>
PropertyVector measure(const Eigen::ArrayBase<GrayDerived>& gray,
                       const Eigen::ArrayBase<LDerived>& lightness,
                       const ChannelMeans& means) {
  PropertyVector v;
  v.brightness = brightness(gray);
  v.sharpness = sharpness(gray);
  v.luminosity = luminosity(lightness);
  v.red_mean = means.red;
  v.green_mean = means.green;
  v.blue_mean = means.blue;
  v.contrast = contrast(gray);
  v.detail = detail(gray);
  return v;
}

std::array<PropertyVector, 9> measure_regions(const RgbImage& img,
                                              const GrayPlane& gray,
                                              const GrayPlane& lightness) {
  std::array<PropertyVector, 9> out;
  const auto rects = region_rects(img.width(), img.height());
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const Rect& r = rects[i];
    out[i] = measure(crop(gray, r), crop(lightness, r), channel_means(crop(img, r)));
  }
  return out;
}

}  // namespace

PropertyVector property_vector(const RgbImage& img) {
  require_3x3(img.height(), img.width());
  return measure(to_grayscale(img), rgb_to_lab_l(img), channel_means(img));
}

std::array<PropertyVector, 9> region_property_vectors(const RgbImage& img) {
  require_3x3(img.height(), img.width());
  return measure_regions(img, to_grayscale(img), rgb_to_lab_l(img));
}

std::array<PropertyVector, kRegionCount> measure_all_regions(const RgbImage& img) {
  require_3x3(img.height(), img.width());
  const GrayPlane gray = to_grayscale(img);
  const GrayPlane lightness = rgb_to_lab_l(img);
  std::array<PropertyVector, kRegionCount> out;
  out[0] = measure(gray, lightness, channel_means(img));
  const auto regions = measure_regions(img, gray, lightness);
  std::copy(regions.begin(), regions.end(), out.begin() + 1);
  return out;
}

}  // namespace facestat
