#include "facestat/image.hpp"

#include <algorithm>
#include <cmath>

namespace facestat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Decode: return "DecodeError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DegenerateLandmarks: return "DegenerateLandmarks";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InsufficientImages: return "InsufficientImages";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UndefinedInput: return "UndefinedInput";
    case ErrorCode::MissingClassDir: return "MissingClassDir";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::EmptySpec: return "EmptySpec";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::Parse: return "ParseError";
  }
  return "Unknown";
}

RgbImage::RgbImage(int width, int height)
    : RgbImage(width, height,
               std::vector<std::uint8_t>(
                   static_cast<std::size_t>(std::max(width, 0)) *
                   static_cast<std::size_t>(std::max(height, 0)) * 3)) {}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::TooSmall, "image dimensions must be at least 1x1");
  if (data_.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(ErrorCode::Domain, "pixel buffer length must equal 3*width*height");
}

RgbImage RgbImage::filled(int width, int height, std::uint8_t r,
                          std::uint8_t g, std::uint8_t b) {
  RgbImage img(width, height);
  auto px = img.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }
  return img;
}

GrayPlane to_grayscale(const RgbImage& img) {
  return 0.299 * img.channel(0).cast<double>() +
         0.587 * img.channel(1).cast<double>() +
         0.114 * img.channel(2).cast<double>();
}

namespace {

// sRGB decoding for every 8-bit code value.
const std::array<double, 256>& srgb_to_linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int v = 0; v < 256; ++v) {
      const double c = v / 255.0;
      t[v] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

double lightness_from_luminance(double y) {
  // CIE f(t) with delta = 6/29; Yn = 1 for D65-normalized sRGB.
  constexpr double delta = 6.0 / 29.0;
  const double f = y > delta * delta * delta
                       ? std::cbrt(y)
                       : y / (3.0 * delta * delta) + 4.0 / 29.0;
  return std::clamp(116.0 * f - 16.0, 0.0, 100.0);
}

// Y row of the sRGB (D65) to XYZ matrix.
constexpr double kYr = 0.2126;
constexpr double kYg = 0.7152;
constexpr double kYb = 0.0722;

}  // namespace

double srgb_lightness(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const auto& lin = srgb_to_linear_table();
  return lightness_from_luminance(kYr * lin[r] + kYg * lin[g] + kYb * lin[b]);
}

GrayPlane rgb_to_lab_l(const RgbImage& img) {
  GrayPlane out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out(y, x) = srgb_lightness(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
  return out;
}

RgbImage crop(const RgbImage& img, const Rect& r) {
  if (!contains(img.width(), img.height(), r))
    throw Error(ErrorCode::OutOfBounds, "crop rectangle exceeds image bounds");
  RgbImage out(r.w, r.h);
  const auto src = img.data();
  auto dst = out.data();
  const std::size_t row_bytes = static_cast<std::size_t>(r.w) * 3;
  for (int y = 0; y < r.h; ++y) {
    const auto offset =
        (static_cast<std::size_t>(r.y0 + y) * img.width() + r.x0) * 3;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(offset), row_bytes,
                dst.begin() + static_cast<std::ptrdiff_t>(y * row_bytes));
  }
  return out;
}

RgbImage bilinear_resize(const RgbImage& img, int width, int height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::TooSmall, "resize target must be at least 1x1");
  RgbImage out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (int i = 0; i < n_out; ++i) {
      double s = (i + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(n_in - 1));
      const int lo = static_cast<int>(std::floor(s));
      t[i] = {lo, std::min(lo + 1, n_in - 1), s - lo};
    }
    return t;
  };
  const auto tx = taps(width, img.width(), sx);
  const auto ty = taps(height, img.height(), sy);

  for (int y = 0; y < height; ++y) {
    const Tap& v = ty[y];
    for (int x = 0; x < width; ++x) {
      const Tap& u = tx[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - u.frac) * img.at(u.lo, v.lo, c) +
                           u.frac * img.at(u.hi, v.lo, c);
        const double bottom = (1.0 - u.frac) * img.at(u.lo, v.hi, c) +
                              u.frac * img.at(u.hi, v.hi, c);
        const double value = (1.0 - v.frac) * top + v.frac * bottom;
        out.at(x, y, c) =
            static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
      }
    }
  }
  return out;
}

RgbImage flip_horizontal(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
  return out;
}

RgbImage rotate180(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        out.at(img.width() - 1 - x, img.height() - 1 - y, c) = img.at(x, y, c);
  return out;
}

}  // namespace facestat
