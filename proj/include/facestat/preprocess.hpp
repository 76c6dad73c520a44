#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "facestat/image.hpp"

namespace facestat {

inline constexpr double kFrontalLo = 0.9;
inline constexpr double kFrontalHi = 1.1;
inline constexpr int kFaceSize = 256;

struct LandmarkRecord {
  std::string image_path;
  Eigen::Vector2d left_eye = Eigen::Vector2d::Zero();
  Eigen::Vector2d right_eye = Eigen::Vector2d::Zero();
  Eigen::Vector2d nose = Eigen::Vector2d::Zero();
  Rect face_box;
};

/// |left_eye - nose| / |right_eye - nose|.
double frontal_ratio(const LandmarkRecord& rec);

/// Inclusive at both ends.
bool is_frontal(double ratio, double lo = kFrontalLo, double hi = kFrontalHi);

/// Square region about the box center (side = max(w, h)), moved inside the
/// image and shrunk only when it cannot fit. Throws EmptyIntersection when
/// the box misses the image entirely.
Rect square_face_region(int width, int height, const Rect& box);

/// square_face_region, crop, then bilinear resize to size x size.
RgbImage extract_face(const RgbImage& img, const Rect& box, int size = kFaceSize);

/// Parses one landmark line (JSON object). Throws Error(Parse).
LandmarkRecord parse_landmark_line(std::string_view line);
std::vector<LandmarkRecord> read_landmark_file(const std::string& path);

struct SplitCounts {
  std::size_t train = 10000;
  std::size_t val = 2000;
  std::size_t test = 10000;
};

struct ClassSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  /// Keyed by class name ("fake", "real", "synthetic").
  std::map<std::string, ClassSplit> classes;
};

/// SplitMix64; fixed output sequence on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound) by multiply-shift.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

std::uint64_t class_stream_seed(std::uint64_t seed, std::string_view class_name);

/// Per class: sort, Fisher-Yates with SplitMix64 seeded from (seed, class),
/// then slice into train/val/test. Throws InsufficientImagesError.
SplitManifest sample_split(const std::map<std::string, std::vector<std::string>>& candidates,
                           const SplitCounts& counts, std::uint64_t seed);

std::string manifest_to_json(const SplitManifest& m);

}  // namespace facestat
