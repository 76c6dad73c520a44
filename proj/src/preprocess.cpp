#include "facestat/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

namespace facestat {

double frontal_ratio(const LandmarkRecord& rec) {
  const double right = (rec.right_eye - rec.nose).norm();
  if (!(right > 0.0))
    throw Error(ErrorCode::DegenerateLandmarks,
                "right eye coincides with nose in " + rec.image_path);
  return (rec.left_eye - rec.nose).norm() / right;
}

bool is_frontal(double ratio, double lo, double hi) { return lo <= ratio && ratio <= hi; }

Rect square_face_region(int width, int height, const Rect& box) {
  if (box.w < 1 || box.h < 1 || box.x0 >= width || box.y0 >= height ||
      box.x0 + box.w <= 0 || box.y0 + box.h <= 0)
    throw Error(ErrorCode::EmptyIntersection, "face box does not overlap the image");
  const double cx = box.x0 + 0.5 * box.w;
  const double cy = box.y0 + 0.5 * box.h;
  const int side = std::min({std::max(box.w, box.h), width, height});
  int x0 = static_cast<int>(std::floor(cx - 0.5 * side));
  int y0 = static_cast<int>(std::floor(cy - 0.5 * side));
  x0 = std::clamp(x0, 0, width - side);
  y0 = std::clamp(y0, 0, height - side);
  return Rect{x0, y0, side, side};
}

RgbImage extract_face(const RgbImage& img, const Rect& box, int size) {
  const Rect square = square_face_region(img.width(), img.height(), box);
  return bilinear_resize(crop(img, square), size, size);
}

namespace {

Eigen::Vector2d parse_point(const nlohmann::json& j, const char* field) {
  const auto& v = j.at(field);
  if (!v.is_array() || v.size() != 2)
    throw Error(ErrorCode::Parse, fmt::format("field '{}' must be [x, y]", field));
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

LandmarkRecord parse_landmark_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    LandmarkRecord rec;
    rec.image_path = j.at("image_path").get<std::string>();
    rec.left_eye = parse_point(j, "left_eye");
    rec.right_eye = parse_point(j, "right_eye");
    rec.nose = parse_point(j, "nose");
    const auto& box = j.at("face_box");
    if (!box.is_array() || box.size() != 4)
      throw Error(ErrorCode::Parse, "field 'face_box' must be [x0, y0, w, h]");
    rec.face_box = Rect{box[0].get<int>(), box[1].get<int>(), box[2].get<int>(),
                        box[3].get<int>()};
    if (rec.face_box.w < 1 || rec.face_box.h < 1)
      throw Error(ErrorCode::Parse, "face_box must be nonempty");
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

std::vector<LandmarkRecord> read_landmark_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open landmark file " + path);
  std::vector<LandmarkRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_landmark_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, fmt::format("{}:{}: {}", path, line_no, e.what()));
    }
  }
  return out;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  const auto wide = static_cast<unsigned __int128>(next()) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

std::uint64_t class_stream_seed(std::uint64_t seed, std::string_view class_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : class_name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(seed).next() ^ h;
}

SplitManifest sample_split(const std::map<std::string, std::vector<std::string>>& candidates,
                           const SplitCounts& counts, std::uint64_t seed) {
  SplitManifest m;
  m.seed = seed;
  const std::size_t need = counts.train + counts.val + counts.test;
  for (const auto& [name, paths] : candidates) {
    std::vector<std::string> pool = paths;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() < need) {
      const std::size_t shortfall = need - pool.size();
      throw InsufficientImagesError(
          name, shortfall,
          fmt::format("class '{}' has {} candidate images but the split needs {} (short by {})",
                      name, pool.size(), need, shortfall));
    }
    SplitMix64 rng(class_stream_seed(seed, name));
    for (std::size_t i = pool.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i));
      std::swap(pool[i - 1], pool[j]);
    }
    ClassSplit split;
    auto it = pool.begin();
    auto take = [&it](std::size_t n) {
      std::vector<std::string> out(std::make_move_iterator(it),
                                   std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n)));
      it += static_cast<std::ptrdiff_t>(n);
      return out;
    };
    split.train = take(counts.train);
    split.val = take(counts.val);
    split.test = take(counts.test);
    m.classes.emplace(name, std::move(split));
  }
  return m;
}

std::string manifest_to_json(const SplitManifest& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  auto& classes = j["classes"];
  classes = nlohmann::ordered_json::object();
  for (const auto& [name, split] : m.classes) {
    classes[name]["train"] = split.train;
    classes[name]["val"] = split.val;
    classes[name]["test"] = split.test;
  }
  return j.dump(2) + "\n";
}

}  // namespace facestat
