#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "facestat/eval.hpp"
#include "facestat/measures.hpp"
#include "facestat/stats.hpp"

namespace facestat {

struct DatasetManifest {
  std::filesystem::path root;
  /// Paths relative to root ('/'-separated), sorted, indexed by ClassLabel.
  std::array<std::vector<std::string>, 3> paths;
};

struct PropertyRecord {
  std::string image_path;
  ClassLabel cls = ClassLabel::Fake;
  RegionId region = 0;
  PropertyVector props;

  friend bool operator==(const PropertyRecord&, const PropertyRecord&) = default;
};

struct ImageFailure {
  std::string image_path;
  std::string message;
};

struct AnalysisResult {
  std::vector<PropertyRecord> records;  ///< ordered by (class, path, region)
  std::vector<ImageFailure> failures;   ///< ordered by (class, path)
  std::array<std::size_t, 3> image_counts{};  ///< successfully measured images per class
};

struct PropertyStats {
  std::size_t count = 0;
  double mean = 0;
  double std = 0;  ///< population
};

struct ClassRegionAggregate {
  ClassLabel cls = ClassLabel::Fake;
  RegionId region = 0;
  std::array<PropertyStats, kPropertyCount> props;  ///< indexed by Property
};

using AnovaKey = std::pair<RegionId, Property>;
using AnovaTable = std::map<AnovaKey, AnovaResult>;

/// Runs fn(0..n-1) on `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Finds root/{fake,real,synthetic}/**/*.{png,jpg,jpeg}.
DatasetManifest scan_dataset(const std::filesystem::path& root);

/// Ten records (region 0, then 1..9) for one image.
std::array<PropertyRecord, kRegionCount> image_records(const std::string& image_path,
                                                       ClassLabel cls, const RgbImage& img);

/// Decodes and measures every image. Undecodable images land in `failures`;
/// throws EmptyClass if any class ends up with no measured image.
AnalysisResult analyze_dataset(const DatasetManifest& manifest, unsigned workers = 0);

/// Per (class, region) in record order: count, mean and population std of
/// every property.
std::vector<ClassRegionAggregate> aggregate(const std::vector<PropertyRecord>& records);

/// One-way ANOVA across the three classes for each (region, property).
/// `whole_image_only` restricts the table to region 0.
AnovaTable anova_table(const std::vector<PropertyRecord>& records,
                       double cap = kDefaultNegLogCap, bool whole_image_only = false);

// Serialization ---------------------------------------------------------------

inline constexpr const char* kPropertyCsvHeader =
    "image_path,class,region,brightness,sharpness,luminosity,red_mean,green_mean,"
    "blue_mean,contrast,detail";

std::string property_csv(const std::vector<PropertyRecord>& records);
std::vector<PropertyRecord> parse_property_csv(std::string_view text);
void write_property_csv(const std::vector<PropertyRecord>& records,
                        const std::filesystem::path& path);

std::string report_json(const std::vector<ClassRegionAggregate>& aggregates,
                        const AnovaTable& table, const std::array<std::size_t, 3>& image_counts,
                        double cap);
void write_aggregate_json(const std::vector<ClassRegionAggregate>& aggregates,
                          const AnovaTable& table,
                          const std::array<std::size_t, 3>& image_counts, double cap,
                          const std::filesystem::path& path);

/// Tab-separated "path<TAB>message" lines.
std::string failure_sidecar(const std::vector<ImageFailure>& failures);

/// The parts of a report JSON the plots need.
struct ReportCell {
  std::array<double, 3> class_means{};  ///< indexed by ClassLabel
  double neg_log10_p = 0;
  bool capped = false;
};

struct Report {
  std::map<RegionId, std::array<ReportCell, kPropertyCount>> regions;
};

Report parse_report_json(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace facestat
