#include "facestat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

namespace facestat {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& root) {
  DatasetManifest m;
  m.root = root;
  for (ClassLabel c : kAllClasses) {
    const fs::path dir = root / std::string(class_name(c));
    if (!fs::is_directory(dir))
      throw Error(ErrorCode::MissingClassDir,
                  fmt::format("missing class directory '{}' under {}", class_name(c),
                              root.string()));
    auto& list = m.paths[index_of(c)];
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file() || !has_image_extension(entry.path())) continue;
      list.push_back(fs::relative(entry.path(), root).generic_string());
    }
    std::sort(list.begin(), list.end());
    if (list.empty())
      throw Error(ErrorCode::EmptyClass,
                  fmt::format("class directory '{}' contains no images", class_name(c)));
  }
  return m;
}

std::array<PropertyRecord, kRegionCount> image_records(const std::string& image_path,
                                                       ClassLabel cls, const RgbImage& img) {
  const auto vectors = measure_all_regions(img);
  std::array<PropertyRecord, kRegionCount> out;
  for (int r = 0; r < kRegionCount; ++r) out[r] = {image_path, cls, r, vectors[r]};
  return out;
}

AnalysisResult analyze_dataset(const DatasetManifest& manifest, unsigned workers) {
  struct Job {
    ClassLabel cls;
    const std::string* path;
  };
  std::vector<Job> jobs;
  for (ClassLabel c : kAllClasses)
    for (const auto& p : manifest.paths[index_of(c)]) jobs.push_back({c, &p});

  struct Outcome {
    std::array<PropertyRecord, kRegionCount> records;
    std::string error;
    bool ok = false;
  };
  std::vector<Outcome> outcomes(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    try {
      const RgbImage img = read_image((manifest.root / *job.path).string());
      outcomes[i].records = image_records(*job.path, job.cls, img);
      outcomes[i].ok = true;
    } catch (const Error& e) {
      outcomes[i].error = fmt::format("{}: {}", to_string(e.code()), e.what());
    }
  });

  AnalysisResult result;
  result.records.reserve(jobs.size() * kRegionCount);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (outcomes[i].ok) {
      result.records.insert(result.records.end(), outcomes[i].records.begin(),
                            outcomes[i].records.end());
      ++result.image_counts[index_of(jobs[i].cls)];
    } else {
      result.failures.push_back({*jobs[i].path, outcomes[i].error});
    }
  }
  for (ClassLabel c : kAllClasses)
    if (result.image_counts[index_of(c)] == 0)
      throw Error(ErrorCode::EmptyClass,
                  fmt::format("no image of class '{}' could be measured", class_name(c)));
  return result;
}

std::vector<ClassRegionAggregate> aggregate(const std::vector<PropertyRecord>& records) {
  // Values gathered per (class, region) in record order.
  std::map<std::pair<int, int>, std::vector<const PropertyVector*>> groups;
  for (const auto& r : records) groups[{index_of(r.cls), r.region}].push_back(&r.props);

  std::vector<ClassRegionAggregate> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    ClassRegionAggregate agg;
    agg.cls = static_cast<ClassLabel>(key.first);
    agg.region = key.second;
    for (Property p : kAllProperties) {
      double sum = 0.0;
      for (const auto* v : members) sum += (*v)[p];
      const double n = static_cast<double>(members.size());
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto* v : members) ss += ((*v)[p] - mean) * ((*v)[p] - mean);
      agg.props[static_cast<int>(p)] = {members.size(), mean, std::sqrt(ss / n)};
    }
    out.push_back(agg);
  }
  return out;
}

AnovaTable anova_table(const std::vector<PropertyRecord>& records, double cap,
                       bool whole_image_only) {
  const int regions = whole_image_only ? 1 : kRegionCount;
  // by_region[region][class] -> property vectors in record order
  std::vector<std::array<std::vector<const PropertyVector*>, 3>> by_region(regions);
  for (const auto& r : records)
    if (r.region < regions) by_region[r.region][index_of(r.cls)].push_back(&r.props);

  AnovaTable table;
  for (int region = 0; region < regions; ++region) {
    for (Property p : kAllProperties) {
      std::array<SampleGroup, 3> groups;
      for (ClassLabel c : kAllClasses) {
        const auto& members = by_region[region][index_of(c)];
        if (members.size() < 2)
          throw Error(ErrorCode::InsufficientSamples,
                      fmt::format("region {} property {}: class '{}' has {} sample(s), need 2",
                                  region, property_name(p), class_name(c), members.size()));
        auto& g = groups[index_of(c)];
        g.label = std::string(class_name(c));
        g.values.reserve(members.size());
        for (const auto* v : members) g.values.push_back((*v)[p]);
      }
      table[{region, p}] = one_way_anova(groups, cap);
    }
  }
  return table;
}

// Serialization ---------------------------------------------------------------

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

// Splits one CSV record starting at pos; advances pos past the line end.
std::vector<std::string> split_csv_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char ch = text[pos++];
    if (quoted) {
      if (ch == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::Parse, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::Parse, "invalid number '" + s + "'");
  return v;
}

}  // namespace

std::string property_csv(const std::vector<PropertyRecord>& records) {
  std::string out = kPropertyCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{}", csv_field(r.image_path), class_name(r.cls), r.region);
    for (Property p : kAllProperties) {
      out += ',';
      out += format_double(r.props[p]);
    }
    out += '\n';
  }
  return out;
}

std::vector<PropertyRecord> parse_property_csv(std::string_view text) {
  std::size_t pos = 0;
  const auto header = split_csv_record(text, pos);
  std::string joined;
  for (std::size_t i = 0; i < header.size(); ++i) joined += (i ? "," : "") + header[i];
  if (joined != kPropertyCsvHeader) throw Error(ErrorCode::Parse, "unexpected CSV header");
  std::vector<PropertyRecord> out;
  std::size_t line = 1;
  while (pos < text.size()) {
    ++line;
    const auto f = split_csv_record(text, pos);
    if (f.size() == 1 && f[0].empty()) continue;
    try {
      if (f.size() != 3 + kPropertyCount)
        throw Error(ErrorCode::Parse, fmt::format("expected {} fields, got {}",
                                                  3 + kPropertyCount, f.size()));
      PropertyRecord r;
      r.image_path = f[0];
      r.cls = class_from_name(f[1]);
      r.region = static_cast<RegionId>(parse_double(f[2]));
      if (r.region < 0 || r.region >= kRegionCount || std::to_string(r.region) != f[2])
        throw Error(ErrorCode::Parse, "region must be an integer in [0, 9]");
      for (int i = 0; i < kPropertyCount; ++i) r.props[kAllProperties[i]] = parse_double(f[3 + i]);
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, fmt::format("CSV line {}: {}", line, e.what()));
    }
  }
  return out;
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_property_csv(const std::vector<PropertyRecord>& records, const fs::path& path) {
  write_text_file(path, property_csv(records));
}

std::string report_json(const std::vector<ClassRegionAggregate>& aggregates,
                        const AnovaTable& table, const std::array<std::size_t, 3>& image_counts,
                        double cap) {
  ojson j;
  j["format"] = "facestat-report/1";
  j["cap"] = cap;
  auto& counts = j["image_counts"];
  counts = ojson::object();
  for (ClassLabel c : kAllClasses) counts[std::string(class_name(c))] = image_counts[index_of(c)];

  std::map<RegionId, std::vector<const ClassRegionAggregate*>> agg_by_region;
  for (const auto& a : aggregates) agg_by_region[a.region].push_back(&a);

  std::vector<RegionId> regions;
  for (const auto& [key, _] : table)
    if (regions.empty() || regions.back() != key.first) regions.push_back(key.first);

  auto& out_regions = j["regions"];
  out_regions = ojson::array();
  for (RegionId region : regions) {
    ojson rj;
    rj["region"] = region;
    auto& props = rj["properties"];
    props = ojson::object();
    for (Property p : kAllProperties) {
      ojson pj;
      auto& aggs = pj["aggregates"];
      aggs = ojson::object();
      for (const auto* a : agg_by_region[region]) {
        const auto& s = a->props[static_cast<int>(p)];
        aggs[std::string(class_name(a->cls))] = {{"count", s.count}, {"mean", s.mean},
                                                 {"std", s.std}};
      }
      const auto it = table.find({region, p});
      if (it != table.end()) {
        const AnovaResult& r = it->second;
        ojson aj;
        aj["f_stat"] = r.f_infinite() ? ojson(nullptr) : ojson(r.f_stat);
        aj["f_infinite"] = r.f_infinite();
        aj["df_between"] = r.df_between;
        aj["df_within"] = r.df_within;
        aj["p_value"] = r.p_value;
        aj["neg_log10_p"] = r.neg_log10_p;
        aj["capped"] = r.capped;
        pj["anova"] = aj;
      }
      props[std::string(property_name(p))] = pj;
    }
    out_regions.push_back(rj);
  }
  return j.dump(2) + "\n";
}

void write_aggregate_json(const std::vector<ClassRegionAggregate>& aggregates,
                          const AnovaTable& table,
                          const std::array<std::size_t, 3>& image_counts, double cap,
                          const fs::path& path) {
  write_text_file(path, report_json(aggregates, table, image_counts, cap));
}

std::string failure_sidecar(const std::vector<ImageFailure>& failures) {
  std::string out;
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace_if(msg.begin(), msg.end(), [](char c) { return c == '\n' || c == '\t'; }, ' ');
    out += f.image_path + '\t' + msg + '\n';
  }
  return out;
}

Report parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Report report;
    for (const auto& rj : j.at("regions")) {
      const RegionId region = rj.at("region").get<int>();
      if (region < 0 || region >= kRegionCount)
        throw Error(ErrorCode::Parse, fmt::format("region {} out of range", region));
      auto& cells = report.regions[region];
      for (Property p : kAllProperties) {
        const auto& pj = rj.at("properties").at(std::string(property_name(p)));
        ReportCell& cell = cells[static_cast<int>(p)];
        for (ClassLabel c : kAllClasses)
          cell.class_means[index_of(c)] =
              pj.at("aggregates").at(std::string(class_name(c))).at("mean").get<double>();
        cell.neg_log10_p = pj.at("anova").at("neg_log10_p").get<double>();
        cell.capped = pj.at("anova").at("capped").get<bool>();
      }
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed report: ") + e.what());
  }
}

}  // namespace facestat
