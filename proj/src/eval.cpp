#include "facestat/eval.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "facestat/error.hpp"

namespace facestat {

std::string_view class_name(ClassLabel c) noexcept {
  switch (c) {
    case ClassLabel::Fake: return "fake";
    case ClassLabel::Real: return "real";
    case ClassLabel::Synthetic: return "synthetic";
  }
  return "unknown";
}

ClassLabel class_from_name(std::string_view name) {
  for (ClassLabel c : kAllClasses)
    if (class_name(c) == name) return c;
  throw Error(ErrorCode::Parse, fmt::format("unknown class '{}'", name));
}

ClassLabel class_from_int(long long value) {
  if (value < 0 || value > 2)
    throw Error(ErrorCode::Parse, fmt::format("class label {} outside {{0, 1, 2}}", value));
  return static_cast<ClassLabel>(value);
}

ConfusionMatrix3 confusion_from_predictions(std::span<const Prediction> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to evaluate");
  ConfusionMatrix3 cm = ConfusionMatrix3::Zero();
  for (const auto& r : records) ++cm(index_of(r.truth), index_of(r.predicted));
  return cm;
}

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassMetrics per_class_metrics(const ConfusionMatrix3& cm, ClassLabel c) {
  const int i = index_of(c);
  const std::int64_t n = cm.sum();
  const std::int64_t tp = cm(i, i);
  const std::int64_t fn = cm.row(i).sum() - tp;
  const std::int64_t fp = cm.col(i).sum() - tp;
  const std::int64_t tn = n - tp - fn - fp;
  return {ratio(tp, tp + fn), ratio(tn, tn + fp), ratio(tp, tp + fp), ratio(tp + tn, n)};
}

ClassMetrics class_averaged(std::span<const ClassMetrics, 3> metrics) {
  auto mean = [&](std::optional<double> ClassMetrics::*field, const char* name) {
    double sum = 0.0;
    for (const auto& m : metrics) {
      const auto& v = m.*field;
      if (!v) throw Error(ErrorCode::UndefinedInput, fmt::format("{} undefined for a class", name));
      sum += *v;
    }
    return sum / 3.0;
  };
  ClassMetrics out;
  out.sensitivity = mean(&ClassMetrics::sensitivity, "sensitivity");
  out.specificity = mean(&ClassMetrics::specificity, "specificity");
  out.precision = mean(&ClassMetrics::precision, "precision");
  out.accuracy = mean(&ClassMetrics::accuracy, "accuracy");
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ClassLabel parse_label(std::string_view field) {
  field = trim(field);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::Parse, fmt::format("label '{}' is not an integer", field));
  return class_from_int(v);
}

}  // namespace

std::vector<Prediction> parse_prediction_log(std::string_view text) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line_no == 1 && line.starts_with("image_path")) continue;
    // The path may itself contain commas, so split from the right.
    const auto c2 = line.rfind(',');
    const auto c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos
                                                            : line.rfind(',', c2 - 1);
    try {
      if (c1 == std::string_view::npos)
        throw Error(ErrorCode::Parse, "expected image_path,true_label,predicted_label");
      out.push_back({std::string(trim(line.substr(0, c1))),
                     parse_label(line.substr(c1 + 1, c2 - c1 - 1)),
                     parse_label(line.substr(c2 + 1))});
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, fmt::format("line {}: {}", line_no, e.what()));
    }
    if (end == text.size()) break;
  }
  return out;
}

std::vector<Prediction> read_prediction_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open prediction log " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prediction_log(buf.str());
}

EvaluationReport evaluate(std::span<const Prediction> records) {
  EvaluationReport r;
  r.confusion = confusion_from_predictions(records);
  for (ClassLabel c : kAllClasses) r.per_class[index_of(c)] = per_class_metrics(r.confusion, c);
  try {
    r.average = class_averaged(r.per_class);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UndefinedInput) throw;
  }
  return r;
}

namespace {

std::string csv_value(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string("NA");
}

std::string table_value(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("   n/a");
}

nlohmann::ordered_json json_metrics(const ClassMetrics& m) {
  nlohmann::ordered_json j;
  auto put = [&j](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  put("sensitivity", m.sensitivity);
  put("specificity", m.specificity);
  put("precision", m.precision);
  put("accuracy", m.accuracy);
  return j;
}

}  // namespace

std::string metrics_csv(const EvaluationReport& report) {
  std::string out = "class,sensitivity,specificity,precision,accuracy\n";
  auto row = [&out](std::string_view name, const ClassMetrics& m) {
    out += fmt::format("{},{},{},{},{}\n", name, csv_value(m.sensitivity),
                       csv_value(m.specificity), csv_value(m.precision), csv_value(m.accuracy));
  };
  for (ClassLabel c : kAllClasses) row(class_name(c), report.per_class[index_of(c)]);
  row("average", report.average.value_or(ClassMetrics{}));
  return out;
}

std::string metrics_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  auto& cm = j["confusion_matrix"];
  cm = nlohmann::ordered_json::array();
  for (int t = 0; t < 3; ++t) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int p = 0; p < 3; ++p) row.push_back(report.confusion(t, p));
    cm.push_back(row);
  }
  auto& per = j["per_class"];
  per = nlohmann::ordered_json::object();
  for (ClassLabel c : kAllClasses)
    per[std::string(class_name(c))] = json_metrics(report.per_class[index_of(c)]);
  j["class_averaged"] = report.average ? json_metrics(*report.average)
                                       : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string metrics_table(const EvaluationReport& report) {
  std::string out = "confusion matrix (rows = true, cols = predicted; 0 = fake, 1 = real, 2 = synthetic)\n";
  for (int t = 0; t < 3; ++t)
    out += fmt::format("  {:>8} {:>8} {:>8}\n", report.confusion(t, 0), report.confusion(t, 1),
                       report.confusion(t, 2));
  out += fmt::format("{:<10} {:>11} {:>11} {:>11} {:>11}\n", "class", "sensitivity",
                     "specificity", "precision", "accuracy");
  auto row = [&out](std::string_view name, const ClassMetrics& m) {
    out += fmt::format("{:<10} {:>11} {:>11} {:>11} {:>11}\n", name, table_value(m.sensitivity),
                       table_value(m.specificity), table_value(m.precision),
                       table_value(m.accuracy));
  };
  for (ClassLabel c : kAllClasses) row(class_name(c), report.per_class[index_of(c)]);
  row("average", report.average.value_or(ClassMetrics{}));
  return out;
}

}  // namespace facestat
