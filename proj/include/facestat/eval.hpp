#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace facestat {

/// Integer encoding used by prediction logs.
enum class ClassLabel : int { Fake = 0, Real = 1, Synthetic = 2 };

inline constexpr std::array<ClassLabel, 3> kAllClasses = {
    ClassLabel::Fake, ClassLabel::Real, ClassLabel::Synthetic};

std::string_view class_name(ClassLabel c) noexcept;
/// "fake" / "real" / "synthetic"; throws Error(Parse) otherwise.
ClassLabel class_from_name(std::string_view name);
/// 0 / 1 / 2; throws Error(Parse) otherwise.
ClassLabel class_from_int(long long value);

inline int index_of(ClassLabel c) noexcept { return static_cast<int>(c); }

/// counts(true, predicted).
using ConfusionMatrix3 = Eigen::Matrix<std::int64_t, 3, 3, Eigen::RowMajor>;

/// Missing value = zero denominator.
struct ClassMetrics {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> accuracy;
};

struct Prediction {
  std::string image_path;
  ClassLabel truth = ClassLabel::Fake;
  ClassLabel predicted = ClassLabel::Fake;
};

ConfusionMatrix3 confusion_from_predictions(std::span<const Prediction> records);

/// One-vs-rest metrics for class c.
ClassMetrics per_class_metrics(const ConfusionMatrix3& cm, ClassLabel c);

/// Unweighted mean over the three classes; throws UndefinedInput when any
/// field is missing.
ClassMetrics class_averaged(std::span<const ClassMetrics, 3> metrics);

/// Prediction log: one "image_path,true_label,predicted_label" per line, an
/// optional header line, blank lines ignored. Errors carry the line number.
std::vector<Prediction> parse_prediction_log(std::string_view text);
std::vector<Prediction> read_prediction_log(const std::string& path);

struct EvaluationReport {
  ConfusionMatrix3 confusion;
  std::array<ClassMetrics, 3> per_class;
  std::optional<ClassMetrics> average;  ///< absent when a per-class value is undefined
};

EvaluationReport evaluate(std::span<const Prediction> records);

std::string metrics_csv(const EvaluationReport& report);
std::string metrics_json(const EvaluationReport& report);
/// Human-readable table with four decimals.
std::string metrics_table(const EvaluationReport& report);

}  // namespace facestat
