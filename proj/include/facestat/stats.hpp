#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace facestat {

/// Substitute for -log10(p) once p has underflowed; just above the
/// -log10 of the smallest positive double.
inline constexpr double kDefaultNegLogCap = 350.0;

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct AnovaResult {
  double f_stat = 0;  ///< +inf when within-group variance is zero and means differ
  int df_between = 0;
  long long df_within = 0;
  double p_value = 1;
  double neg_log10_p = 0;
  bool capped = false;

  bool f_infinite() const noexcept;
};

/// ln Gamma(x) for x > 0 (Lanczos, g = 7).
double ln_gamma(double x);

/// Regularized incomplete beta I_x(a, b), continued fraction with the
/// symmetry swap when x > (a + 1) / (a + b + 2).
double reg_inc_beta(double x, double a, double b);

/// P(F_{d1,d2} > f).
double f_survival(double f, double d1, double d2);

struct NegLog {
  double value = 0;
  bool capped = false;
};

NegLog neg_log10_capped(double p, double cap = kDefaultNegLogCap);

/// Unbalanced one-way ANOVA across at least two groups.
AnovaResult one_way_anova(std::span<const SampleGroup> groups,
                          double cap = kDefaultNegLogCap);

}  // namespace facestat
