#include "facestat/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "facestat/error.hpp"

namespace facestat {

bool AnovaResult::f_infinite() const noexcept { return std::isinf(f_stat); }

double ln_gamma(double x) {
  if (!(x > 0) || !std::isfinite(x))
    throw Error(ErrorCode::Domain, fmt::format("ln_gamma: x must be positive and finite, got {}", x));
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
  }
  static constexpr std::array<double, 9> coeff = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  const double z = x - 1.0;
  double series = coeff[0];
  for (std::size_t i = 1; i < coeff.size(); ++i) series += coeff[i] / (z + static_cast<double>(i));
  const double t = z + g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEpsilon) return h;
  }
  throw Error(ErrorCode::NonConvergence,
              fmt::format("reg_inc_beta: no convergence for x={}, a={}, b={}", x, a, b));
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0) || !(b > 0) || !std::isfinite(a) ||
      !std::isfinite(b))
    throw Error(ErrorCode::Domain,
                fmt::format("reg_inc_beta: arguments out of domain (x={}, a={}, b={})", x, a, b));
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_survival(double f, double d1, double d2) {
  if (std::isnan(f) || f < 0.0)
    throw Error(ErrorCode::Domain, fmt::format("f_survival: f must be >= 0, got {}", f));
  if (!(d1 >= 1.0) || !(d2 >= 1.0))
    throw Error(ErrorCode::Domain, "f_survival: degrees of freedom must be >= 1");
  if (f == 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = d2 / (d2 + d1 * f);
  return std::clamp(reg_inc_beta(x, 0.5 * d2, 0.5 * d1), 0.0, 1.0);
}

NegLog neg_log10_capped(double p, double cap) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::Domain, fmt::format("neg_log10_capped: p must lie in [0,1], got {}", p));
  if (!(cap > 0.0)) throw Error(ErrorCode::Domain, "neg_log10_capped: cap must be positive");
  if (p == 0.0) return {cap, true};
  const double v = std::max(0.0, -std::log10(p));
  if (v > cap) return {cap, true};
  return {v, false};
}

AnovaResult one_way_anova(std::span<const SampleGroup> groups, double cap) {
  const std::size_t k = groups.size();
  if (k < 2) throw Error(ErrorCode::DegenerateInput, "ANOVA needs at least two groups");
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.values.empty())
      throw Error(ErrorCode::DegenerateInput, "ANOVA group '" + g.label + "' is empty");
    for (double v : g.values)
      if (!std::isfinite(v))
        throw Error(ErrorCode::DegenerateInput,
                    "ANOVA group '" + g.label + "' contains a non-finite value");
    total += g.values.size();
  }
  if (total <= k)
    throw Error(ErrorCode::DegenerateInput, "ANOVA needs more observations than groups");

  std::vector<double> means(k);
  double grand_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (double v : groups[i].values) s += v;
    grand_sum += s;
    means[i] = s / static_cast<double>(groups[i].values.size());
  }
  const double grand_mean = grand_sum / static_cast<double>(total);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dm = means[i] - grand_mean;
    ss_between += static_cast<double>(groups[i].values.size()) * dm * dm;
    for (double v : groups[i].values) ss_within += (v - means[i]) * (v - means[i]);
  }

  AnovaResult r;
  r.df_between = static_cast<int>(k - 1);
  r.df_within = static_cast<long long>(total - k);
  if (ss_within == 0.0) {
    const bool distinct = std::any_of(means.begin(), means.end(),
                                      [&](double m) { return m != means.front(); });
    r.f_stat = distinct ? std::numeric_limits<double>::infinity() : 0.0;
    r.p_value = distinct ? 0.0 : 1.0;
  } else {
    r.f_stat = (ss_between / r.df_between) / (ss_within / static_cast<double>(r.df_within));
    r.p_value = f_survival(r.f_stat, r.df_between, static_cast<double>(r.df_within));
  }
  const NegLog nl = neg_log10_capped(r.p_value, cap);
  r.neg_log10_p = nl.value;
  r.capped = nl.capped;
  return r;
}

}  // namespace facestat
