#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "facestat/error.hpp"
#include "facestat/stats.hpp"
#include "oracles.hpp"

using namespace facestat;

namespace {

std::vector<SampleGroup> groups_of(const std::vector<std::vector<double>>& raw) {
  std::vector<SampleGroup> out;
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back({std::to_string(i), raw[i]});
  return out;
}

AnovaResult run(const std::vector<std::vector<double>>& raw) {
  const auto g = groups_of(raw);
  return one_way_anova(g);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Parse;
}

}  // namespace

TEST_CASE("ln_gamma") {
  CHECK(std::abs(ln_gamma(1.0)) <= 1e-15);
  CHECK(std::abs(ln_gamma(2.0)) <= 1e-15);
  CHECK(ln_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-13));
  CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(std::acos(-1.0))).epsilon(1e-13));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 200.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(ln_gamma(x + 1) - ln_gamma(x) == doctest::Approx(std::log(x)).epsilon(1e-11));
    CHECK(ln_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
  }
  CHECK(code_of([] { ln_gamma(0.0); }) == ErrorCode::Domain);
  CHECK(code_of([] { ln_gamma(-1.5); }) == ErrorCode::Domain);
}

TEST_CASE("reg_inc_beta") {
  for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(reg_inc_beta(x, 1, 1) - x) <= 1e-14);
  for (double a : {0.5, 1.0, 3.0, 10.0}) CHECK(std::abs(reg_inc_beta(0.5, a, a) - 0.5) <= 1e-13);

  // P(Bin(6, 0.3) >= 2) = 1 - 0.7^6 - 6 * 0.3 * 0.7^5
  const double binom = 1 - std::pow(0.7, 6) - 6 * 0.3 * std::pow(0.7, 5);
  CHECK(std::abs(reg_inc_beta(0.3, 2, 5) - binom) <= 1e-13);
  CHECK(std::abs(reg_inc_beta(0.3, 2, 5) - oracle::reg_inc_beta_quadrature(0.3, 2, 5)) <= 1e-10);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.001, 0.999);
  std::uniform_real_distribution<double> ua(0.5, 60.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), a = ua(rng), b = ua(rng);
    const double v = reg_inc_beta(x, a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(v + reg_inc_beta(1 - x, b, a) - 1.0) <= 1e-12);
    CHECK(std::abs(v - oracle::reg_inc_beta_quadrature(x, a, b)) <= 1e-10);
    CHECK(reg_inc_beta(std::min(x + 0.01, 1.0), a, b) >= v);
  }

  CHECK(code_of([] { reg_inc_beta(-0.1, 1, 1); }) == ErrorCode::Domain);
  CHECK(code_of([] { reg_inc_beta(1.1, 1, 1); }) == ErrorCode::Domain);
  CHECK(code_of([] { reg_inc_beta(0.5, 0, 1); }) == ErrorCode::Domain);
  CHECK(code_of([] { reg_inc_beta(0.5, 1, -2); }) == ErrorCode::Domain);
}

TEST_CASE("f_survival") {
  CHECK(f_survival(0.0, 3, 7) == 1.0);
  CHECK(std::abs(f_survival(3.0, 2, 6) - 0.125) <= 1e-14);
  for (double d : {1.0, 2.0, 5.0, 30.0, 1000.0}) CHECK(std::abs(f_survival(1.0, d, d) - 0.5) <= 1e-12);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uf(0.0, 40.0);
  for (int i = 0; i < 50; ++i) {
    const double f = uf(rng);
    const double d2 = 1 + static_cast<double>(rng() % 400);
    CHECK(std::abs(f_survival(f, 2, d2) - std::pow(1 + 2 * f / d2, -d2 / 2)) <= 1e-12);
  }

  double prev = 1.0;
  for (double f = 0.1; f < 100; f *= 1.5) {
    const double v = f_survival(f, 3, 20);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(f_survival(1e12, 2, 100) < 1e-100);
  CHECK(f_survival(std::numeric_limits<double>::infinity(), 2, 5) == 0.0);
  CHECK(code_of([] { f_survival(-1.0, 2, 5); }) == ErrorCode::Domain);
  CHECK(code_of([] { f_survival(1.0, 0, 5); }) == ErrorCode::Domain);
}

TEST_CASE("neg_log10_capped") {
  CHECK(neg_log10_capped(1.0).value == 0.0);
  CHECK_FALSE(neg_log10_capped(1.0).capped);
  CHECK(neg_log10_capped(0.0).value == kDefaultNegLogCap);
  CHECK(neg_log10_capped(0.0).capped);
  CHECK(neg_log10_capped(1e-6, 350).value == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_FALSE(neg_log10_capped(1e-6, 350).capped);
  CHECK(neg_log10_capped(1e-20, 10).value == 10.0);
  CHECK(neg_log10_capped(1e-20, 10).capped);
  CHECK(neg_log10_capped(std::numeric_limits<double>::denorm_min()).value < kDefaultNegLogCap);
  CHECK(code_of([] { neg_log10_capped(1.5); }) == ErrorCode::Domain);
  CHECK(code_of([] { neg_log10_capped(-0.1); }) == ErrorCode::Domain);
  CHECK(code_of([] { neg_log10_capped(0.5, 0.0); }) == ErrorCode::Domain);
}

TEST_CASE("one_way_anova on hand-checked groups") {
  const auto same = run({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  CHECK(same.f_stat == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(same.neg_log10_p == 0.0);
  CHECK_FALSE(same.capped);

  const auto shifted = run({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
  CHECK(shifted.f_stat == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(shifted.p_value - 0.125) <= 1e-14);
  CHECK(shifted.df_between == 2);
  CHECK(shifted.df_within == 6);
  CHECK(shifted.neg_log10_p == doctest::Approx(-std::log10(0.125)).epsilon(1e-14));
}

TEST_CASE("one_way_anova against the quadrature oracle") {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> n01(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<double>> raw(k);
    for (int g = 0; g < k; ++g) {
      const int n = 3 + static_cast<int>(rng() % 28);
      const double shift = 0.5 * n01(rng);
      for (int i = 0; i < n; ++i) raw[g].push_back(50 + 10 * (n01(rng) + shift));
    }
    const auto got = run(raw);
    const auto want = oracle::anova(raw);
    CHECK(got.f_stat == doctest::Approx(want.f).epsilon(1e-10));
    CHECK(std::abs(got.p_value - want.p) <= 1e-9);
  }
}

TEST_CASE("one_way_anova invariances") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n01(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> raw(3);
    for (auto& g : raw)
      for (int i = 0; i < 12; ++i) g.push_back(n01(rng) + 0.3 * (&g - raw.data()));
    const auto base = run(raw);

    auto affine = raw;
    for (auto& g : affine)
      for (double& v : g) v = 7.5 * v - 120.0;
    CHECK(run(affine).f_stat == doctest::Approx(base.f_stat).epsilon(1e-9));

    auto reordered = raw;
    std::swap(reordered[0], reordered[2]);
    for (auto& g : reordered) std::reverse(g.begin(), g.end());
    CHECK(run(reordered).f_stat == doctest::Approx(base.f_stat).epsilon(1e-12));
    CHECK(run(reordered).p_value == doctest::Approx(base.p_value).epsilon(1e-12));
    CHECK(base.p_value >= 0.0);
    CHECK(base.p_value <= 1.0);
  }
}

TEST_CASE("one_way_anova degenerate inputs") {
  CHECK(code_of([] { run({{1, 2, 3}}); }) == ErrorCode::DegenerateInput);
  CHECK(code_of([] { run({{1, 2, 3}, {}}); }) == ErrorCode::DegenerateInput);
  // Two groups of one sample each leave no within-group degrees of freedom.
  CHECK(code_of([] { run({{1}, {2}}); }) == ErrorCode::DegenerateInput);
  CHECK(code_of([] {
          run({{1, std::numeric_limits<double>::quiet_NaN()}, {2, 3}});
        }) == ErrorCode::DegenerateInput);

  const auto split = run({{4, 4, 4}, {9, 9, 9}});
  CHECK(split.f_infinite());
  CHECK(split.p_value == 0.0);
  CHECK(split.capped);
  CHECK(split.neg_log10_p == kDefaultNegLogCap);

  const auto flat = run({{4, 4}, {4, 4, 4}});
  CHECK(flat.f_stat == 0.0);
  CHECK(flat.p_value == 1.0);
  CHECK_FALSE(flat.capped);
}

TEST_CASE("one_way_anova p-values under the null stay calibrated") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01(0, 1);
  int rejections = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<double>> raw(3, std::vector<double>(40));
    for (auto& g : raw)
      for (double& v : g) v = n01(rng);
    if (run(raw).p_value < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / trials;
  CHECK(rate > 0.02);
  CHECK(rate < 0.08);
}
