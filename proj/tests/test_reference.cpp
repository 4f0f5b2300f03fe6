#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "betacop/estimators.hpp"
#include "betacop/reference.hpp"
#include "betacop/rng.hpp"
#include "betacop/special.hpp"

using namespace betacop;

namespace {

std::vector<ReferenceCopula> all_families() {
  return {ReferenceCopula::independence(), ReferenceCopula::fgm(-1.0),
          ReferenceCopula::gauss(0.5), ReferenceCopula::gumbel_tau(0.5)};
}

// Kendall tau by inversion counting (merge sort), O(n log n).
long count_inversions(std::vector<int>& v, std::vector<int>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = (lo + hi) / 2;
  long inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[a] <= v[b])
      tmp[out++] = v[a++];
    else {
      inv += static_cast<long>(mid - a);
      tmp[out++] = v[b++];
    }
  }
  while (a < mid) tmp[out++] = v[a++];
  while (b < hi) tmp[out++] = v[b++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return inv;
}

double kendall_tau(const RankMatrix& r) {
  const std::size_t n = r.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return r(a, 0) < r(b, 0); });
  std::vector<int> second(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) second[i] = r(order[i], 1);
  const long inv = count_inversions(second, tmp, 0, n);
  const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
  return 1.0 - 2.0 * static_cast<double>(inv) / pairs;
}

double spearman_rho(const RankMatrix& r) {
  const std::size_t n = r.rows();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(r(i, 0)) - r(i, 1);
    sum += d * d;
  }
  return 1.0 - 6.0 * sum / (static_cast<double>(n) * (static_cast<double>(n) * n - 1.0));
}

}  // namespace

TEST_CASE("cdf hand values") {
  CHECK(ReferenceCopula::independence().cdf(0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-15));
  // 0.25 + theta * 0.25 * 0.25 at theta = -1
  CHECK(ReferenceCopula::fgm(-1.0).cdf(0.5, 0.5) == doctest::Approx(0.1875).epsilon(1e-15));
  // median-point identity for the normal copula
  const double want = 0.25 + std::asin(0.5) / (2.0 * M_PI);
  CHECK(std::abs(ReferenceCopula::gauss(0.5).cdf(0.5, 0.5) - want) < 1e-9);
}

TEST_CASE("cdf boundary behaviour and Frechet bounds") {
  RngStream rng(101);
  for (const auto& c : all_families()) {
    CHECK(c.cdf(0.0, 0.4) == 0.0);
    CHECK(c.cdf(0.4, 0.0) == 0.0);
    CHECK(c.cdf(1.0, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(c.cdf(0.4, 1.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(c.cdf(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int t = 0; t < 50; ++t) {
      const double u = rng.open01(), v = rng.open01();
      const double value = c.cdf(u, v);
      CHECK(value >= std::max(0.0, u + v - 1.0) - 1e-10);
      CHECK(value <= std::min(u, v) + 1e-10);
    }
  }
  CHECK(ReferenceCopula::gumbel_alpha(1.0).cdf(0.3, 0.6) == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ReferenceCopula::fgm(-1.5), Error);
  CHECK_THROWS_AS(ReferenceCopula::gauss(1.0), Error);
  CHECK_THROWS_AS(ReferenceCopula::gumbel_alpha(0.9), Error);
  CHECK_THROWS_AS(make_reference_copula("frank", 0.5), Error);
  CHECK(make_reference_copula("indep", 0.0).family() == Family::independence);
}

TEST_CASE("partial derivative hand values") {
  const auto ind = ReferenceCopula::independence().partial_derivatives(0.3, 0.8);
  CHECK(ind.dc1 == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(ind.dc2 == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ind.d2c11 == 0.0);
  CHECK(ind.d2c22 == 0.0);

  const auto fgm = ReferenceCopula::fgm(-1.0).partial_derivatives(0.5, 0.5);
  CHECK(fgm.dc1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fgm.d2c11 == doctest::Approx(0.5).epsilon(1e-15));

  // conditional-normal closed form
  const ReferenceCopula g = ReferenceCopula::gauss(0.5);
  const double u1 = 0.35, u2 = 0.6;
  const double x = special::norm_quantile(u1), y = special::norm_quantile(u2);
  const double want = special::norm_cdf((y - 0.5 * x) / std::sqrt(0.75));
  CHECK(g.partial_derivatives(u1, u2).dc1 == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("first derivatives match finite differences of the cdf") {
  RngStream rng(103);
  const double h = 1e-5;
  for (const auto& c : all_families()) {
    for (int t = 0; t < 100; ++t) {
      const double u = 0.05 + 0.9 * rng.open01();
      const double v = 0.05 + 0.9 * rng.open01();
      const auto pd = c.partial_derivatives(u, v);
      const double fd1 = (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h);
      const double fd2 = (c.cdf(u, v + h) - c.cdf(u, v - h)) / (2.0 * h);
      CHECK(std::abs(pd.dc1 - fd1) < 1e-6);
      CHECK(std::abs(pd.dc2 - fd2) < 1e-6);
      CHECK(pd.dc1 >= -1e-12);
      CHECK(pd.dc1 <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("second derivatives match finite differences of the first") {
  RngStream rng(107);
  const double h = 1e-5;
  for (const auto& c : all_families()) {
    for (int t = 0; t < 100; ++t) {
      const double u = 0.08 + 0.84 * rng.open01();
      const double v = 0.08 + 0.84 * rng.open01();
      const auto pd = c.partial_derivatives(u, v);
      const double fd11 =
          (c.partial_derivatives(u + h, v).dc1 - c.partial_derivatives(u - h, v).dc1) / (2.0 * h);
      const double fd22 =
          (c.partial_derivatives(u, v + h).dc2 - c.partial_derivatives(u, v - h).dc2) / (2.0 * h);
      CHECK(std::abs(pd.d2c11 - fd11) < 1e-6 * std::max(1.0, std::abs(pd.d2c11)));
      CHECK(std::abs(pd.d2c22 - fd22) < 1e-6 * std::max(1.0, std::abs(pd.d2c22)));
    }
  }
}

TEST_CASE("samplers reproduce dependence summaries") {
  const std::size_t n = 100000;

  const Sample ind = ReferenceCopula::independence().sample(n, 424242);
  const RankMatrix rind = compute_ranks(ind, TiePolicy::random, 1);
  CHECK(std::abs(kendall_tau(rind)) < 0.01);

  const Sample fgm = ReferenceCopula::fgm(-1.0).sample(n, 424243);
  const RankMatrix rfgm = compute_ranks(fgm, TiePolicy::random, 2);
  CHECK(std::abs(kendall_tau(rfgm) - (-2.0 / 9.0)) < 0.01);

  const Sample gauss = ReferenceCopula::gauss(0.5).sample(n, 424244);
  const RankMatrix rgauss = compute_ranks(gauss, TiePolicy::random, 3);
  const double want_rho = 6.0 / M_PI * std::asin(0.25);
  CHECK(std::abs(spearman_rho(rgauss) - want_rho) < 0.01);
}

TEST_CASE("rank-based empirical cdf of draws tracks the analytic cdf") {
  const std::size_t n = 100000;
  std::uint64_t seed = 51;
  for (const auto& c : all_families()) {
    const Sample s = c.sample(n, seed++);
    const auto ranks = std::make_shared<const RankMatrix>(compute_ranks(s, TiePolicy::random, 7));
    const CopulaEstimate emp(EstimatorKind::empirical, ranks);
    double worst = 0.0;
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b) {
        const double u[2] = {a / 20.0, b / 20.0};
        worst = std::max(worst, std::abs(emp(u) - c.cdf(u)));
      }
    CHECK(worst < 0.01);
  }
}

TEST_CASE("sampling is reproducible from its seed") {
  const ReferenceCopula c = ReferenceCopula::gumbel_tau(0.5);
  const Sample a = c.sample(50, 9001);
  const Sample b = c.sample(50, 9001);
  CHECK(a.values() == b.values());
}

TEST_CASE("bernstein transform fixes the product copula") {
  const ReferenceCopula ind = ReferenceCopula::independence();
  for (int m : {1, 3, 10, 25}) {
    const int degrees[2] = {m, m};
    const double mid[2] = {0.5, 0.5};
    CHECK(ind.bernstein_transform(degrees, mid) == doctest::Approx(0.25).epsilon(1e-12));
    const double edge[2] = {0.0, 0.6};
    CHECK(ind.bernstein_transform(degrees, edge) == 0.0);
  }
}

TEST_CASE("bernstein transform respects the smoothing bias bound") {
  // |B_m(C) - C| <= d / (2 sqrt(m*)) on a grid, spot-checked at m* = 10
  const int degrees[2] = {10, 10};
  for (const auto& c : all_families()) {
    const CoefficientArray a = c.bernstein_coefficients(degrees);
    std::vector<double> axis;
    for (int k = 0; k <= 100; ++k) axis.push_back(k / 100.0);
    const std::vector<double> grid = eval_bernstein_grid(a, {axis, axis});
    double worst = 0.0;
    std::size_t pos = 0;
    for (double x : axis)
      for (double y : axis) worst = std::max(worst, std::abs(grid[pos++] - c.cdf(x, y)));
    CHECK(worst <= 2.0 / (2.0 * std::sqrt(10.0)) + 1e-9);
  }
}

TEST_CASE("jsv degree hand value and scaling") {
  const ReferenceCopula fgm = ReferenceCopula::fgm(-1.0);
  // independent recomputation from the analytic derivatives at (0.5, 0.5)
  const auto pd = fgm.partial_derivatives(0.5, 0.5);
  const double b = 0.5 * (0.25 * pd.d2c11 + 0.25 * pd.d2c22);
  const double V = pd.dc1 * (1 - pd.dc1) * std::sqrt(0.25 / M_PI) +
                   pd.dc2 * (1 - pd.dc2) * std::sqrt(0.25 / M_PI);
  const double m0 = std::pow(4.0 * b * b / V, 2.0 / 3.0) * std::pow(100.0, 2.0 / 3.0);
  CHECK(static_cast<int>(m0) == 12);
  CHECK(fgm.jsv_degree(0.5, 0.5, 100) == 12);

  // multiplying n by 8 multiplies the real-valued degree by 4
  const int m_100 = fgm.jsv_degree(0.5, 0.5, 100);
  const int m_800 = fgm.jsv_degree(0.5, 0.5, 800);
  CHECK(std::abs(m_800 - 4 * m_100) <= 4);
  CHECK(m_800 == 50);
}

TEST_CASE("jsv degree is undefined for the independence copula") {
  const ReferenceCopula ind = ReferenceCopula::independence();
  try {
    ind.jsv_degree(0.5, 0.5, 100);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::undefined_bandwidth);
  }
}

TEST_CASE("jsv degree clamps to one near the boundary") {
  const ReferenceCopula fgm = ReferenceCopula::fgm(-1.0);
  CHECK(fgm.jsv_degree(0.001, 0.001, 20) >= 1);
}
