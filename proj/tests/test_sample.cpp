#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "betacop/rng.hpp"
#include "betacop/types.hpp"

using namespace betacop;

namespace {

Sample column(std::vector<double> v) {
  const std::size_t n = v.size();
  return Sample(n, 1, std::move(v));
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("ranks of a strictly ordered column follow the counting definition") {
  const RankMatrix r = compute_ranks(column({3.1, 1.2, 2.7}), TiePolicy::error_on_ties);
  CHECK(r(0, 0) == 3);
  CHECK(r(1, 0) == 1);
  CHECK(r(2, 0) == 2);
  CHECK(!r.tie_seed().has_value());
}

TEST_CASE("single observation gets rank 1") {
  const RankMatrix r = compute_ranks(column({5.0}), TiePolicy::error_on_ties);
  CHECK(r(0, 0) == 1);
}

TEST_CASE("sorted column ranks to 1..n") {
  std::vector<double> v(20);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 3.0;
  const RankMatrix r = compute_ranks(column(v), TiePolicy::error_on_ties);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(r(i, 0) == static_cast<int>(i) + 1);
}

TEST_CASE("ranks are invariant under strictly increasing transforms") {
  RngStream rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(31);
    for (double& x : v) x = rng.open01() * 4.0 - 2.0;
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::exp(2.0 * v[i]) + v[i];
    const RankMatrix a = compute_ranks(column(v), TiePolicy::error_on_ties);
    const RankMatrix b = compute_ranks(column(std::move(w)), TiePolicy::error_on_ties);
    CHECK(a.ranks() == b.ranks());
  }
}

TEST_CASE("tie policy error refuses duplicated values") {
  CHECK_THROWS_AS(compute_ranks(column({2.0, 2.0}), TiePolicy::error_on_ties), Error);
  try {
    compute_ranks(column({1.0, 1.0, 2.0}), TiePolicy::error_on_ties);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::ties_present);
  }
}

TEST_CASE("random tie-breaking splits a pair evenly across seeds") {
  int first_low = 0;
  const int runs = 10000;
  for (int seed = 0; seed < runs; ++seed) {
    const RankMatrix r = compute_ranks(column({2.0, 2.0}), TiePolicy::random, seed);
    const int a = r(0, 0), b = r(1, 0);
    CHECK(a + b == 3);  // always a permutation of {1,2}
    first_low += (a == 1);
    if (seed == 0) CHECK(r.tie_seed().has_value());
  }
  const double freq = static_cast<double>(first_low) / runs;
  CHECK(std::abs(freq - 0.5) < 0.02);
}

TEST_CASE("tied-block assignment is uniform (chi-square, 3x3 contingency)") {
  // Column with a 3-way tie; counts[element][rank-1] over seeded runs.
  const int runs = 10000;
  long counts[3][3] = {};
  for (int seed = 0; seed < runs; ++seed) {
    const RankMatrix r = compute_ranks(column({7.0, 7.0, 7.0, 9.0}), TiePolicy::random, seed);
    for (int i = 0; i < 3; ++i) counts[i][r(i, 0) - 1]++;
    CHECK(r(3, 0) == 4);
  }
  const double expected = runs / 3.0;
  double chi2 = 0.0;
  for (auto& row : counts)
    for (long c : row) chi2 += (c - expected) * (c - expected) / expected;
  // df = (3-1)(3-1) = 4; p > 0.001 <=> chi2 below the 0.999 quantile
  CHECK(chi2 < 18.467);
}

TEST_CASE("tie-breaking is replayable from its seed") {
  const Sample s = column({1.0, 1.0, 1.0, 1.0, 1.0, 3.0});
  const RankMatrix a = compute_ranks(s, TiePolicy::random, 99);
  const RankMatrix b = compute_ranks(s, TiePolicy::random, 99);
  CHECK(a.ranks() == b.ranks());
}

TEST_CASE("sample construction rejects non-finite entries") {
  CHECK_THROWS_AS(Sample(1, 2, {1.0, std::nan("")}), Error);
  try {
    Sample(1, 1, {std::numeric_limits<double>::infinity()});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_finite_input);
  }
}

TEST_CASE("rank matrix rejects columns that are not permutations") {
  CHECK_THROWS_AS(RankMatrix(2, 1, {1, 1}), Error);
  CHECK_THROWS_AS(RankMatrix(2, 1, {0, 1}), Error);
  CHECK_THROWS_AS(RankMatrix(2, 1, {1, 3}), Error);
}

TEST_CASE("csv reader parses plain rows") {
  const auto path = write_temp("betacop_ut_basic.csv", "0.1,0.2\n0.3,0.4\n");
  const Sample s = read_sample_csv(path.string(), false);
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 2);
  CHECK(s(1, 0) == doctest::Approx(0.3));
  std::filesystem::remove(path);
}

TEST_CASE("csv reader skips a header when told to") {
  const auto path = write_temp("betacop_ut_header.csv", "x,y\n0.5,0.25\n");
  const Sample s = read_sample_csv(path.string(), true);
  CHECK(s.rows() == 1);
  CHECK(s(0, 1) == doctest::Approx(0.25));
  std::filesystem::remove(path);
}

TEST_CASE("csv reader fails cleanly on bad inputs") {
  const auto empty = write_temp("betacop_ut_empty.csv", "");
  CHECK_THROWS_AS(read_sample_csv(empty.string(), false), Error);

  const auto ragged = write_temp("betacop_ut_ragged.csv", "1,2\n3\n");
  try {
    read_sample_csv(ragged.string(), false);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
  }

  const auto junk = write_temp("betacop_ut_junk.csv", "1,abc\n");
  CHECK_THROWS_AS(read_sample_csv(junk.string(), false), Error);

  CHECK_THROWS_AS(read_sample_csv("/nonexistent/betacop.csv", false), Error);
  for (const auto& p : {empty, ragged, junk}) std::filesystem::remove(p);
}
