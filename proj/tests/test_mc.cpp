#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "betacop/detail/parallel.hpp"
#include "betacop/mc.hpp"
#include "betacop/rng.hpp"

using namespace betacop;

namespace {

ExperimentConfig basic_config() {
  ExperimentConfig cfg;
  cfg.model = ReferenceCopula::independence();
  cfg.estimators = {EstimatorSpec::parse("empirical"), EstimatorSpec::parse("beta")};
  cfg.n_values = {20};
  cfg.replications = 200;
  cfg.master_seed = 7;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("estimator spec parsing") {
  CHECK(EstimatorSpec::parse("empirical").kind == EstimatorKind::empirical);
  CHECK(EstimatorSpec::parse("checkerboard").kind == EstimatorKind::checkerboard);
  CHECK(EstimatorSpec::parse("beta").kind == EstimatorKind::beta);
  CHECK(EstimatorSpec::parse("oracle").oracle);

  const EstimatorSpec fixed = EstimatorSpec::parse("bernstein=12");
  CHECK(fixed.kind == EstimatorKind::bernstein);
  CHECK(fixed.rule == DegreeRule::fixed);
  CHECK(fixed.fixed_m == 12);
  CHECK(EstimatorSpec::parse("bernstein=n/3").rule == DegreeRule::ceil_n_over_3);
  CHECK(EstimatorSpec::parse("bernstein=jsv").rule == DegreeRule::jsv);

  CHECK_THROWS_AS(EstimatorSpec::parse("kernel"), Error);
  CHECK_THROWS_AS(EstimatorSpec::parse("bernstein=0"), Error);
  CHECK_THROWS_AS(EstimatorSpec::parse("bernstein=abc"), Error);
}

TEST_CASE("n spec parsing") {
  CHECK(parse_n_spec("20:100:10") ==
        std::vector<std::size_t>{20, 30, 40, 50, 60, 70, 80, 90, 100});
  CHECK(parse_n_spec("20,50,100") == std::vector<std::size_t>{20, 50, 100});
  CHECK(parse_n_spec("7") == std::vector<std::size_t>{7});
  CHECK_THROWS_AS(parse_n_spec("abc"), Error);
  CHECK_THROWS_AS(parse_n_spec("10:5:-1"), Error);
}

TEST_CASE("config text parsing") {
  const ExperimentConfig cfg = parse_config_text(
      "# comment\n"
      "model = fgm\n"
      "theta = -1\n"
      "estimators = empirical,beta,bernstein=n/3\n"
      "n = 20,40\n"
      "reps = 100\n"
      "seed = 99\n"
      "cells = 10\n");
  CHECK(cfg.model.family() == Family::fgm);
  CHECK(cfg.model.param() == -1.0);
  CHECK(cfg.estimators.size() == 3);
  CHECK(cfg.n_values == std::vector<std::size_t>{20, 40});
  CHECK(cfg.replications == 100);
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.lre_cells == 10);
  CHECK_THROWS_AS(parse_config_text("n = 10\n"), Error);       // no model
  CHECK_THROWS_AS(parse_config_text("model fgm\n"), Error);    // no '='
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = basic_config();
  cfg.replications = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = basic_config();
  cfg.n_values.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = basic_config();
  cfg.estimators.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("oracle estimator scores exactly zero") {
  ExperimentConfig cfg = basic_config();
  cfg.model = ReferenceCopula::gauss(0.5);
  cfg.estimators = {EstimatorSpec::parse("oracle")};
  const PerformanceReport report = run_measures(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].isb == 0.0);
  CHECK(report.rows[0].ivar == 0.0);
  CHECK(report.rows[0].imse == 0.0);
  CHECK(report.rows[0].se_isb == 0.0);
  CHECK(report.rows[0].se_imse == 0.0);
}

TEST_CASE("measure decomposition holds within noise") {
  ExperimentConfig cfg = basic_config();
  cfg.model = ReferenceCopula::fgm(-1.0);
  cfg.estimators = {EstimatorSpec::parse("empirical"), EstimatorSpec::parse("checkerboard"),
                    EstimatorSpec::parse("beta"), EstimatorSpec::parse("bernstein=n/3")};
  cfg.replications = 500;
  const PerformanceReport report = run_measures(cfg);
  for (const MeasureRow& row : report.rows) {
    const double combined = row.se_isb + row.se_ivar + row.se_imse;
    CHECK(std::abs(row.imse - (row.isb + row.ivar)) <= 3.0 * combined + 1e-12);
    CHECK(row.ivar >= 0.0);
    CHECK(row.imse >= 0.0);
    CHECK(row.isb >= -3.0 * row.se_isb);  // isb may dip below zero only by noise
    CHECK(!row.isb_below_noise);
  }
}

TEST_CASE("reports are bit-identical across reruns") {
  ExperimentConfig cfg = basic_config();
  cfg.estimators.push_back(EstimatorSpec::parse("bernstein=4"));
  const PerformanceReport a = run_measures(cfg);
  const PerformanceReport b = run_measures(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].isb == b.rows[i].isb);
    CHECK(a.rows[i].ivar == b.rows[i].ivar);
    CHECK(a.rows[i].imse == b.rows[i].imse);
    CHECK(a.rows[i].se_imse == b.rows[i].se_imse);
  }
}

TEST_CASE("two-replicate variance estimate matches a direct grid estimate") {
  // Route 1: the paired single-expectation estimator.
  ExperimentConfig cfg;
  cfg.model = ReferenceCopula::independence();
  cfg.estimators = {EstimatorSpec::parse("empirical")};
  cfg.n_values = {50};
  cfg.replications = 5000;
  cfg.master_seed = 1234;
  const PerformanceReport report = run_measures(cfg);
  const double ivar_mc = report.rows[0].ivar;
  const double se_mc = report.rows[0].se_ivar;

  // Route 2: fit 2L independent estimators, average the per-point sample
  // variance over a 21x21 grid, batched for a standard error.
  const std::size_t fits = 2 * cfg.replications;
  std::vector<double> axis;
  for (int k = 0; k <= 20; ++k) axis.push_back(k / 20.0);
  const std::size_t cells = axis.size() * axis.size();
  std::vector<double> values(fits * cells);
  detail::parallel_chunks(fits, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const Sample s = cfg.model.sample(50, derive_seed(777, 0xF1, 0, f));
      const auto ranks = std::make_shared<const RankMatrix>(
          compute_ranks(s, TiePolicy::random, derive_seed(777, 0xF2, 0, f)));
      const CopulaEstimate est(EstimatorKind::empirical, ranks);
      est.eval_grid_accumulate({axis, axis},
                               std::span<double>(values.data() + f * cells, cells), 1.0);
    }
  });
  const std::size_t batches = 50, per_batch = fits / batches;
  std::vector<double> batch_est(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    double cell_sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      double mean = 0.0, m2 = 0.0;
      for (std::size_t f = 0; f < per_batch; ++f) {
        const double x = values[(b * per_batch + f) * cells + c];
        const double delta = x - mean;
        mean += delta / static_cast<double>(f + 1);
        m2 += delta * (x - mean);
      }
      cell_sum += m2 / static_cast<double>(per_batch - 1);
    }
    batch_est[b] = cell_sum / static_cast<double>(cells);
  }
  double grid_mean = 0.0;
  for (double v : batch_est) grid_mean += v;
  grid_mean /= static_cast<double>(batches);
  double grid_var = 0.0;
  for (double v : batch_est) grid_var += (v - grid_mean) * (v - grid_mean);
  const double se_grid = std::sqrt(grid_var / (batches - 1.0) / static_cast<double>(batches));

  const double combined = std::sqrt(se_mc * se_mc + se_grid * se_grid);
  CHECK(std::abs(ivar_mc - grid_mean) <= 3.0 * combined);
}

TEST_CASE("jsv rule on the independence model aborts with a named model") {
  ExperimentConfig cfg = basic_config();
  cfg.estimators = {EstimatorSpec::parse("bernstein=jsv")};
  try {
    run_measures(cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::undefined_bandwidth);
    CHECK(std::string(e.what()).find("indep") != std::string::npos);
  }
}

TEST_CASE("limse of the oracle is zero and of a corner cell is finite") {
  ExperimentConfig cfg = basic_config();
  cfg.model = ReferenceCopula::fgm(-1.0);
  cfg.replications = 400;
  const Box corner{{0.9, 0.9}, {1.0, 1.0}};
  CHECK(run_limse(cfg, EstimatorSpec::parse("oracle"), corner) == 0.0);
  const double v = run_limse(cfg, EstimatorSpec::parse("empirical"), corner);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  const Box bad{{0.5, 0.5}, {0.5, 1.0}};
  CHECK_THROWS_AS(run_limse(cfg, EstimatorSpec::parse("empirical"), bad), Error);
}

TEST_CASE("limse over the whole cube agrees with the two-replicate imse") {
  ExperimentConfig cfg;
  cfg.model = ReferenceCopula::independence();
  cfg.estimators = {EstimatorSpec::parse("empirical")};
  cfg.n_values = {30};
  cfg.replications = 4000;
  cfg.master_seed = 555;
  const PerformanceReport report = run_measures(cfg);
  const Box cube{{0.0, 0.0}, {1.0, 1.0}};
  const LimseEstimate limse = run_limse_detail(cfg, cfg.estimators[0], cube);
  const double combined =
      std::sqrt(report.rows[0].se_imse * report.rows[0].se_imse + limse.se * limse.se);
  CHECK(std::abs(report.rows[0].imse - limse.value) <= 3.0 * combined);
}

TEST_CASE("lre of an estimator against itself is 100 percent everywhere") {
  ExperimentConfig cfg = basic_config();
  cfg.model = ReferenceCopula::fgm(-1.0);
  cfg.estimators = {EstimatorSpec::parse("empirical"), EstimatorSpec::parse("empirical")};
  cfg.replications = 50;
  cfg.lre_cells = 4;
  const LreGrid grid = run_lre_heatmap(cfg);
  REQUIRE(grid.percent.size() == 16);
  for (double v : grid.percent) CHECK(v == 100.0);
}

TEST_CASE("lre configuration errors") {
  ExperimentConfig cfg = basic_config();
  CHECK_THROWS_AS(run_lre_heatmap(cfg), Error);  // cells unset
  cfg.lre_cells = 4;
  cfg.estimators = {EstimatorSpec::parse("beta")};
  CHECK_THROWS_AS(run_lre_heatmap(cfg), Error);  // needs a pair
}

TEST_CASE("study output layout and byte-identical reruns") {
  ExperimentConfig cfg = basic_config();
  cfg.model = ReferenceCopula::fgm(-1.0);
  cfg.estimators = {EstimatorSpec::parse("empirical"), EstimatorSpec::parse("checkerboard"),
                    EstimatorSpec::parse("beta")};
  cfg.n_values = {10, 20};
  cfg.replications = 60;
  cfg.lre_cells = 2;

  const auto base = std::filesystem::temp_directory_path() / "betacop_ut_study";
  std::filesystem::remove_all(base);
  run_study(cfg, (base / "a").string());
  run_study(cfg, (base / "b").string());

  for (const char* name :
       {"fgm_theta-1_isb.csv", "fgm_theta-1_ivar.csv", "fgm_theta-1_imse.csv",
        "fgm_theta-1_lre_n10.csv", "fgm_theta-1_lre_n20.csv", "manifest.txt"}) {
    const auto pa = base / "a" / name;
    const auto pb = base / "b" / name;
    REQUIRE(std::filesystem::exists(pa));
    CHECK(slurp(pa) == slurp(pb));
  }

  // 2 sample sizes x 3 estimators = 6 data rows after the header
  const std::string isb = slurp(base / "a" / "fgm_theta-1_isb.csv");
  CHECK(std::count(isb.begin(), isb.end(), '\n') == 7);
  CHECK(isb.rfind("n,estimator,value,stderr\n", 0) == 0);

  const std::string manifest = slurp(base / "a" / "manifest.txt");
  CHECK(manifest.find("master_seed=7") != std::string::npos);
  CHECK(manifest.find("paired=true") != std::string::npos);
  std::filesystem::remove_all(base);
}

TEST_CASE("paired samples expose per-replicate terms for every estimator") {
  ExperimentConfig cfg = basic_config();
  cfg.replications = 64;
  const MeasureSamples samples = run_measure_samples(cfg, 20);
  REQUIRE(samples.per_estimator.size() == 2);
  for (const auto& triple : samples.per_estimator)
    for (const auto& series : triple) CHECK(series.size() == 64);
  // imse term = isb term + ivar term, replicate by replicate (identity)
  for (const auto& triple : samples.per_estimator)
    for (std::size_t ell = 0; ell < 64; ++ell)
      CHECK(std::abs(triple[2][ell] - triple[0][ell] - triple[1][ell]) < 1e-15);
}
