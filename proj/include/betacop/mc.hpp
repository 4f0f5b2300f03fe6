#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "betacop/estimators.hpp"
#include "betacop/reference.hpp"

namespace betacop {

enum class DegreeRule { none, fixed, ceil_n_over_3, jsv };

/// One estimator under study. "oracle" plugs in the true copula itself
/// (zero-error reference for harness diagnostics). For the bernstein kind a
/// degree rule is required; jsv re-evaluates the degree at each replicate's
/// evaluation point from the true derivatives.
struct EstimatorSpec {
  std::string label;
  bool oracle = false;
  EstimatorKind kind = EstimatorKind::empirical;
  DegreeRule rule = DegreeRule::none;
  int fixed_m = 0;

  /// Tokens: empirical | checkerboard | beta | oracle |
  ///         bernstein=<m> | bernstein=n/3 | bernstein=jsv
  static EstimatorSpec parse(const std::string& token);
};

struct ExperimentConfig {
  ReferenceCopula model = ReferenceCopula::independence();
  std::vector<EstimatorSpec> estimators;
  std::vector<std::size_t> n_values;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  int lre_cells = 0;

  void validate() const;
};

struct MeasureRow {
  std::string estimator;
  std::size_t n = 0;
  double isb = 0, ivar = 0, imse = 0;
  double se_isb = 0, se_ivar = 0, se_imse = 0;
  bool isb_below_noise = false;  // isb < -3 se_isb
};

struct PerformanceReport {
  std::string model;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<MeasureRow> rows;
};

/// Per-replicate contribution triples, one entry per estimator spec;
/// index 0/1/2 = isb/ivar/imse terms. All estimators see the same two
/// simulated samples and the same evaluation point within a replicate
/// (common random numbers), which is what makes paired comparisons tight.
struct MeasureSamples {
  std::vector<std::array<std::vector<double>, 3>> per_estimator;
};

MeasureSamples run_measure_samples(const ExperimentConfig& cfg, std::size_t n);

/// Integrated squared bias / variance / MSE via the two-replicate
/// single-expectation identities, with Monte Carlo standard errors.
/// Deterministic given master_seed, independent of worker count.
PerformanceReport run_measures(const ExperimentConfig& cfg);

/// Axis-aligned box inside the unit cube.
struct Box {
  std::vector<double> lo, hi;
};

/// Localized integrated MSE on the box: mean of squared errors at points
/// uniform on B, one freshly fitted estimator per replicate. Uses
/// cfg.n_values.front() as the sample size.
double run_limse(const ExperimentConfig& cfg, const EstimatorSpec& est, const Box& cell);

struct LimseEstimate {
  double value = 0;
  double se = 0;
};
LimseEstimate run_limse_detail(const ExperimentConfig& cfg, const EstimatorSpec& est,
                               const Box& cell);

/// Localized relative efficiency heatmap, cells x cells over the unit
/// square: 100% x LIMSE(first spec) / LIMSE(second spec) per cell, with the
/// fitted replicates shared across cells. percent is row-major in (j, k).
struct LreGrid {
  int cells = 0;
  std::vector<double> percent;
};
LreGrid run_lre_heatmap(const ExperimentConfig& cfg);

/// Orchestrates the study: one CSV per measure (n, estimator, value,
/// stderr), optional LRE heatmap CSVs, and a manifest recording seeds and
/// settings. Reruns with the same master_seed are byte-identical.
void run_study(const ExperimentConfig& cfg, const std::string& out_dir);

/// Flat key=value config text ('#' comments). Keys: model, theta|rho|tau,
/// estimators, n, reps, seed, cells.
ExperimentConfig parse_config_text(const std::string& text);

/// "20:100:10" (from:to:step), "20,50,100", or a single value.
std::vector<std::size_t> parse_n_spec(const std::string& spec);

}  // namespace betacop
