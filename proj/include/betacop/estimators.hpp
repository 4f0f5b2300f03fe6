#pragma once

#include <memory>
#include <span>
#include <vector>

#include "betacop/bernstein.hpp"
#include "betacop/types.hpp"

namespace betacop {

/// F_{n,r}(u) = P(U_{r:n} <= u), the Beta(r, n+1-r) CDF. Literal binomial
/// tail sum up to n = 30, regularized incomplete beta above.
double beta_cdf(int n, int r, double u);

/// Literal binomial tail sum route, any n (cross-check path).
double beta_cdf_series(int n, int r, double u);

/// Fills out[r-1] = F_{n,r}(u) for r = 1..n in one O(n) pass.
void beta_cdf_table(int n, double u, std::span<double> out);

enum class EstimatorKind { empirical, checkerboard, beta, bernstein };

/// Empirical-copula values on the multiples-of-1/m grid, a_s = C_n(s/m),
/// computed with integer thresholds (no floating-point grid comparisons).
CoefficientArray empirical_coefficients(const RankMatrix& ranks, std::span<const int> degrees);

/// Point evaluators for the four estimators.
double empirical_copula(const RankMatrix& ranks, std::span<const double> u);
double checkerboard_copula(const RankMatrix& ranks, std::span<const double> u);
double beta_copula(const RankMatrix& ranks, std::span<const double> u);
double bernstein_copula(const RankMatrix& ranks, std::span<const int> degrees,
                        std::span<const double> u);

/// True iff every m_j divides n (the degrees for which the smoothed
/// empirical estimator is a genuine copula).
bool is_genuine_copula_degrees(long n, std::span<const int> degrees);

/// One fitted estimator bundling kind, ranks and degrees. Bernstein
/// coefficients are computed once at construction. Evaluation is pure and
/// safe for concurrent callers.
class CopulaEstimate {
public:
  CopulaEstimate(EstimatorKind kind, std::shared_ptr<const RankMatrix> ranks,
                 std::vector<int> degrees = {});

  EstimatorKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return ranks_->rows(); }
  std::size_t dim() const noexcept { return ranks_->cols(); }
  const RankMatrix& ranks() const noexcept { return *ranks_; }
  const std::vector<int>& degrees() const noexcept { return degrees_; }

  double operator()(std::span<const double> u) const;

  /// Accumulates scale * estimate(u) over the tensor grid spanned by
  /// axis_grids (row-major, last axis fastest) into acc.
  void eval_grid_accumulate(const std::vector<std::vector<double>>& axis_grids,
                            std::span<double> acc, double scale) const;

  std::vector<double> eval_grid(const std::vector<std::vector<double>>& axis_grids) const;

private:
  EstimatorKind kind_;
  std::shared_ptr<const RankMatrix> ranks_;
  std::vector<int> degrees_;
  std::shared_ptr<const CoefficientArray> coeffs_;  // bernstein only
};

/// max |f(u) - g(u)| over the closed regular grid with grid_points_per_axis
/// points per axis, augmented with the jump locations r/n of any
/// empirical-kind argument.
double sup_distance(const CopulaEstimate& f, const CopulaEstimate& g,
                    int grid_points_per_axis);

}  // namespace betacop
