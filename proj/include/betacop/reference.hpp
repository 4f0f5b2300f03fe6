#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "betacop/bernstein.hpp"
#include "betacop/types.hpp"

namespace betacop {

enum class Family { independence, fgm, gauss, gumbel };

/// Exact bivariate copula models for the simulation study: CDF, first and
/// second partial derivatives, sampler, and the Bernstein transform.
class ReferenceCopula {
public:
  static ReferenceCopula independence();
  static ReferenceCopula fgm(double theta);         // theta in [-1, 1]
  static ReferenceCopula gauss(double rho);         // rho in (-1, 1)
  static ReferenceCopula gumbel_alpha(double alpha);  // alpha >= 1
  static ReferenceCopula gumbel_tau(double tau);      // alpha = 1 / (1 - tau)

  Family family() const noexcept { return family_; }
  double param() const noexcept { return param_; }
  std::size_t dim() const noexcept { return 2; }
  std::string name() const;

  double cdf(std::span<const double> u) const;
  double cdf(double u1, double u2) const;

  struct Partials {
    double dc1, dc2;    // dC/du1, dC/du2
    double d2c11, d2c22;  // second derivatives in the same coordinate
  };
  Partials partial_derivatives(double u1, double u2) const;

  /// n iid draws with uniform margins; conditional inversion for fgm and
  /// gumbel, correlated normals for gauss. Reproducible given the seed.
  Sample sample(std::size_t n, std::uint64_t seed) const;

  /// Coefficient array a_s = C(s/m).
  CoefficientArray bernstein_coefficients(std::span<const int> degrees) const;

  /// B_m(C)(u) via the coefficient-array route.
  double bernstein_transform(std::span<const int> degrees, std::span<const double> u) const;

  /// Degree rule m0 = {4 b^2 / V}^{2/3} n^{2/3} from the true derivatives,
  /// truncated and clamped to >= 1. Undefined when b or V vanish (notably
  /// the independence copula, where the curvature term is identically 0).
  int jsv_degree(double u1, double u2, std::size_t n) const;

private:
  ReferenceCopula(Family f, double p) : family_(f), param_(p) {}
  Family family_;
  double param_;
};

/// Parses "indep" / "fgm" / "gauss" / "gumbel" plus its parameter.
ReferenceCopula make_reference_copula(const std::string& family, double param);

}  // namespace betacop
