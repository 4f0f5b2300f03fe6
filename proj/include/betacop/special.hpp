#pragma once

#include <functional>

namespace betacop::special {

/// log of binomial(n, k).
double log_binomial(int n, int k);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// Inverse of I_x(a, b) in x for p in [0, 1].
double reg_inc_beta_inv(double a, double b, double p);

/// Standard normal CDF / density / quantile.
double norm_cdf(double x);
double norm_pdf(double x);
double norm_quantile(double p);

/// Adaptive Gauss-Kronrod (G7, K15) on [a, b], absolute-error target tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

/// Standard bivariate normal CDF P(X <= x, Y <= y) at correlation rho,
/// computed by quadrature of the conditioning integral
///   int_{-inf}^{x} phi(t) Phi((y - rho t) / sqrt(1 - rho^2)) dt,
/// absolute error below 1e-10.
double bivariate_normal_cdf(double x, double y, double rho);

}  // namespace betacop::special
