#include "betacop/reference.hpp"

#include <cmath>

#include "betacop/rng.hpp"
#include "betacop/special.hpp"

namespace betacop {

using special::norm_cdf;
using special::norm_pdf;
using special::norm_quantile;

ReferenceCopula ReferenceCopula::independence() { return {Family::independence, 0.0}; }

ReferenceCopula ReferenceCopula::fgm(double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) fail(errc::domain_error, "fgm: theta outside [-1,1]");
  return {Family::fgm, theta};
}

ReferenceCopula ReferenceCopula::gauss(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) fail(errc::domain_error, "gauss: rho outside (-1,1)");
  return {Family::gauss, rho};
}

ReferenceCopula ReferenceCopula::gumbel_alpha(double alpha) {
  if (!(alpha >= 1.0)) fail(errc::domain_error, "gumbel: alpha must be >= 1");
  return {Family::gumbel, alpha};
}

ReferenceCopula ReferenceCopula::gumbel_tau(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) fail(errc::domain_error, "gumbel: tau outside [0,1)");
  return gumbel_alpha(1.0 / (1.0 - tau));
}

std::string ReferenceCopula::name() const {
  char buf[64];
  switch (family_) {
    case Family::independence:
      return "indep";
    case Family::fgm:
      std::snprintf(buf, sizeof buf, "fgm_theta%g", param_);
      return buf;
    case Family::gauss:
      std::snprintf(buf, sizeof buf, "gauss_rho%g", param_);
      return buf;
    case Family::gumbel:
      std::snprintf(buf, sizeof buf, "gumbel_tau%g", 1.0 - 1.0 / param_);
      return buf;
  }
  return "?";
}

double ReferenceCopula::cdf(std::span<const double> u) const {
  if (u.size() != 2) fail(errc::dimension_mismatch, "reference cdf: expected a bivariate point");
  return cdf(u[0], u[1]);
}

double ReferenceCopula::cdf(double u1, double u2) const {
  if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0))
    fail(errc::domain_error, "reference cdf: point outside the unit square");
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  if (u1 == 1.0) return u2;
  if (u2 == 1.0) return u1;
  switch (family_) {
    case Family::independence:
      return u1 * u2;
    case Family::fgm:
      return u1 * u2 * (1.0 + param_ * (1.0 - u1) * (1.0 - u2));
    case Family::gauss:
      return special::bivariate_normal_cdf(norm_quantile(u1), norm_quantile(u2), param_);
    case Family::gumbel: {
      const double a = param_;
      const double t1 = -std::log(u1), t2 = -std::log(u2);
      return std::exp(-std::pow(std::pow(t1, a) + std::pow(t2, a), 1.0 / a));
    }
  }
  fail(errc::domain_error, "reference cdf: bad family");
}

ReferenceCopula::Partials ReferenceCopula::partial_derivatives(double u1, double u2) const {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0))
    fail(errc::domain_error, "partial_derivatives: point must be interior");
  switch (family_) {
    case Family::independence:
      return {u2, u1, 0.0, 0.0};
    case Family::fgm: {
      const double th = param_;
      const double dc1 = u2 + th * u2 * (1.0 - u2) * (1.0 - 2.0 * u1);
      const double dc2 = u1 + th * u1 * (1.0 - u1) * (1.0 - 2.0 * u2);
      const double d2c11 = -2.0 * th * u2 * (1.0 - u2);
      const double d2c22 = -2.0 * th * u1 * (1.0 - u1);
      return {dc1, dc2, d2c11, d2c22};
    }
    case Family::gauss: {
      const double rho = param_;
      const double s = std::sqrt(1.0 - rho * rho);
      const double x = norm_quantile(u1), y = norm_quantile(u2);
      const double w1 = (y - rho * x) / s, w2 = (x - rho * y) / s;
      const double dc1 = norm_cdf(w1), dc2 = norm_cdf(w2);
      // d/du1 Phi(w1) with dx/du1 = 1/phi(x)
      const double d2c11 = -rho / s * norm_pdf(w1) / norm_pdf(x);
      const double d2c22 = -rho / s * norm_pdf(w2) / norm_pdf(y);
      return {dc1, dc2, d2c11, d2c22};
    }
    case Family::gumbel: {
      const double a = param_;
      const double t1 = -std::log(u1), t2 = -std::log(u2);
      const double S = std::pow(t1, a) + std::pow(t2, a);
      const double A = std::pow(S, 1.0 / a);
      const double C = std::exp(-A);
      // C_j = C * S^(1/a - 1) t_j^(a-1) / u_j
      const double g1 = std::pow(S, 1.0 / a - 1.0) * std::pow(t1, a - 1.0) / u1;
      const double g2 = std::pow(S, 1.0 / a - 1.0) * std::pow(t2, a - 1.0) / u2;
      const double dc1 = C * g1, dc2 = C * g2;
      // d(g_j)/du_j, with dS/du_j = -a t_j^(a-1)/u_j and dt_j/du_j = -1/u_j
      const double b = 1.0 / a - 1.0;
      auto dg = [&](double t, double u) {
        const double Sb1 = std::pow(S, b - 1.0);
        const double Sb = std::pow(S, b);
        const double tg = std::pow(t, a - 1.0);
        return -(a * b * Sb1 * tg * tg + Sb * std::pow(t, a - 2.0) * ((a - 1.0) + t)) / (u * u);
      };
      const double d2c11 = dc1 * g1 + C * dg(t1, u1);
      const double d2c22 = dc2 * g2 + C * dg(t2, u2);
      return {dc1, dc2, d2c11, d2c22};
    }
  }
  fail(errc::domain_error, "partial_derivatives: bad family");
}

namespace {

// FGM conditional quantile: solve dC/du1 = p for u2 given u1.
double fgm_conditional_inverse(double theta, double u1, double p) {
  const double A = theta * (1.0 - 2.0 * u1);
  if (std::abs(A) < 1e-12) return p;
  // p = u2 (1 + A (1 - u2))  =>  A u2^2 - (1 + A) u2 + p = 0
  const double disc = (1.0 + A) * (1.0 + A) - 4.0 * A * p;
  return (1.0 + A - std::sqrt(std::max(disc, 0.0))) / (2.0 * A);
}

// Gumbel conditional quantile by safeguarded Newton on the h-function,
// which is continuous and strictly increasing in u2.
double gumbel_conditional_inverse(const ReferenceCopula& c, double u1, double p) {
  double lo = 1e-15, hi = 1.0 - 1e-15;
  double x = p;  // independence start
  for (int it = 0; it < 200; ++it) {
    const auto pd = c.partial_derivatives(u1, x);
    const double f = pd.dc1 - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    // dh/du2 = d2 C / du1 du2 (the copula density integrated in neither
    // variable); use a finite-difference slope of h as the Newton slope.
    const double h = 1e-7 * std::max(x, 1e-3);
    const double slope =
        (c.partial_derivatives(u1, std::min(x + h, 1.0 - 1e-16)).dc1 -
         c.partial_derivatives(u1, std::max(x - h, 1e-16)).dc1) /
        (2.0 * h);
    double next = (slope > 0.0) ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-13) return next;
    x = next;
  }
  return x;
}

}  // namespace

Sample ReferenceCopula::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) fail(errc::domain_error, "sample: n must be positive");
  RngStream rng(seed);
  std::vector<double> values(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double v1 = rng.open01();
    const double v2 = rng.open01();
    double u1 = v1, u2 = v2;
    switch (family_) {
      case Family::independence:
        break;
      case Family::fgm:
        u2 = fgm_conditional_inverse(param_, u1, v2);
        break;
      case Family::gauss: {
        const double z1 = norm_quantile(v1);
        const double z2 = param_ * z1 + std::sqrt(1.0 - param_ * param_) * norm_quantile(v2);
        u1 = norm_cdf(z1);
        u2 = norm_cdf(z2);
        break;
      }
      case Family::gumbel:
        u2 = gumbel_conditional_inverse(*this, u1, v2);
        break;
    }
    values[i * 2] = std::min(std::max(u1, 0.0), 1.0);
    values[i * 2 + 1] = std::min(std::max(u2, 0.0), 1.0);
  }
  return Sample(n, 2, std::move(values));
}

CoefficientArray ReferenceCopula::bernstein_coefficients(std::span<const int> degrees) const {
  if (degrees.size() != 2) fail(errc::dimension_mismatch, "bernstein_coefficients: expected 2 degrees");
  const int m1 = degrees[0], m2 = degrees[1];
  if (m1 < 1 || m2 < 1) fail(errc::domain_error, "bernstein_coefficients: degrees must be >= 1");
  return CoefficientArray::from_function(
      std::vector<int>(degrees.begin(), degrees.end()), [&](std::span<const int> s) {
        return cdf(static_cast<double>(s[0]) / m1, static_cast<double>(s[1]) / m2);
      });
}

double ReferenceCopula::bernstein_transform(std::span<const int> degrees,
                                            std::span<const double> u) const {
  return eval_bernstein(bernstein_coefficients(degrees), u);
}

int ReferenceCopula::jsv_degree(double u1, double u2, std::size_t n) const {
  if (family_ == Family::independence)
    fail(errc::undefined_bandwidth,
         "jsv degree undefined for " + name() + ": curvature term b vanishes identically");
  const Partials pd = partial_derivatives(u1, u2);
  const double b =
      0.5 * (u1 * (1.0 - u1) * pd.d2c11 + u2 * (1.0 - u2) * pd.d2c22);
  const double V = pd.dc1 * (1.0 - pd.dc1) * std::sqrt(u1 * (1.0 - u1) / M_PI) +
                   pd.dc2 * (1.0 - pd.dc2) * std::sqrt(u2 * (1.0 - u2) / M_PI);
  if (b == 0.0 || !(V > 0.0))
    fail(errc::undefined_bandwidth, "jsv degree undefined for " + name() + " at this point");
  const double m0 = std::pow(4.0 * b * b / V, 2.0 / 3.0) * std::pow(static_cast<double>(n), 2.0 / 3.0);
  if (m0 < 1.0) return 1;
  return static_cast<int>(m0);
}

ReferenceCopula make_reference_copula(const std::string& family, double param) {
  if (family == "indep" || family == "independence") return ReferenceCopula::independence();
  if (family == "fgm") return ReferenceCopula::fgm(param);
  if (family == "gauss" || family == "gaussian") return ReferenceCopula::gauss(param);
  if (family == "gumbel") return ReferenceCopula::gumbel_tau(param);
  fail(errc::config_error, "unknown copula family: " + family);
}

}  // namespace betacop
