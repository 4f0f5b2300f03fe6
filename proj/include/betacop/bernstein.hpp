#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "betacop/types.hpp"

namespace betacop {

/// Dense d-dimensional array, row-major with the last axis fastest.
struct NdArray {
  std::vector<int> extents;
  std::vector<double> values;

  NdArray() = default;
  explicit NdArray(std::vector<int> ext);
  NdArray(std::vector<int> ext, std::vector<double> vals);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t offset(std::span<const int> idx) const;
  double at(std::span<const int> idx) const { return values[offset(idx)]; }
  double& at(std::span<const int> idx) { return values[offset(idx)]; }
};

/// Odometer step over a multi-index box prod {0..extents[j]-1}.
/// Returns false once the index wraps back to all zeros.
bool next_index(std::span<int> idx, std::span<const int> extents);

/// Bernstein coefficient array: degrees m (all >= 1), extents m_j + 1.
class CoefficientArray {
public:
  CoefficientArray(std::vector<int> degrees, std::vector<double> values);

  static CoefficientArray from_function(
      std::vector<int> degrees,
      const std::function<double(std::span<const int>)>& fn);

  std::size_t dim() const noexcept { return degrees_.size(); }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  const NdArray& array() const noexcept { return array_; }
  double at(std::span<const int> idx) const { return array_.at(idx); }

private:
  std::vector<int> degrees_;
  NdArray array_;
};

/// p_{m,s}(u) = binom(m, s) u^s (1-u)^{m-s}. Exact products up to m = 50,
/// log-gamma evaluation above.
double bernstein_basis(int m, int s, double u);

/// All of p_{m,0..m}(u) in one pass (stable outward recurrence from the
/// modal index). out must have m + 1 slots.
void bernstein_basis_row(int m, double u, std::span<double> out);

/// B_m(a)(u) = sum_s a_s prod_j p_{m_j, s_j}(u_j).
double eval_bernstein(const CoefficientArray& a, std::span<const double> u);

/// B_m(a) over the tensor grid spanned by axis_grids, row-major with the
/// last axis fastest. One basis-matrix contraction per axis.
std::vector<double> eval_bernstein_grid(const CoefficientArray& a,
                                        const std::vector<std::vector<double>>& axis_grids);

/// Composed finite differences along the given distinct 0-based axes.
/// Differenced axes shrink from m_j + 1 to m_j entries; slot k along such an
/// axis holds the difference at s_j = k + 1.
NdArray difference(const NdArray& a, std::span<const int> axes);

struct ValidityReport {
  struct Witness {
    std::vector<int> index;
    double value;
  };
  bool grounded = true;            // C.1
  bool uniform_margins = true;     // C.2
  bool nonneg_differences = true;  // C.3
  std::vector<Witness> c1_witnesses;
  std::vector<Witness> c2_witnesses;
  std::vector<Witness> c3_witnesses;

  bool all_ok() const noexcept { return grounded && uniform_margins && nonneg_differences; }
};

/// Checks the three coefficient conditions for B_m(a) to be a copula:
/// C.1 zero whenever some s_j = 0, C.2 edge values s_j/m_j, C.3 nonnegative
/// full mixed differences. Absolute tolerance 1e-12; at most 100 witnesses
/// are recorded per condition.
ValidityReport check_copula_conditions(const CoefficientArray& a);

/// Mixed partial d^d B_m(a) / du_1 ... du_d at a strictly interior point,
/// via the difference-operator expansion.
double mixed_partial(const CoefficientArray& a, std::span<const double> u);

/// sum_{r=1}^{n} (a_r - a_{r-1}) n p_{n-1, r-1}(t), the summation-by-parts
/// form of sum_r a_r p'_{n,r}(t). a has n + 1 entries.
double derivative_identity_rhs(std::span<const double> a, double t);

/// CSV round-trip: one line per multi-index, "s_1,...,s_d,value", row-major.
CoefficientArray read_coefficients_csv(const std::string& path);
void write_coefficients_csv(const CoefficientArray& a, const std::string& path);

}  // namespace betacop
