#include "betacop/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "betacop/detail/parallel.hpp"
#include "betacop/special.hpp"

namespace betacop {

namespace {

void check_r_u(int n, int r, double u) {
  if (n < 1 || r < 1 || r > n) fail(errc::domain_error, "beta_cdf: r outside 1..n");
  if (!(u >= 0.0 && u <= 1.0)) fail(errc::domain_error, "beta_cdf: u outside [0,1]");
}

}  // namespace

double beta_cdf_series(int n, int r, double u) {
  check_r_u(n, r, u);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  double acc = 0.0;
  for (int s = r; s <= n; ++s) acc += bernstein_basis(n, s, u);
  return std::min(acc, 1.0);
}

double beta_cdf(int n, int r, double u) {
  check_r_u(n, r, u);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (n <= 30) return beta_cdf_series(n, r, u);
  // P(Bin(n,u) >= r) = I_u(r, n - r + 1)
  return special::reg_inc_beta(r, n - r + 1.0, u);
}

void beta_cdf_table(int n, double u, std::span<double> out) {
  if (n < 1) fail(errc::domain_error, "beta_cdf_table: n must be positive");
  if (!(u >= 0.0 && u <= 1.0)) fail(errc::domain_error, "beta_cdf_table: u outside [0,1]");
  if (out.size() != static_cast<std::size_t>(n))
    fail(errc::dimension_mismatch, "beta_cdf_table: output needs n slots");
  if (u == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (u == 1.0) {
    std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  std::vector<double> pmf(n + 1);
  bernstein_basis_row(n, u, pmf);
  double acc = 0.0;
  for (int r = n; r >= 1; --r) {
    acc += pmf[r];
    out[r - 1] = std::min(acc, 1.0);
  }
}

CoefficientArray empirical_coefficients(const RankMatrix& ranks, std::span<const int> degrees) {
  const std::size_t n = ranks.rows();
  const std::size_t d = ranks.cols();
  if (degrees.size() != d) fail(errc::dimension_mismatch, "degrees rank mismatch");
  std::vector<int> ext(d);
  std::vector<std::size_t> stride(d);
  std::size_t total = 1;
  for (std::size_t j = d; j-- > 0;) {
    if (degrees[j] < 1) fail(errc::domain_error, "Bernstein degrees must be >= 1");
    ext[j] = degrees[j] + 1;
    stride[j] = total;
    total *= static_cast<std::size_t>(ext[j]);
  }

  std::vector<double> counts(total, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < d; ++j) {
      // smallest s with R/n <= s/m, exactly: s = ceil(R * m / n)
      const std::size_t s =
          (static_cast<std::size_t>(ranks(i, j)) * static_cast<std::size_t>(degrees[j]) + n - 1) / n;
      off += s * stride[j];
    }
    counts[off] += 1.0;
  }
  // cumulative counts: each observation contributes to every cell above it
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t block = stride[j] * static_cast<std::size_t>(ext[j]);
    for (std::size_t base = 0; base < total; base += block)
      for (std::size_t s = 1; s < static_cast<std::size_t>(ext[j]); ++s)
        for (std::size_t in = 0; in < stride[j]; ++in)
          counts[base + s * stride[j] + in] += counts[base + (s - 1) * stride[j] + in];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& c : counts) c *= inv_n;
  return CoefficientArray(std::vector<int>(degrees.begin(), degrees.end()), std::move(counts));
}

double empirical_copula(const RankMatrix& ranks, std::span<const double> u) {
  const std::size_t n = ranks.rows(), d = ranks.cols();
  if (u.size() != d) fail(errc::dimension_mismatch, "empirical_copula: point rank mismatch");
  const double dn = static_cast<double>(n);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool in = true;
    for (std::size_t j = 0; j < d; ++j) {
      if (!(static_cast<double>(ranks(i, j)) / dn <= u[j])) {
        in = false;
        break;
      }
    }
    count += in;
  }
  return static_cast<double>(count) / dn;
}

double checkerboard_copula(const RankMatrix& ranks, std::span<const double> u) {
  const std::size_t n = ranks.rows(), d = ranks.cols();
  if (u.size() != d) fail(errc::dimension_mismatch, "checkerboard_copula: point rank mismatch");
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double f = std::min(std::max(dn * u[j] - ranks(i, j) + 1.0, 0.0), 1.0);
      if (f == 0.0) {
        prod = 0.0;
        break;
      }
      prod *= f;
    }
    acc += prod;
  }
  return acc / dn;
}

double beta_copula(const RankMatrix& ranks, std::span<const double> u) {
  const std::size_t n = ranks.rows(), d = ranks.cols();
  if (u.size() != d) fail(errc::dimension_mismatch, "beta_copula: point rank mismatch");
  thread_local std::vector<double> tables;
  tables.resize(n * d);
  for (std::size_t j = 0; j < d; ++j)
    beta_cdf_table(static_cast<int>(n), u[j], std::span<double>(tables.data() + j * n, n));
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      prod *= tables[j * n + ranks(i, j) - 1];
      if (prod == 0.0) break;
    }
    acc += prod;
  }
  return acc / static_cast<double>(n);
}

double bernstein_copula(const RankMatrix& ranks, std::span<const int> degrees,
                        std::span<const double> u) {
  return eval_bernstein(empirical_coefficients(ranks, degrees), u);
}

bool is_genuine_copula_degrees(long n, std::span<const int> degrees) {
  if (n < 1) fail(errc::domain_error, "is_genuine_copula_degrees: n must be positive");
  for (int m : degrees) {
    if (m < 1) fail(errc::domain_error, "is_genuine_copula_degrees: degrees must be >= 1");
    if (n % m != 0) return false;
  }
  return true;
}

CopulaEstimate::CopulaEstimate(EstimatorKind kind, std::shared_ptr<const RankMatrix> ranks,
                               std::vector<int> degrees)
    : kind_(kind), ranks_(std::move(ranks)), degrees_(std::move(degrees)) {
  if (!ranks_) fail(errc::domain_error, "CopulaEstimate: null ranks");
  if (kind_ == EstimatorKind::bernstein) {
    if (degrees_.size() != ranks_->cols())
      fail(errc::dimension_mismatch, "CopulaEstimate: bernstein degrees rank mismatch");
    coeffs_ = std::make_shared<const CoefficientArray>(empirical_coefficients(*ranks_, degrees_));
  } else if (!degrees_.empty()) {
    fail(errc::domain_error, "CopulaEstimate: degrees only apply to the bernstein kind");
  }
}

double CopulaEstimate::operator()(std::span<const double> u) const {
  switch (kind_) {
    case EstimatorKind::empirical:
      return empirical_copula(*ranks_, u);
    case EstimatorKind::checkerboard:
      return checkerboard_copula(*ranks_, u);
    case EstimatorKind::beta:
      return beta_copula(*ranks_, u);
    case EstimatorKind::bernstein:
      return eval_bernstein(*coeffs_, u);
  }
  fail(errc::domain_error, "CopulaEstimate: bad kind");
}

namespace {

constexpr double kFactorFloor = 1e-18;  // below this a factor is treated as exact 0

struct FactorTables {
  // rows[j][i*G_j + g]: factor of observation i at grid point g on axis j
  std::vector<std::vector<double>> rows;
  // axis-0 transpose, t0T[g*n + i], for slab-major accumulation
  std::vector<double> t0T;
  // lo[j][i]: first grid index with a nonzero factor (factors are
  // nondecreasing in u, so everything before is exact 0)
  std::vector<std::vector<int>> lo;
};

FactorTables build_tables(const RankMatrix& ranks,
                          const std::vector<std::vector<double>>& grids,
                          EstimatorKind kind) {
  const std::size_t n = ranks.rows(), d = ranks.cols();
  FactorTables t;
  t.rows.resize(d);
  t.lo.resize(d);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t G = grids[j].size();
    t.rows[j].assign(n * G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
      const double u = grids[j][g];
      if (kind == EstimatorKind::beta) {
        beta_cdf_table(static_cast<int>(n), u, col);
        for (std::size_t i = 0; i < n; ++i) {
          double f = col[ranks(i, j) - 1];
          t.rows[j][i * G + g] = (f < kFactorFloor) ? 0.0 : f;
        }
      } else {
        const double dn = static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double f = std::min(std::max(dn * u - ranks(i, j) + 1.0, 0.0), 1.0);
          t.rows[j][i * G + g] = f;
        }
      }
    }
    t.lo[j].assign(n, static_cast<int>(G));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t g = 0; g < G; ++g)
        if (t.rows[j][i * G + g] != 0.0) {
          t.lo[j][i] = static_cast<int>(g);
          break;
        }
  }
  const std::size_t G0 = grids[0].size();
  t.t0T.assign(G0 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < G0; ++g) t.t0T[g * n + i] = t.rows[0][i * G0 + g];
  return t;
}

// Sum of n rank-1 tensor terms, slab-blocked on axis 0 so the working set of
// each g0 slab stays cache-resident across the i loop.
void accumulate_rank1(std::span<double> acc, double scale, const FactorTables& t,
                      const std::vector<std::vector<double>>& grids, std::size_t n) {
  const std::size_t d = grids.size();
  if (d == 1) {
    const std::size_t G = grids[0].size();
    for (std::size_t i = 0; i < n; ++i) {
      const double* r0 = t.rows[0].data() + i * G;
      for (std::size_t g = t.lo[0][i]; g < G; ++g) acc[g] += scale * r0[g];
    }
    return;
  }
  const std::size_t G0 = grids[0].size();
  std::size_t slab = 1;
  for (std::size_t j = 1; j < d; ++j) slab *= grids[j].size();
  const std::size_t work_per_slab = n * slab;

  detail::parallel_chunks(G0, std::max<std::size_t>(1, (1u << 22) / std::max<std::size_t>(1, work_per_slab)),
                          [&](std::size_t g0_begin, std::size_t g0_end) {
    if (d == 2) {
      const std::size_t G1 = grids[1].size();
      for (std::size_t g0 = g0_begin; g0 < g0_end; ++g0) {
        double* row = acc.data() + g0 * G1;
        const double* c0col = t.t0T.data() + g0 * n;
        for (std::size_t i = 0; i < n; ++i) {
          const double c0 = c0col[i] * scale;
          if (c0 == 0.0) continue;
          const double* r1 = t.rows[1].data() + i * G1;
          for (std::size_t g1 = t.lo[1][i]; g1 < G1; ++g1) row[g1] += c0 * r1[g1];
        }
      }
    } else if (d == 3) {
      const std::size_t G1 = grids[1].size();
      const std::size_t G2 = grids[2].size();
      for (std::size_t g0 = g0_begin; g0 < g0_end; ++g0) {
        double* slab_ptr = acc.data() + g0 * G1 * G2;
        const double* c0col = t.t0T.data() + g0 * n;
        for (std::size_t i = 0; i < n; ++i) {
          const double c0 = c0col[i] * scale;
          if (c0 == 0.0) continue;
          const double* r1 = t.rows[1].data() + i * G1;
          const double* r2 = t.rows[2].data() + i * G2;
          const std::size_t lo2 = t.lo[2][i];
          for (std::size_t g1 = t.lo[1][i]; g1 < G1; ++g1) {
            const double c01 = c0 * r1[g1];
            if (c01 == 0.0) continue;
            double* out = slab_ptr + g1 * G2;
            for (std::size_t g2 = lo2; g2 < G2; ++g2) out[g2] += c01 * r2[g2];
          }
        }
      }
    } else {
      // d >= 4: odometer over the middle axes, axpy on the last one
      const std::size_t G_last = grids[d - 1].size();
      std::vector<int> ext(d - 2);
      for (std::size_t j = 1; j + 1 < d; ++j) ext[j - 1] = static_cast<int>(grids[j].size());
      for (std::size_t g0 = g0_begin; g0 < g0_end; ++g0) {
        const double* c0col = t.t0T.data() + g0 * n;
        for (std::size_t i = 0; i < n; ++i) {
          const double c0 = c0col[i] * scale;
          if (c0 == 0.0) continue;
          std::vector<int> mid(d - 2, 0);
          do {
            double c = c0;
            std::size_t off = g0;
            for (std::size_t j = 1; j + 1 < d; ++j) {
              const std::size_t Gj = grids[j].size();
              c *= t.rows[j][i * Gj + mid[j - 1]];
              off = off * Gj + mid[j - 1];
            }
            off *= G_last;
            if (c == 0.0) continue;
            const double* rl = t.rows[d - 1].data() + i * G_last;
            for (std::size_t g = t.lo[d - 1][i]; g < G_last; ++g) acc[off + g] += c * rl[g];
          } while (next_index(mid, ext));
        }
      }
    }
  });
}

void accumulate_empirical(std::span<double> acc, double scale, const RankMatrix& ranks,
                          const std::vector<std::vector<double>>& grids) {
  const std::size_t n = ranks.rows(), d = ranks.cols();
  std::size_t total = 1;
  for (const auto& g : grids) total *= g.size();
  std::vector<double> hist(total, 0.0);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = static_cast<double>(ranks(i, j)) / dn;
      const auto it = std::lower_bound(grids[j].begin(), grids[j].end(), v);
      off = off * grids[j].size() + static_cast<std::size_t>(it - grids[j].begin());
    }
    hist[off] += 1.0;
  }
  std::size_t stride = 1;
  for (std::size_t j = d; j-- > 0;) {
    const std::size_t len = grids[j].size();
    const std::size_t block = stride * len;
    for (std::size_t base = 0; base < total; base += block)
      for (std::size_t s = 1; s < len; ++s)
        for (std::size_t in = 0; in < stride; ++in)
          hist[base + s * stride + in] += hist[base + (s - 1) * stride + in];
    stride = block;
  }
  const double f = scale / dn;
  for (std::size_t k = 0; k < total; ++k) acc[k] += f * hist[k];
}

void accumulate_bernstein(std::span<double> acc, double scale, const CoefficientArray& coeffs,
                          const std::vector<std::vector<double>>& grids) {
  const std::vector<double> values = eval_bernstein_grid(coeffs, grids);
  for (std::size_t k = 0; k < values.size(); ++k) acc[k] += scale * values[k];
}

}  // namespace

void CopulaEstimate::eval_grid_accumulate(const std::vector<std::vector<double>>& axis_grids,
                                          std::span<double> acc, double scale) const {
  const std::size_t d = dim();
  if (axis_grids.size() != d) fail(errc::dimension_mismatch, "eval_grid: grid rank mismatch");
  std::size_t total = 1;
  for (const auto& g : axis_grids) {
    if (g.empty()) fail(errc::domain_error, "eval_grid: empty axis grid");
    for (double u : g)
      if (!(u >= 0.0 && u <= 1.0)) fail(errc::domain_error, "eval_grid: grid point outside [0,1]");
    total *= g.size();
  }
  if (acc.size() != total) fail(errc::dimension_mismatch, "eval_grid: accumulator size mismatch");

  switch (kind_) {
    case EstimatorKind::empirical:
      accumulate_empirical(acc, scale, *ranks_, axis_grids);
      return;
    case EstimatorKind::checkerboard:
    case EstimatorKind::beta: {
      const FactorTables t = build_tables(*ranks_, axis_grids, kind_);
      accumulate_rank1(acc, scale / static_cast<double>(n()), t, axis_grids, n());
      return;
    }
    case EstimatorKind::bernstein:
      accumulate_bernstein(acc, scale, *coeffs_, axis_grids);
      return;
  }
}

std::vector<double> CopulaEstimate::eval_grid(const std::vector<std::vector<double>>& axis_grids) const {
  std::size_t total = 1;
  for (const auto& g : axis_grids) total *= g.size();
  std::vector<double> out(total, 0.0);
  eval_grid_accumulate(axis_grids, out, 1.0);
  return out;
}

double sup_distance(const CopulaEstimate& f, const CopulaEstimate& g, int grid_points_per_axis) {
  if (f.dim() != g.dim()) fail(errc::dimension_mismatch, "sup_distance: dimension mismatch");
  if (grid_points_per_axis < 2) fail(errc::domain_error, "sup_distance: need at least 2 grid points");
  const std::size_t d = f.dim();

  std::vector<double> axis;
  axis.reserve(grid_points_per_axis + f.n() + g.n());
  for (int k = 0; k < grid_points_per_axis; ++k)
    axis.push_back(static_cast<double>(k) / (grid_points_per_axis - 1));
  for (const CopulaEstimate* e : {&f, &g})
    if (e->kind() == EstimatorKind::empirical)
      for (std::size_t r = 1; r <= e->n(); ++r)
        axis.push_back(static_cast<double>(r) / static_cast<double>(e->n()));
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

  std::vector<std::vector<double>> grids(d, axis);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (total > (std::size_t{1} << 33) / axis.size())
      fail(errc::domain_error, "sup_distance: grid too large");
    total *= axis.size();
  }
  std::vector<double> acc(total, 0.0);
  f.eval_grid_accumulate(grids, acc, 1.0);
  g.eval_grid_accumulate(grids, acc, -1.0);
  double best = 0.0;
  for (double v : acc) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace betacop
