#include "betacop/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "betacop/detail/parallel.hpp"
#include "betacop/special.hpp"

namespace betacop {

NdArray::NdArray(std::vector<int> ext) : extents(std::move(ext)) {
  std::size_t total = 1;
  for (int e : extents) {
    if (e < 1) fail(errc::domain_error, "NdArray extent must be positive");
    total *= static_cast<std::size_t>(e);
  }
  values.assign(total, 0.0);
}

NdArray::NdArray(std::vector<int> ext, std::vector<double> vals) : NdArray(std::move(ext)) {
  if (vals.size() != values.size())
    fail(errc::dimension_mismatch, "NdArray value buffer does not match extents");
  values = std::move(vals);
}

std::size_t NdArray::offset(std::span<const int> idx) const {
  if (idx.size() != extents.size()) fail(errc::dimension_mismatch, "NdArray index rank mismatch");
  std::size_t off = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= extents[j]) fail(errc::domain_error, "NdArray index out of range");
    off = off * static_cast<std::size_t>(extents[j]) + static_cast<std::size_t>(idx[j]);
  }
  return off;
}

bool next_index(std::span<int> idx, std::span<const int> extents) {
  for (std::size_t j = idx.size(); j-- > 0;) {
    if (++idx[j] < extents[j]) return true;
    idx[j] = 0;
  }
  return false;
}

CoefficientArray::CoefficientArray(std::vector<int> degrees, std::vector<double> values)
    : degrees_(std::move(degrees)) {
  if (degrees_.empty()) fail(errc::domain_error, "coefficient array needs at least one axis");
  std::vector<int> ext(degrees_.size());
  for (std::size_t j = 0; j < degrees_.size(); ++j) {
    if (degrees_[j] < 1) fail(errc::domain_error, "Bernstein degrees must be >= 1");
    ext[j] = degrees_[j] + 1;
  }
  array_ = NdArray(std::move(ext));
  if (values.size() != array_.size())
    fail(errc::dimension_mismatch, "coefficient buffer size does not match degrees");
  for (double v : values)
    if (!std::isfinite(v)) fail(errc::non_finite_input, "coefficient array contains non-finite value");
  array_.values = std::move(values);
}

CoefficientArray CoefficientArray::from_function(
    std::vector<int> degrees, const std::function<double(std::span<const int>)>& fn) {
  std::vector<int> ext(degrees.size());
  for (std::size_t j = 0; j < degrees.size(); ++j) ext[j] = degrees[j] + 1;
  std::size_t total = 1;
  for (int e : ext) total *= static_cast<std::size_t>(e);
  std::vector<double> vals(total);
  std::vector<int> idx(degrees.size(), 0);
  std::size_t pos = 0;
  do {
    vals[pos++] = fn(idx);
  } while (next_index(idx, ext));
  return CoefficientArray(std::move(degrees), std::move(vals));
}

double bernstein_basis(int m, int s, double u) {
  if (m < 0 || s < 0 || s > m) fail(errc::domain_error, "bernstein_basis: s outside 0..m");
  if (!(u >= 0.0 && u <= 1.0)) fail(errc::domain_error, "bernstein_basis: u outside [0,1]");
  if (u == 0.0) return s == 0 ? 1.0 : 0.0;
  if (u == 1.0) return s == m ? 1.0 : 0.0;
  if (m <= 50) {
    // binom(m, s) is exact in double up to m = 50.
    double binom = 1.0;
    for (int k = 1; k <= s; ++k) binom = binom * (m - s + k) / k;
    return binom * std::pow(u, s) * std::pow(1.0 - u, m - s);
  }
  const double lg = special::log_binomial(m, s) + s * std::log(u) + (m - s) * std::log1p(-u);
  return std::exp(lg);
}

void bernstein_basis_row(int m, double u, std::span<double> out) {
  if (m < 0) fail(errc::domain_error, "bernstein_basis_row: negative degree");
  if (!(u >= 0.0 && u <= 1.0)) fail(errc::domain_error, "bernstein_basis_row: u outside [0,1]");
  if (out.size() != static_cast<std::size_t>(m) + 1)
    fail(errc::dimension_mismatch, "bernstein_basis_row: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  if (u == 0.0) {
    out[0] = 1.0;
    return;
  }
  if (u == 1.0) {
    out[m] = 1.0;
    return;
  }
  // Anchor at the modal index and recur outward; every step multiplies by a
  // moderate ratio, so no overflow and relative error stays near machine eps.
  int k0 = static_cast<int>((m + 1) * u);
  k0 = std::clamp(k0, 0, m);
  out[k0] = std::exp(special::log_binomial(m, k0) + k0 * std::log(u) +
                     (m - k0) * std::log1p(-u));
  const double odds = u / (1.0 - u);
  for (int s = k0; s < m; ++s) {
    out[s + 1] = out[s] * odds * (m - s) / (s + 1);
    if (out[s + 1] < 1e-305) {
      out[s + 1] = 0.0;
      break;
    }
  }
  for (int s = k0; s > 0; --s) {
    out[s - 1] = out[s] / odds * s / (m - s + 1);
    if (out[s - 1] < 1e-305) {
      out[s - 1] = 0.0;
      break;
    }
  }
}

namespace {

// Contracts the trailing axis of a (rank-k view given by extents) against a
// basis row, repeatedly, until a scalar remains.
double contract_all(const NdArray& a, const std::vector<std::vector<double>>& rows) {
  const std::size_t d = a.extents.size();
  std::vector<double> cur(a.values);
  std::size_t cur_size = cur.size();
  for (std::size_t axis = d; axis-- > 0;) {
    const std::size_t e = static_cast<std::size_t>(a.extents[axis]);
    const std::size_t rem = cur_size / e;
    const std::vector<double>& w = rows[axis];
    for (std::size_t r = 0; r < rem; ++r) {
      double acc = 0.0;
      const double* blk = cur.data() + r * e;
      for (std::size_t s = 0; s < e; ++s) acc += blk[s] * w[s];
      cur[r] = acc;
    }
    cur_size = rem;
  }
  return cur[0];
}

}  // namespace

double eval_bernstein(const CoefficientArray& a, std::span<const double> u) {
  const std::size_t d = a.dim();
  if (u.size() != d) fail(errc::dimension_mismatch, "eval_bernstein: point rank mismatch");
  std::vector<std::vector<double>> rows(d);
  for (std::size_t j = 0; j < d; ++j) {
    rows[j].resize(a.degrees()[j] + 1);
    bernstein_basis_row(a.degrees()[j], u[j], rows[j]);
  }
  return contract_all(a.array(), rows);
}

std::vector<double> eval_bernstein_grid(const CoefficientArray& a,
                                        const std::vector<std::vector<double>>& axis_grids) {
  const std::size_t d = a.dim();
  if (axis_grids.size() != d) fail(errc::dimension_mismatch, "eval_bernstein_grid: grid rank mismatch");
  // Contract the trailing coefficient axis against its basis matrix; the
  // fresh grid axis rotates to the front, so after d rounds the layout is
  // row-major in grid order.
  std::vector<double> cur(a.array().values);
  for (std::size_t axis = d; axis-- > 0;) {
    const std::size_t e = static_cast<std::size_t>(a.degrees()[axis]) + 1;
    const std::vector<double>& grid = axis_grids[axis];
    const std::size_t G = grid.size();
    if (G == 0) fail(errc::domain_error, "eval_bernstein_grid: empty axis grid");
    std::vector<double> basis(G * e);
    for (std::size_t g = 0; g < G; ++g)
      bernstein_basis_row(a.degrees()[axis], grid[g], std::span<double>(basis.data() + g * e, e));
    const std::size_t rest = cur.size() / e;
    std::vector<double> next(G * rest);
    detail::parallel_chunks(G, std::max<std::size_t>(1, (std::size_t{1} << 20) / std::max<std::size_t>(1, rest * e)),
                            [&](std::size_t gb, std::size_t ge) {
      for (std::size_t g = gb; g < ge; ++g) {
        const double* w = basis.data() + g * e;
        double* out = next.data() + g * rest;
        for (std::size_t r = 0; r < rest; ++r) {
          const double* blk = cur.data() + r * e;
          double dot = 0.0;
          for (std::size_t s = 0; s < e; ++s) dot += blk[s] * w[s];
          out[r] = dot;
        }
      }
    });
    cur = std::move(next);
  }
  return cur;
}

NdArray difference(const NdArray& a, std::span<const int> axes) {
  const std::size_t d = a.extents.size();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] < 0 || static_cast<std::size_t>(axes[i]) >= d)
      fail(errc::dimension_mismatch, "difference: axis out of range");
    for (std::size_t k = i + 1; k < axes.size(); ++k)
      if (axes[i] == axes[k]) fail(errc::domain_error, "difference: repeated axis");
  }
  NdArray cur = a;
  for (int axis : axes) {
    std::vector<int> ext = cur.extents;
    if (ext[axis] < 2) fail(errc::domain_error, "difference: axis extent too small");
    ext[axis] -= 1;
    NdArray next(ext);
    std::size_t inner = 1;
    for (std::size_t j = axis + 1; j < d; ++j) inner *= static_cast<std::size_t>(cur.extents[j]);
    const std::size_t axis_len = static_cast<std::size_t>(cur.extents[axis]);
    const std::size_t outer = cur.size() / (inner * axis_len);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t s = 1; s < axis_len; ++s)
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t src = (o * axis_len + s) * inner + in;
          const std::size_t dst = (o * (axis_len - 1) + (s - 1)) * inner + in;
          next.values[dst] = cur.values[src] - cur.values[src - inner];
        }
    cur = std::move(next);
  }
  return cur;
}

ValidityReport check_copula_conditions(const CoefficientArray& a) {
  constexpr double kTol = 1e-12;
  constexpr std::size_t kMaxWitnesses = 100;
  const std::size_t d = a.dim();
  const auto& m = a.degrees();
  ValidityReport rep;

  // C.1: zero on every boundary slice s_j = 0.
  {
    std::vector<int> idx(d, 0);
    do {
      bool boundary = false;
      for (std::size_t j = 0; j < d; ++j) boundary |= (idx[j] == 0);
      if (boundary && std::abs(a.at(idx)) > kTol) {
        rep.grounded = false;
        if (rep.c1_witnesses.size() < kMaxWitnesses) rep.c1_witnesses.push_back({idx, a.at(idx)});
      }
    } while (next_index(idx, a.array().extents));
  }

  // C.2: along each edge (all other axes pinned at m_k), values s_j/m_j.
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<int> idx(d);
    for (std::size_t k = 0; k < d; ++k) idx[k] = m[k];
    for (int s = 0; s <= m[j]; ++s) {
      idx[j] = s;
      const double want = static_cast<double>(s) / m[j];
      const double got = a.at(idx);
      if (std::abs(got - want) > kTol) {
        rep.uniform_margins = false;
        if (rep.c2_witnesses.size() < kMaxWitnesses) rep.c2_witnesses.push_back({idx, got});
      }
    }
  }

  // C.3: full mixed differences nonnegative.
  {
    std::vector<int> axes(d);
    for (std::size_t j = 0; j < d; ++j) axes[j] = static_cast<int>(j);
    const NdArray diff = difference(a.array(), axes);
    std::vector<int> idx(d, 0);
    do {
      const double v = diff.at(idx);
      if (v < -kTol) {
        rep.nonneg_differences = false;
        if (rep.c3_witnesses.size() < kMaxWitnesses) {
          std::vector<int> paper_idx(idx.begin(), idx.end());
          for (std::size_t j = 0; j < d; ++j) paper_idx[j] += 1;  // differences start at s_j = 1
          rep.c3_witnesses.push_back({paper_idx, v});
        }
      }
    } while (next_index(idx, diff.extents));
  }
  return rep;
}

double mixed_partial(const CoefficientArray& a, std::span<const double> u) {
  const std::size_t d = a.dim();
  if (u.size() != d) fail(errc::dimension_mismatch, "mixed_partial: point rank mismatch");
  for (double x : u)
    if (!(x > 0.0 && x < 1.0)) fail(errc::domain_error, "mixed_partial: point must be interior");
  std::vector<int> axes(d);
  for (std::size_t j = 0; j < d; ++j) axes[j] = static_cast<int>(j);
  NdArray diff = difference(a.array(), axes);
  std::vector<std::vector<double>> rows(d);
  double scale = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const int m = a.degrees()[j];
    rows[j].resize(m);
    bernstein_basis_row(m - 1, u[j], rows[j]);
    scale *= m;
  }
  return scale * contract_all(diff, rows);
}

double derivative_identity_rhs(std::span<const double> a, double t) {
  if (a.size() < 2) fail(errc::domain_error, "derivative_identity_rhs: need n >= 1");
  if (!(t >= 0.0 && t <= 1.0)) fail(errc::domain_error, "derivative_identity_rhs: t outside [0,1]");
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<double> row(n);
  bernstein_basis_row(n - 1, t, row);
  double acc = 0.0;
  for (int r = 1; r <= n; ++r) acc += (a[r] - a[r - 1]) * n * row[r - 1];
  return acc;
}

CoefficientArray read_coefficients_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::string line;
  std::vector<std::vector<int>> indices;
  std::vector<double> vals;
  std::size_t cols = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> fields;
    while (std::getline(ss, tok, ',')) {
      try {
        fields.push_back(std::stod(tok));
      } catch (const std::exception&) {
        fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
      }
    }
    if (fields.size() < 2)
      fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": need s indices and a value");
    if (cols == 0)
      cols = fields.size();
    else if (fields.size() != cols)
      fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": ragged row");
    std::vector<int> idx(cols - 1);
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      idx[j] = static_cast<int>(fields[j]);
      if (idx[j] < 0 || fields[j] != idx[j])
        fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": bad multi-index");
    }
    indices.push_back(std::move(idx));
    vals.push_back(fields.back());
  }
  if (indices.empty()) fail(errc::io_error, path + ": no data rows");

  const std::size_t d = cols - 1;
  std::vector<int> degrees(d, 0);
  for (const auto& idx : indices)
    for (std::size_t j = 0; j < d; ++j) degrees[j] = std::max(degrees[j], idx[j]);

  std::vector<int> ext(d);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    ext[j] = degrees[j] + 1;
    total *= static_cast<std::size_t>(ext[j]);
  }
  if (indices.size() != total)
    fail(errc::parse_error, path + ": expected one row per multi-index (" +
                                std::to_string(total) + " rows, got " +
                                std::to_string(indices.size()) + ")");
  NdArray probe(ext);
  std::vector<char> seen(total, 0);
  std::vector<double> ordered(total, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t off = probe.offset(indices[k]);
    if (seen[off]) fail(errc::parse_error, path + ": duplicate multi-index row");
    seen[off] = 1;
    ordered[off] = vals[k];
  }
  return CoefficientArray(std::move(degrees), std::move(ordered));
}

void write_coefficients_csv(const CoefficientArray& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open " + path + " for writing");
  std::vector<int> idx(a.dim(), 0);
  std::size_t pos = 0;
  char buf[64];
  do {
    for (std::size_t j = 0; j < a.dim(); ++j) out << idx[j] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", a.array().values[pos++]);
    out << buf << '\n';
  } while (next_index(idx, a.array().extents));
  if (!out) fail(errc::io_error, "write failed: " + path);
}

}  // namespace betacop
