#include "betacop/types.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "betacop/rng.hpp"

namespace betacop {

Sample::Sample(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0)
    fail(errc::domain_error, "sample must have at least one row and one column");
  if (values_.size() != rows_ * cols_)
    fail(errc::dimension_mismatch, "sample buffer size does not match rows*cols");
  for (double v : values_)
    if (!std::isfinite(v)) fail(errc::non_finite_input, "sample contains a non-finite value");
}

RankMatrix::RankMatrix(std::size_t rows, std::size_t cols, std::vector<int> ranks,
                       std::optional<std::uint64_t> tie_seed)
    : rows_(rows), cols_(cols), ranks_(std::move(ranks)), tie_seed_(tie_seed) {
  if (rows_ == 0 || cols_ == 0) fail(errc::domain_error, "rank matrix must be nonempty");
  if (ranks_.size() != rows_ * cols_)
    fail(errc::dimension_mismatch, "rank buffer size does not match rows*cols");
  // Each column must be a permutation of 1..n; anything else means ties
  // were left unresolved upstream.
  std::vector<char> seen(rows_);
  for (std::size_t j = 0; j < cols_; ++j) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const int r = ranks_[i * cols_ + j];
      if (r < 1 || static_cast<std::size_t>(r) > rows_ || seen[r - 1])
        fail(errc::tied_ranks, "column " + std::to_string(j) + " is not a permutation of 1..n");
      seen[r - 1] = 1;
    }
  }
}

RankMatrix compute_ranks(const Sample& sample, TiePolicy policy, std::uint64_t tie_seed) {
  const std::size_t n = sample.rows();
  const std::size_t d = sample.cols();
  std::vector<int> ranks(n * d);
  std::vector<std::size_t> order(n);
  RngStream tie_stream(mix64(tie_seed));
  bool ties_seen = false;

  for (std::size_t j = 0; j < d; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sample(a, j) < sample(b, j);
    });
    std::size_t p = 0;
    while (p < n) {
      std::size_t q = p + 1;
      while (q < n && sample(order[q], j) == sample(order[p], j)) ++q;
      if (q - p > 1) {
        if (policy == TiePolicy::error_on_ties)
          fail(errc::ties_present, "ties in column " + std::to_string(j));
        ties_seen = true;
        // Fisher-Yates over the tied block: ranks p+1..q stay within the
        // block but land on the tied observations in random order.
        for (std::size_t k = q - 1; k > p; --k) {
          const std::size_t swap_with = p + tie_stream.below(k - p + 1);
          std::swap(order[k], order[swap_with]);
        }
      }
      for (std::size_t k = p; k < q; ++k) ranks[order[k] * d + j] = static_cast<int>(k + 1);
      p = q;
    }
  }
  return RankMatrix(n, d, std::move(ranks),
                    ties_seen ? std::optional<std::uint64_t>(tie_seed) : std::nullopt);
}

Sample read_sample_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);

  std::vector<double> values;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && has_header) continue;
    if (line.empty()) continue;

    std::size_t fields = 0;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
      }
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size())
        fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": trailing garbage: '" + tok + "'");
      values.push_back(v);
      ++fields;
    }
    if (cols == 0)
      cols = fields;
    else if (fields != cols)
      fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": ragged row");
    ++rows;
  }
  if (rows == 0) fail(errc::io_error, path + ": no data rows");
  return Sample(rows, cols, std::move(values));
}

}  // namespace betacop
