#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace betacop {

enum class errc {
  domain_error,
  dimension_mismatch,
  non_finite_input,
  ties_present,
  tied_ranks,
  parse_error,
  io_error,
  undefined_bandwidth,
  config_error,
};

/// Library error carrying a machine-readable category next to the message.
class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

/// n x d matrix of raw observations, row-major. All entries must be finite.
class Sample {
public:
  Sample(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Componentwise ranks, 1-based; every column is a permutation of 1..n.
/// tie_seed is set only when randomized tie-breaking actually fired.
class RankMatrix {
public:
  RankMatrix(std::size_t rows, std::size_t cols, std::vector<int> ranks,
             std::optional<std::uint64_t> tie_seed = std::nullopt);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int operator()(std::size_t i, std::size_t j) const { return ranks_[i * cols_ + j]; }
  const std::vector<int>& ranks() const noexcept { return ranks_; }
  std::optional<std::uint64_t> tie_seed() const noexcept { return tie_seed_; }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<int> ranks_;
  std::optional<std::uint64_t> tie_seed_;
};

enum class TiePolicy { error_on_ties, random };

/// Componentwise ranks per the counting definition; ties broken by a
/// uniformly random permutation of the tied block when policy == random,
/// driven by a stream seeded from tie_seed only (replayable, independent
/// of any simulation RNG).
RankMatrix compute_ranks(const Sample& sample, TiePolicy policy,
                         std::uint64_t tie_seed = 0);

/// Reads a comma-separated file of reals (optional single header row).
Sample read_sample_csv(const std::string& path, bool has_header);

}  // namespace betacop
