#include "betacop/beta_sampler.hpp"

#include <algorithm>
#include <vector>

#include "betacop/rng.hpp"
#include "betacop/special.hpp"

namespace betacop {

Sample draw(const BetaSamplerState& state, std::size_t count) {
  if (!state.ranks) fail(errc::domain_error, "beta sampler: null ranks");
  if (count < 1) fail(errc::domain_error, "beta sampler: count must be positive");
  const RankMatrix& ranks = *state.ranks;
  const std::size_t n = ranks.rows();
  const std::size_t d = ranks.cols();
  RngStream rng(derive_seed(state.rng_seed, 0xB5, static_cast<std::uint64_t>(state.scheme)));

  std::vector<double> values(count * d);
  if (state.scheme == SamplerScheme::direct_beta) {
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = rng.below(n);
      for (std::size_t j = 0; j < d; ++j) {
        const int r = ranks(i, j);
        values[k * d + j] =
            special::reg_inc_beta_inv(r, static_cast<double>(n) + 1.0 - r, rng.open01());
      }
    }
  } else {
    std::vector<double> col(n);
    std::vector<std::vector<double>> sorted(d, std::vector<double>(n));
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = rng.open01();
        std::sort(col.begin(), col.end());
        sorted[j] = col;
      }
      const std::size_t i = rng.below(n);
      for (std::size_t j = 0; j < d; ++j) values[k * d + j] = sorted[j][ranks(i, j) - 1];
    }
  }
  return Sample(count, d, std::move(values));
}

}  // namespace betacop
