#pragma once

#include <cstdint>
#include <memory>

#include "betacop/types.hpp"

namespace betacop {

enum class SamplerScheme { order_statistic, direct_beta };

/// Immutable sampler over a fitted smoothed empirical copula. draw() is a
/// pure function of (state, count): repeated calls reproduce the same rows.
struct BetaSamplerState {
  std::shared_ptr<const RankMatrix> ranks;
  SamplerScheme scheme = SamplerScheme::direct_beta;
  std::uint64_t rng_seed = 0;
};

/// count rows in [0,1]^d.
///
/// order_statistic: per draw, sort n*d fresh uniforms columnwise, rearrange
/// row i by the rank vectors, pick i uniformly.
/// direct_beta: pick i uniformly, then draw one Beta(R_ij, n+1-R_ij) variate
/// per coordinate by inverse CDF on the regularized incomplete beta.
Sample draw(const BetaSamplerState& state, std::size_t count);

}  // namespace betacop
