#pragma once

#include <span>
#include <vector>

#include "rjpois/dists.hpp"
#include "rjpois/model.hpp"

namespace rjpois {

/// Full conditional of one allocation: p_j proportional to w_j Poisson(D; rate_j E).
std::vector<double> alloc_conditional(std::int64_t count, double exposure,
                                      std::span<const double> rates,
                                      std::span<const double> weights);

struct AllocationDraw {
  std::vector<int> alloc;
  double log_prob = 0.0;  // sum_i log p(z_i | rates, weights, D_i)
};

/// Draws every z_i independently from its full conditional and returns the
/// log probability of the drawn vector.
AllocationDraw sample_allocations(Rng& rng, std::span<const double> rates,
                                  std::span<const double> weights, const Dataset& data);

/// Log probability of an existing allocation under the full conditionals at
/// (rates, weights). Bitwise equal to the log_prob that sample_allocations
/// reports for the same vector.
double eval_alloc_logprob(std::span<const int> alloc, std::span<const double> rates,
                          std::span<const double> weights, const Dataset& data);

struct RateUpdate {
  std::vector<double> rates;
  int skipped = 0;  // components kept at their old value (degenerate truncation)
};

/// Left-to-right redraw of each rate from its Gamma full conditional
/// truncated to the open interval between its current neighbours.
RateUpdate update_rates(Rng& rng, std::span<const double> rates, const SufficientStats& stats,
                        const Hyperparams& hyper);

std::vector<double> update_weights(Rng& rng, const SufficientStats& stats,
                                   const Hyperparams& hyper);

/// Fixed-k sweep: allocations, then rates, then weights.
MixtureState gibbs_sweep(Rng& rng, const MixtureState& state, const Dataset& data,
                         const Hyperparams& hyper, int* skipped_rate_updates = nullptr);

}  // namespace rjpois
