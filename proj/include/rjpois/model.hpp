#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rjpois/data.hpp"

namespace rjpois {

struct BetaShape {
  double a = 2.0;
  double b = 2.0;
};

/// Fixed prior and proposal constants.
struct Hyperparams {
  double alpha = 1.0;  // Gamma shape of the rate prior
  double beta = 1.0;   // Gamma rate of the rate prior
  double delta = 1.0;  // symmetric Dirichlet concentration of the weights
  int k_max = 72;
  BetaShape split_u1{};
  BetaShape split_u2{};
  double move_mix = 0.5;  // probability a sweep tries birth/death rather than split/merge

  void validate() const;
};

/// One point of the trans-dimensional state space.
///
/// Components are identified by the ordering rates[0] < ... < rates[k-1];
/// alloc holds 0-based component indices, one per class.
struct MixtureState {
  std::vector<double> rates;
  std::vector<double> weights;
  std::vector<int> alloc;

  int k() const { return static_cast<int>(rates.size()); }

  /// Throws std::logic_error naming the first violated invariant.
  void validate(int k_max, std::size_t n) const;
  bool is_valid(int k_max, std::size_t n) const;

  bool operator==(const MixtureState&) const = default;
};

/// Per-component occupancy and totals of the allocated counts and exposures.
struct SufficientStats {
  std::vector<std::int64_t> occupancy;
  std::vector<double> count_sum;
  std::vector<double> exposure_sum;

  static SufficientStats compute(std::span<const int> alloc, const Dataset& data, int k);
};

bool strictly_increasing(std::span<const double> values);

/// Log Poisson mass of D_i at mean rate * E_i using the dataset caches.
inline double poisson_term(const Dataset& data, std::size_t i, double rate, double log_rate) {
  const double d = static_cast<double>(data.counts()[i]);
  return d * (log_rate + data.log_exposures()[i]) - rate * data.exposures()[i] -
         data.log_factorials()[i];
}

/// sum_i log Poisson(D_i; rate[z_i] E_i).
double complete_loglik(std::span<const double> rates, std::span<const int> alloc,
                       const Dataset& data);
double complete_loglik(const MixtureState& state, const Dataset& data);

/// sum_i log sum_j w_j Poisson(D_i; rate_j E_i), via log-sum-exp.
double observed_loglik(std::span<const double> rates, std::span<const double> weights,
                       const Dataset& data);
double observed_loglik(const MixtureState& state, const Dataset& data);

/// log p(k) + log p(rates | k) + log p(weights | k).
///
/// The ordered rate prior carries the k! factor; p(k) is uniform on
/// {1..k_max}. Returns -inf when the ordering is violated or k > k_max.
double log_prior(std::span<const double> rates, std::span<const double> weights,
                 const Hyperparams& hyper);
double log_prior(const MixtureState& state, const Hyperparams& hyper);

/// sum_j n_j log w_j; -inf if an occupied component has zero weight.
double log_alloc_prior(const SufficientStats& stats, std::span<const double> weights);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Marginal mean and variance of a count with exposure E when its rate is
/// Gamma(alpha, beta) distributed.
Moments overdispersion_moments(const Hyperparams& hyper, double exposure);

}  // namespace rjpois
