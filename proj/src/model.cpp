#include "rjpois/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rjpois/dists.hpp"

namespace rjpois {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Hyperparams::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha) || !positive(beta) || !positive(delta)) {
    throw std::invalid_argument("hyperparameters alpha, beta, delta must be positive");
  }
  if (k_max < 1) {
    throw std::invalid_argument("k_max must be at least 1");
  }
  if (!positive(split_u1.a) || !positive(split_u1.b) || !positive(split_u2.a) ||
      !positive(split_u2.b)) {
    throw std::invalid_argument("split Beta shapes must be positive");
  }
  if (!(move_mix >= 0.0 && move_mix <= 1.0)) {
    throw std::invalid_argument("move_mix must lie in [0, 1]");
  }
}

bool strictly_increasing(std::span<const double> values) {
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (!(values[j] > values[j - 1])) {
      return false;
    }
  }
  return true;
}

void MixtureState::validate(int k_max, std::size_t n) const {
  const int kk = k();
  if (kk < 1 || kk > k_max) {
    throw std::logic_error("component count " + std::to_string(kk) + " outside [1, k_max]");
  }
  if (weights.size() != rates.size()) {
    throw std::logic_error("rates and weights differ in length");
  }
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::logic_error("rates must be positive and finite");
    }
  }
  if (!strictly_increasing(rates)) {
    throw std::logic_error("rates are not strictly increasing");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::logic_error("negative weight");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::logic_error("weights do not sum to 1");
  }
  if (alloc.size() != n) {
    throw std::logic_error("allocation length differs from dataset size");
  }
  for (int z : alloc) {
    if (z < 0 || z >= kk) {
      throw std::logic_error("allocation index out of range");
    }
  }
}

bool MixtureState::is_valid(int k_max, std::size_t n) const {
  try {
    validate(k_max, n);
    return true;
  } catch (const std::logic_error&) {
    return false;
  }
}

SufficientStats SufficientStats::compute(std::span<const int> alloc, const Dataset& data, int k) {
  if (alloc.size() != data.size()) {
    throw std::invalid_argument("allocation length differs from dataset size");
  }
  SufficientStats stats;
  stats.occupancy.assign(k, 0);
  stats.count_sum.assign(k, 0.0);
  stats.exposure_sum.assign(k, 0.0);
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const int z = alloc[i];
    if (z < 0 || z >= k) {
      throw std::out_of_range("allocation index out of range");
    }
    stats.occupancy[z] += 1;
    stats.count_sum[z] += static_cast<double>(data.counts()[i]);
    stats.exposure_sum[z] += data.exposures()[i];
  }
  return stats;
}

double complete_loglik(std::span<const double> rates, std::span<const int> alloc,
                       const Dataset& data) {
  if (alloc.size() != data.size()) {
    throw std::invalid_argument("allocation length differs from dataset size");
  }
  std::vector<double> log_rates(rates.size());
  for (std::size_t j = 0; j < rates.size(); ++j) {
    log_rates[j] = std::log(rates[j]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const auto z = static_cast<std::size_t>(alloc[i]);
    total += poisson_term(data, i, rates[z], log_rates[z]);
  }
  return total;
}

double complete_loglik(const MixtureState& state, const Dataset& data) {
  return complete_loglik(state.rates, state.alloc, data);
}

double observed_loglik(std::span<const double> rates, std::span<const double> weights,
                       const Dataset& data) {
  const std::size_t k = rates.size();
  std::vector<double> log_rates(k);
  std::vector<double> log_weights(k);
  for (std::size_t j = 0; j < k; ++j) {
    log_rates[j] = std::log(rates[j]);
    log_weights[j] = weights[j] > 0.0 ? std::log(weights[j]) : -kInf;
  }
  std::vector<double> terms(k);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      terms[j] = log_weights[j] + poisson_term(data, i, rates[j], log_rates[j]);
    }
    total += log_sum_exp(terms);
  }
  return total;
}

double observed_loglik(const MixtureState& state, const Dataset& data) {
  return observed_loglik(state.rates, state.weights, data);
}

double log_prior(std::span<const double> rates, std::span<const double> weights,
                 const Hyperparams& hyper) {
  const auto k = static_cast<int>(rates.size());
  if (k < 1 || k > hyper.k_max || !strictly_increasing(rates)) {
    return -kInf;
  }
  double lp = -std::log(static_cast<double>(hyper.k_max));
  lp += std::lgamma(static_cast<double>(k) + 1.0);
  for (double r : rates) {
    lp += gamma_logpdf(r, hyper.alpha, hyper.beta);
  }
  lp += dirichlet_logpdf(weights, hyper.delta);
  return lp;
}

double log_prior(const MixtureState& state, const Hyperparams& hyper) {
  return log_prior(state.rates, state.weights, hyper);
}

double log_alloc_prior(const SufficientStats& stats, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t j = 0; j < stats.occupancy.size(); ++j) {
    if (stats.occupancy[j] == 0) {
      continue;
    }
    if (!(weights[j] > 0.0)) {
      return -kInf;
    }
    total += static_cast<double>(stats.occupancy[j]) * std::log(weights[j]);
  }
  return total;
}

Moments overdispersion_moments(const Hyperparams& hyper, double exposure) {
  const double mean = exposure * hyper.alpha / hyper.beta;
  const double variance = mean + exposure * exposure * hyper.alpha / (hyper.beta * hyper.beta);
  return {mean, variance};
}

}  // namespace rjpois
