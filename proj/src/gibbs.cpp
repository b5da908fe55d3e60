#include "rjpois/gibbs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rjpois {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogParams {
  std::vector<double> log_rates;
  std::vector<double> log_weights;

  LogParams(std::span<const double> rates, std::span<const double> weights)
      : log_rates(rates.size()), log_weights(weights.size()) {
    if (rates.size() != weights.size() || rates.empty()) {
      throw std::invalid_argument("rates and weights must be non-empty and of equal length");
    }
    for (std::size_t j = 0; j < rates.size(); ++j) {
      log_rates[j] = std::log(rates[j]);
      log_weights[j] = weights[j] > 0.0 ? std::log(weights[j]) : -kInf;
    }
  }
};

// Unnormalized log conditional of z_i; the factorial and exposure terms that
// do not depend on j are dropped.
void fill_log_row(const Dataset& data, std::size_t i, std::span<const double> rates,
                  const LogParams& lp, std::vector<double>& row) {
  const double d = static_cast<double>(data.counts()[i]);
  const double e = data.exposures()[i];
  for (std::size_t j = 0; j < rates.size(); ++j) {
    row[j] = lp.log_weights[j] + d * lp.log_rates[j] - rates[j] * e;
  }
}

// Writes exp(row - peak) into mass and returns log of the normalizer.
double normalize_log_row(const std::vector<double>& row, std::vector<double>& mass,
                         double& mass_total) {
  double peak = -kInf;
  for (double v : row) {
    peak = std::max(peak, v);
  }
  if (std::isinf(peak)) {
    throw std::domain_error("allocation conditional has no support");
  }
  mass_total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    mass[j] = std::exp(row[j] - peak);
    mass_total += mass[j];
  }
  return peak + std::log(mass_total);
}

}  // namespace

std::vector<double> alloc_conditional(std::int64_t count, double exposure,
                                      std::span<const double> rates,
                                      std::span<const double> weights) {
  const Dataset single({count}, {exposure});
  const LogParams lp(rates, weights);
  std::vector<double> row(rates.size());
  std::vector<double> mass(rates.size());
  double total = 0.0;
  fill_log_row(single, 0, rates, lp, row);
  normalize_log_row(row, mass, total);
  for (double& m : mass) {
    m /= total;
  }
  return mass;
}

AllocationDraw sample_allocations(Rng& rng, std::span<const double> rates,
                                  std::span<const double> weights, const Dataset& data) {
  const LogParams lp(rates, weights);
  const std::size_t k = rates.size();
  std::vector<double> row(k);
  std::vector<double> mass(k);
  AllocationDraw draw;
  draw.alloc.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    fill_log_row(data, i, rates, lp, row);
    double total = 0.0;
    const double log_norm = normalize_log_row(row, mass, total);
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    std::size_t chosen = k;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (mass[j] > 0.0) {
        cumulative += mass[j];
        last_positive = j;
        if (target < cumulative) {
          chosen = j;
          break;
        }
      }
    }
    if (chosen == k) {
      chosen = last_positive;
    }
    draw.alloc[i] = static_cast<int>(chosen);
    draw.log_prob += row[chosen] - log_norm;
  }
  return draw;
}

double eval_alloc_logprob(std::span<const int> alloc, std::span<const double> rates,
                          std::span<const double> weights, const Dataset& data) {
  if (alloc.size() != data.size()) {
    throw std::invalid_argument("allocation length differs from dataset size");
  }
  const LogParams lp(rates, weights);
  const std::size_t k = rates.size();
  std::vector<double> row(k);
  std::vector<double> mass(k);
  double log_prob = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int z = alloc[i];
    if (z < 0 || static_cast<std::size_t>(z) >= k) {
      throw std::out_of_range("allocation index " + std::to_string(z) + " out of range");
    }
    fill_log_row(data, i, rates, lp, row);
    double total = 0.0;
    const double log_norm = normalize_log_row(row, mass, total);
    log_prob += row[static_cast<std::size_t>(z)] - log_norm;
  }
  return log_prob;
}

RateUpdate update_rates(Rng& rng, std::span<const double> rates, const SufficientStats& stats,
                        const Hyperparams& hyper) {
  RateUpdate result{{rates.begin(), rates.end()}, 0};
  auto& out = result.rates;
  const std::size_t k = out.size();
  for (std::size_t j = 0; j < k; ++j) {
    const double lo = j == 0 ? 0.0 : out[j - 1];
    const double hi = j + 1 == k ? kInf : out[j + 1];
    const double shape = hyper.alpha + stats.count_sum[j];
    const double rate = hyper.beta + stats.exposure_sum[j];
    try {
      out[j] = truncated_gamma_sample(rng, shape, rate, lo, hi);
    } catch (const DegenerateTruncation&) {
      ++result.skipped;
    }
  }
  return result;
}

std::vector<double> update_weights(Rng& rng, const SufficientStats& stats,
                                   const Hyperparams& hyper) {
  std::vector<double> concentrations(stats.occupancy.size());
  for (std::size_t j = 0; j < concentrations.size(); ++j) {
    concentrations[j] = hyper.delta + static_cast<double>(stats.occupancy[j]);
  }
  return dirichlet_sample(rng, concentrations);
}

MixtureState gibbs_sweep(Rng& rng, const MixtureState& state, const Dataset& data,
                         const Hyperparams& hyper, int* skipped_rate_updates) {
  MixtureState next;
  next.alloc = sample_allocations(rng, state.rates, state.weights, data).alloc;
  const auto stats = SufficientStats::compute(next.alloc, data, state.k());
  auto rates = update_rates(rng, state.rates, stats, hyper);
  next.rates = std::move(rates.rates);
  next.weights = update_weights(rng, stats, hyper);
  if (skipped_rate_updates != nullptr) {
    *skipped_rate_updates = rates.skipped;
  }
  return next;
}

}  // namespace rjpois
