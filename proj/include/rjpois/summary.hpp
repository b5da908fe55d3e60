#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rjpois/chain.hpp"

namespace rjpois {

class InsufficientSamples : public std::runtime_error {
 public:
  InsufficientSamples(int k, std::int64_t found, std::int64_t required);
  std::int64_t found() const { return found_; }

 private:
  std::int64_t found_;
};

/// Visit frequencies of each k pooled over all retained records.
std::map<int, double> model_probabilities(std::span<const ChainTrace> traces);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Shortest interval spanning ceil(level * m) consecutive order statistics
/// of the m samples; the leftmost such window wins ties.
Interval hpd_interval(std::vector<double> samples, double level);

struct ParameterEstimate {
  std::string name;  // "rate_j" or "weight_j", 1-based
  double mean = 0.0;
  Interval hpd;
};

struct ConditionalEstimates {
  int k = 0;
  double level = 0.95;
  std::int64_t samples = 0;
  std::vector<ParameterEstimate> parameters;  // rate_1, weight_1, rate_2, ...
};

inline constexpr std::int64_t kMinConditionalSamples = 100;

/// Posterior means and HPD intervals of every rate and weight over the
/// records with exactly k components. Means are summed in sorted order so the
/// result does not depend on how the traces are ordered.
ConditionalEstimates conditional_estimates(std::span<const ChainTrace> traces, int k,
                                           double level = 0.95,
                                           std::int64_t min_samples = kMinConditionalSamples);

/// Entry (i, j): fraction of records with k components that put class i in
/// component j.
std::vector<std::vector<double>> allocation_matrix(
    std::span<const ChainTrace> traces, int k,
    std::int64_t min_samples = kMinConditionalSamples);

/// Number of retained records with exactly k components.
std::int64_t conditional_count(std::span<const ChainTrace> traces, int k);

}  // namespace rjpois
