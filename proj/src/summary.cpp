#include "rjpois/summary.hpp"

#include <algorithm>
#include <cmath>

namespace rjpois {

InsufficientSamples::InsufficientSamples(int k, std::int64_t found, std::int64_t required)
    : std::runtime_error("insufficient conditional samples for k = " + std::to_string(k) + ": " +
                         std::to_string(found) + " found, " + std::to_string(required) +
                         " required"),
      found_(found) {}

std::map<int, double> model_probabilities(std::span<const ChainTrace> traces) {
  std::map<int, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      ++counts[r.k];
      ++total;
    }
  }
  std::map<int, double> probs;
  for (const auto& [k, c] : counts) {
    probs[k] = static_cast<double>(c) / static_cast<double>(total);
  }
  return probs;
}

Interval hpd_interval(std::vector<double> samples, double level) {
  if (samples.empty()) {
    throw std::invalid_argument("HPD interval of an empty sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("HPD level must lie in (0, 1)");
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size();
  const auto span = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(level * static_cast<double>(m) - 1e-9)), 1, m);
  std::size_t best = 0;
  double best_width = samples[span - 1] - samples[0];
  for (std::size_t i = 1; i + span <= m; ++i) {
    const double width = samples[i + span - 1] - samples[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {samples[best], samples[best + span - 1]};
}

std::int64_t conditional_count(std::span<const ChainTrace> traces, int k) {
  std::int64_t n = 0;
  for (const auto& t : traces) {
    n += std::count_if(t.records.begin(), t.records.end(),
                       [k](const TraceRecord& r) { return r.k == k; });
  }
  return n;
}

ConditionalEstimates conditional_estimates(std::span<const ChainTrace> traces, int k,
                                           double level, std::int64_t min_samples) {
  const std::int64_t found = conditional_count(traces, k);
  if (found < std::max<std::int64_t>(min_samples, 1)) {
    throw InsufficientSamples(k, found, std::max<std::int64_t>(min_samples, 1));
  }
  std::vector<std::vector<double>> rates(k);
  std::vector<std::vector<double>> weights(k);
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      if (r.k != k) {
        continue;
      }
      for (int j = 0; j < k; ++j) {
        rates[j].push_back(r.rates[j]);
        weights[j].push_back(r.weights[j]);
      }
    }
  }
  const auto estimate = [level](std::string name, std::vector<double> values) {
    std::sort(values.begin(), values.end());
    // Offsets from the smallest sample; constant samples give their value exactly.
    const double base = values.front();
    double sum = 0.0;
    for (double v : values) {
      sum += v - base;
    }
    ParameterEstimate e;
    e.name = std::move(name);
    e.mean = base + sum / static_cast<double>(values.size());
    e.hpd = hpd_interval(std::move(values), level);
    return e;
  };
  ConditionalEstimates out;
  out.k = k;
  out.level = level;
  out.samples = found;
  for (int j = 0; j < k; ++j) {
    out.parameters.push_back(estimate("rate_" + std::to_string(j + 1), std::move(rates[j])));
    out.parameters.push_back(estimate("weight_" + std::to_string(j + 1), std::move(weights[j])));
  }
  return out;
}

std::vector<std::vector<double>> allocation_matrix(std::span<const ChainTrace> traces, int k,
                                                   std::int64_t min_samples) {
  const std::int64_t found = conditional_count(traces, k);
  if (found < std::max<std::int64_t>(min_samples, 1)) {
    throw InsufficientSamples(k, found, std::max<std::int64_t>(min_samples, 1));
  }
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t used = 0;
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      if (r.k != k) {
        continue;
      }
      if (r.alloc.empty()) {
        throw std::invalid_argument("trace records carry no allocations");
      }
      if (counts.empty()) {
        counts.assign(r.alloc.size(), std::vector<std::int64_t>(k, 0));
      } else if (counts.size() != r.alloc.size()) {
        throw std::invalid_argument("allocation vectors differ in length");
      }
      for (std::size_t i = 0; i < r.alloc.size(); ++i) {
        ++counts[i][static_cast<std::size_t>(r.alloc[i])];
      }
      ++used;
    }
  }
  std::vector<std::vector<double>> matrix(counts.size(), std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int j = 0; j < k; ++j) {
      matrix[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(used);
    }
  }
  return matrix;
}

}  // namespace rjpois
