#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace rjpois {

/// Pseudo-random source owned by a single chain.
///
/// Wraps a 64-bit Mersenne Twister seeded through std::seed_seq so that the
/// full 64-bit seed participates in the state. Identical seeds give identical
/// streams. Satisfies UniformRandomBitGenerator so it can drive the standard
/// <random> distributions where convenient.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform draw on the open interval (0, 1).
  double uniform();
  /// Standard normal draw.
  double normal();
  /// Uniform index on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Raised when a truncated draw is requested on an interval that carries no
/// usable probability mass. Callers inside the sampler treat it as a null
/// update.
class DegenerateTruncation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double gamma_sample(Rng& rng, double shape, double rate);

/// Gamma(shape, rate) conditioned on the open interval (lo, hi).
///
/// Inverse-CDF on the interval when its mass is at least 1e-12, working on
/// whichever tail (lower or upper regularized incomplete gamma) keeps the
/// endpoints accurate. Smaller intervals fall back to rejection from a
/// tangent-exponential envelope anchored at the endpoint nearest the mode.
/// `hi` may be +infinity. Throws DegenerateTruncation if lo >= hi or no value
/// can be produced strictly inside the interval.
double truncated_gamma_sample(Rng& rng, double shape, double rate, double lo, double hi);

double gamma_logpdf(double x, double shape, double rate);

double beta_sample(Rng& rng, double a, double b);
double beta_logpdf(double x, double a, double b);

std::vector<double> dirichlet_sample(Rng& rng, std::span<const double> concentrations);
double dirichlet_logpdf(std::span<const double> x, double concentration);

/// Index drawn with the given probabilities. `probs` must be non-negative and
/// sum to 1 within 1e-9. Zero-probability entries are never returned.
std::size_t categorical_sample(Rng& rng, std::span<const double> probs);

/// log(n!) from a precomputed table for small n, lgamma(n + 1) beyond it.
double log_factorial(std::int64_t n);

double poisson_logpmf(std::int64_t count, double mean);

/// Draws a Poisson variate. Uses the standard library sampler on top of Rng.
std::int64_t poisson_sample(Rng& rng, double mean);

/// log(sum(exp(values))) with -inf entries ignored; -inf when all are -inf.
double log_sum_exp(std::span<const double> values);

}  // namespace rjpois
