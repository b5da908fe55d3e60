#include "rjpois/dists.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace rjpois {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Interval mass below which inverse-CDF sampling is abandoned for rejection.
constexpr double kMinInverseMass = 1e-12;
constexpr int kMaxRejectionTries = 10000;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

constexpr std::size_t kLogFactorialTableSize = 1024;

const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
  static const auto table = [] {
    std::array<double, kLogFactorialTableSize> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    }
    return t;
  }();
  return table;
}

bool strictly_inside(double x, double lo, double hi) { return x > lo && x < hi; }

// Log of the unnormalized Gamma density, x^(shape-1) e^(-rate x).
double gamma_log_kernel(double x, double shape, double rate) {
  return (shape - 1.0) * std::log(x) - rate * x;
}

// Draw from Exp(slope) restricted to (0, width); width may be infinite.
double truncated_exponential(Rng& rng, double slope, double width) {
  const double u = rng.uniform();
  if (slope <= 0.0) {
    return u * width;
  }
  if (std::isinf(width)) {
    return -std::log(u) / slope;
  }
  // -log(1 - u (1 - e^{-s w})) / s, written with expm1/log1p for small s w.
  return -std::log1p(u * std::expm1(-slope * width)) / slope;
}

double truncated_gamma_rejection(Rng& rng, double shape, double rate, double lo, double hi) {
  const double mode = shape > 1.0 ? (shape - 1.0) / rate : 0.0;
  const double width = hi - lo;
  for (int attempt = 0; attempt < kMaxRejectionTries; ++attempt) {
    double x = 0.0;
    double log_accept = 0.0;
    if (lo == 0.0 && mode == 0.0) {
      // Proposal proportional to x^(shape-1) on (0, hi); hi is finite here.
      x = hi * std::exp(std::log(rng.uniform()) / shape);
      log_accept = -rate * x;
    } else if (lo >= mode) {
      // Density is decreasing on the interval; the tangent of the log density
      // at lo bounds it from above.
      const double slope = shape >= 1.0 ? rate - (shape - 1.0) / lo : rate;
      x = lo + truncated_exponential(rng, slope, width);
      log_accept = gamma_log_kernel(x, shape, rate) - gamma_log_kernel(lo, shape, rate) +
                   slope * (x - lo);
    } else if (hi <= mode) {
      // Increasing density: tangent at hi, proposal mirrored downward.
      const double slope = (shape - 1.0) / hi - rate;
      x = hi - truncated_exponential(rng, slope, width);
      log_accept = gamma_log_kernel(x, shape, rate) - gamma_log_kernel(hi, shape, rate) -
                   slope * (x - hi);
    } else {
      // Mode inside a tiny interval: uniform proposal under the modal height.
      x = lo + rng.uniform() * width;
      log_accept = gamma_log_kernel(x, shape, rate) - gamma_log_kernel(mode, shape, rate);
    }
    if (!strictly_inside(x, lo, hi)) {
      continue;
    }
    if (std::log(rng.uniform()) < std::min(log_accept, 0.0)) {
      return x;
    }
  }
  throw DegenerateTruncation("truncated gamma: rejection sampler exhausted");
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits, offset by half a step so neither 0 nor 1 is produced.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  // Marsaglia polar method; the second variate is discarded to keep Rng free
  // of distribution state.
  while (true) {
    const double v1 = 2.0 * uniform() - 1.0;
    const double v2 = 2.0 * uniform() - 1.0;
    const double s = v1 * v1 + v2 * v2;
    if (s > 0.0 && s < 1.0) {
      return v1 * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_index: empty range");
  }
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double gamma_sample(Rng& rng, double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  // Marsaglia and Tsang; shapes below one are boosted by one and corrected
  // with a U^(1/shape) factor.
  const bool boosted = shape < 1.0;
  const double a = boosted ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double value = 0.0;
  while (true) {
    const double z = rng.normal();
    const double t = 1.0 + c * z;
    if (t <= 0.0) {
      continue;
    }
    const double v = t * t * t;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2 || std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
      value = d * v;
      break;
    }
  }
  if (boosted) {
    value *= std::exp(std::log(rng.uniform()) / shape);
  }
  return value / rate;
}

double truncated_gamma_sample(Rng& rng, double shape, double rate, double lo, double hi) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  if (!(lo >= 0.0) || std::isnan(hi)) {
    throw std::invalid_argument("truncated gamma: lower bound must be non-negative");
  }
  if (!(lo < hi) || !(std::nextafter(lo, kInf) < hi)) {
    throw DegenerateTruncation("truncated gamma: empty interval");
  }
  if (lo == 0.0 && std::isinf(hi)) {
    return gamma_sample(rng, shape, rate);
  }

  namespace bm = boost::math;
  const double x_lo = lo * rate;
  const double x_hi = hi * rate;
  const double scaled_mode = std::max(shape - 1.0, 0.0);
  double candidate = -1.0;
  try {
    if (x_lo >= scaled_mode) {
      // Upper tail: complemented CDF keeps precision far from the mode.
      const double q_lo = bm::gamma_q(shape, x_lo);
      const double q_hi = std::isinf(x_hi) ? 0.0 : bm::gamma_q(shape, x_hi);
      const double mass = q_lo - q_hi;
      if (mass >= kMinInverseMass) {
        const double q = q_hi + rng.uniform() * mass;
        candidate = bm::gamma_q_inv(shape, q) / rate;
      }
    } else {
      const double p_lo = bm::gamma_p(shape, x_lo);
      const double p_hi = std::isinf(x_hi) ? 1.0 : bm::gamma_p(shape, x_hi);
      const double mass = p_hi - p_lo;
      if (mass >= kMinInverseMass) {
        const double p = p_lo + rng.uniform() * mass;
        candidate = bm::gamma_p_inv(shape, p) / rate;
      }
    }
  } catch (const std::runtime_error&) {
    // Overflow inside the incomplete gamma for extreme shapes; reject instead.
    candidate = -1.0;
  } catch (const std::domain_error&) {
    candidate = -1.0;
  }
  if (strictly_inside(candidate, lo, hi)) {
    return candidate;
  }
  return truncated_gamma_rejection(rng, shape, rate, lo, hi);
}

double gamma_logpdf(double x, double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  if (!(x > 0.0)) {
    return -kInf;
  }
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double beta_sample(Rng& rng, double a, double b) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  while (true) {
    const double x = gamma_sample(rng, a, 1.0);
    const double y = gamma_sample(rng, b, 1.0);
    const double v = x / (x + y);
    if (v > 0.0 && v < 1.0) {
      return v;
    }
  }
}

double beta_logpdf(double x, double a, double b) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  if (!(x > 0.0 && x < 1.0)) {
    throw std::invalid_argument("beta_logpdf: x must lie in (0, 1)");
  }
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

std::vector<double> dirichlet_sample(Rng& rng, std::span<const double> concentrations) {
  if (concentrations.empty()) {
    throw std::invalid_argument("dirichlet_sample: no components");
  }
  for (double c : concentrations) {
    require_positive(c, "dirichlet concentration");
  }
  if (concentrations.size() == 1) {
    return {1.0};
  }
  std::vector<double> draw(concentrations.size());
  while (true) {
    double total = 0.0;
    for (std::size_t j = 0; j < draw.size(); ++j) {
      draw[j] = gamma_sample(rng, concentrations[j], 1.0);
      total += draw[j];
    }
    if (total > 0.0 && std::isfinite(total)) {
      for (double& v : draw) {
        v /= total;
      }
      return draw;
    }
  }
}

double dirichlet_logpdf(std::span<const double> x, double concentration) {
  require_positive(concentration, "dirichlet concentration");
  const auto k = static_cast<double>(x.size());
  double lp = std::lgamma(k * concentration) - k * std::lgamma(concentration);
  if (concentration != 1.0) {
    for (double v : x) {
      lp += (concentration - 1.0) * std::log(v);
    }
  }
  return lp;
}

std::size_t categorical_sample(Rng& rng, std::span<const double> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("categorical_sample: empty probability vector");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("categorical_sample: negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("categorical_sample: probabilities do not sum to 1");
  }
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] > 0.0) {
      cumulative += probs[j];
      last_positive = j;
      if (target < cumulative) {
        return j;
      }
    }
  }
  return last_positive;
}

double log_factorial(std::int64_t n) {
  if (n < 0) {
    throw std::invalid_argument("log_factorial: negative argument");
  }
  const auto& table = log_factorial_table();
  if (static_cast<std::size_t>(n) < table.size()) {
    return table[static_cast<std::size_t>(n)];
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double poisson_logpmf(std::int64_t count, double mean) {
  if (count < 0) {
    throw std::invalid_argument("poisson_logpmf: negative count");
  }
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson_logpmf: mean must be positive");
  }
  const double d = static_cast<double>(count);
  return (count == 0 ? 0.0 : d * std::log(mean)) - mean - log_factorial(count);
}

std::int64_t poisson_sample(Rng& rng, double mean) {
  require_positive(mean, "poisson mean");
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

double log_sum_exp(std::span<const double> values) {
  double peak = -kInf;
  for (double v : values) {
    peak = std::max(peak, v);
  }
  if (std::isinf(peak)) {
    return peak;
  }
  double total = 0.0;
  for (double v : values) {
    total += std::exp(v - peak);
  }
  return peak + std::log(total);
}

}  // namespace rjpois
