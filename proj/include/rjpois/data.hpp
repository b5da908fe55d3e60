#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rjpois {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-class event counts and exposures. Immutable once built.
///
/// The constructor validates the invariants (equal lengths, n >= 1, counts
/// non-negative, exposures positive and finite, unique class ids) and caches
/// log(E_i) and log(D_i!) so the likelihood kernels never recompute them.
class Dataset {
 public:
  /// Empty `class_ids` are replaced by "1".."n".
  Dataset(std::vector<std::int64_t> counts, std::vector<double> exposures,
          std::vector<std::string> class_ids = {});

  std::size_t size() const { return counts_.size(); }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const double> exposures() const { return exposures_; }
  std::span<const std::string> class_ids() const { return class_ids_; }
  std::span<const double> log_exposures() const { return log_exposures_; }
  std::span<const double> log_factorials() const { return log_factorials_; }

  std::int64_t total_count() const { return total_count_; }
  double total_exposure() const { return total_exposure_; }

  bool operator==(const Dataset& other) const {
    return counts_ == other.counts_ && exposures_ == other.exposures_ &&
           class_ids_ == other.class_ids_;
  }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> exposures_;
  std::vector<std::string> class_ids_;
  std::vector<double> log_exposures_;
  std::vector<double> log_factorials_;
  std::int64_t total_count_ = 0;
  double total_exposure_ = 0.0;
};

/// Reads `class_id,deaths,exposure` CSV. Row numbers in error messages count
/// data rows from 1, excluding the header.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in);

/// Writes the same format with shortest round-trip float formatting.
void write_csv(const Dataset& data, const std::filesystem::path& path);
void write_csv(const Dataset& data, std::ostream& out);

struct FixedExposures {
  std::vector<double> values;
};

struct UniformExposures {
  double lo = 5.0;
  double hi = 50.0;
};

using ExposureLaw = std::variant<FixedExposures, UniformExposures>;

struct SyntheticSpec {
  std::vector<double> rates;    // strictly increasing
  std::vector<double> weights;  // simplex, same length as rates
  ExposureLaw exposure = UniformExposures{};
  std::size_t n = 72;
  std::uint64_t seed = 1;

  std::size_t k_true() const { return rates.size(); }
  void validate() const;
};

struct SyntheticData {
  Dataset data;
  std::vector<int> allocations;  // 0-based component index per class
};

/// Forward simulation of the exposure-weighted Poisson mixture:
/// z_i ~ Categorical(weights), E_i ~ exposure law, D_i ~ Poisson(rate[z_i] E_i).
SyntheticData simulate(const SyntheticSpec& spec);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace rjpois
