#include "rjpois/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "rjpois/dists.hpp"

namespace rjpois {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  throw DataError(what + " at row " + std::to_string(row));
}

}  // namespace

Dataset::Dataset(std::vector<std::int64_t> counts, std::vector<double> exposures,
                 std::vector<std::string> class_ids)
    : counts_(std::move(counts)), exposures_(std::move(exposures)), class_ids_(std::move(class_ids)) {
  if (counts_.empty()) {
    throw DataError("dataset must contain at least one class");
  }
  if (counts_.size() != exposures_.size()) {
    throw DataError("counts and exposures differ in length");
  }
  if (class_ids_.empty()) {
    class_ids_.reserve(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      class_ids_.push_back(std::to_string(i + 1));
    }
  } else if (class_ids_.size() != counts_.size()) {
    throw DataError("class ids and counts differ in length");
  }
  std::unordered_set<std::string> seen;
  log_exposures_.reserve(size());
  log_factorials_.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (counts_[i] < 0) {
      row_error(i + 1, "negative count");
    }
    if (!(exposures_[i] > 0.0) || !std::isfinite(exposures_[i])) {
      row_error(i + 1, "non-positive exposure");
    }
    if (!seen.insert(class_ids_[i]).second) {
      row_error(i + 1, "duplicate class_id '" + class_ids_[i] + "'");
    }
    log_exposures_.push_back(std::log(exposures_[i]));
    log_factorials_.push_back(log_factorial(counts_[i]));
    total_count_ += counts_[i];
    total_exposure_ += exposures_[i];
  }
}

Dataset parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty data file");
  }
  // Tolerate a UTF-8 byte order mark.
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) {
    header.remove_prefix(3);
  }
  if (trim(header) != "class_id,deaths,exposure") {
    throw DataError("expected header 'class_id,deaths,exposure'");
  }

  std::vector<std::int64_t> counts;
  std::vector<double> exposures;
  std::vector<std::string> ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      row_error(row, "expected 3 fields");
    }
    if (fields[0].empty()) {
      row_error(row, "empty class_id");
    }

    std::int64_t count = 0;
    const auto [cend, cerr] =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), count);
    if (cerr != std::errc{} || cend != fields[1].data() + fields[1].size()) {
      row_error(row, "non-integer count");
    }
    if (count < 0) {
      row_error(row, "negative count");
    }

    double exposure = 0.0;
    const auto [eend, eerr] =
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), exposure);
    if (eerr != std::errc{} || eend != fields[2].data() + fields[2].size()) {
      row_error(row, "non-numeric exposure");
    }
    if (!(exposure > 0.0) || !std::isfinite(exposure)) {
      row_error(row, "non-positive exposure");
    }

    ids.emplace_back(fields[0]);
    counts.push_back(count);
    exposures.push_back(exposure);
  }
  return Dataset(std::move(counts), std::move(exposures), std::move(ids));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open data file " + path.string());
  }
  return parse_csv(in);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "class_id,deaths,exposure\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.class_ids()[i] << ',' << data.counts()[i] << ','
        << format_double(data.exposures()[i]) << '\n';
  }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  write_csv(data, out);
}

void SyntheticSpec::validate() const {
  if (rates.empty()) {
    throw std::invalid_argument("simulate: at least one component required");
  }
  if (rates.size() != weights.size()) {
    throw std::invalid_argument("simulate: rates and weights differ in length");
  }
  if (n == 0) {
    throw std::invalid_argument("simulate: n must be positive");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (!(rates[j] > 0.0) || !std::isfinite(rates[j])) {
      throw std::invalid_argument("simulate: rates must be positive");
    }
    if (j > 0 && !(rates[j] > rates[j - 1])) {
      throw std::invalid_argument("simulate: rates must be strictly increasing");
    }
    if (!(weights[j] >= 0.0)) {
      throw std::invalid_argument("simulate: weights must be non-negative");
    }
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("simulate: weights must sum to 1");
  }
  if (const auto* fixed = std::get_if<FixedExposures>(&exposure)) {
    if (fixed->values.size() != n) {
      throw std::invalid_argument("simulate: fixed exposure list must have n entries");
    }
  } else {
    const auto& range = std::get<UniformExposures>(exposure);
    if (!(range.lo > 0.0) || !(range.hi > range.lo) || !std::isfinite(range.hi)) {
      throw std::invalid_argument("simulate: exposure range must satisfy 0 < lo < hi");
    }
  }
}

SyntheticData simulate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<std::int64_t> counts(spec.n);
  std::vector<double> exposures(spec.n);
  std::vector<int> allocations(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    allocations[i] = static_cast<int>(categorical_sample(rng, spec.weights));
    if (const auto* fixed = std::get_if<FixedExposures>(&spec.exposure)) {
      exposures[i] = fixed->values[i];
    } else {
      const auto& range = std::get<UniformExposures>(spec.exposure);
      exposures[i] = range.lo + (range.hi - range.lo) * rng.uniform();
    }
    counts[i] = poisson_sample(rng, spec.rates[allocations[i]] * exposures[i]);
  }
  return {Dataset(std::move(counts), std::move(exposures)), std::move(allocations)};
}

}  // namespace rjpois
