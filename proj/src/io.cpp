#include "rjpois/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

#include "rjpois/summary.hpp"

namespace rjpois {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    parts.push_back(field);
  }
  if (!line.empty() && line.back() == sep) {
    parts.emplace_back();
  }
  return parts;
}

template <class T>
T parse_number(const std::string& text, const fs::path& file, std::size_t line) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw DataError("malformed value '" + text + "' in " + file.filename().string() + " line " +
                    std::to_string(line));
  }
  return value;
}

void read_chain_file(const fs::path& path, ChainTrace& trace) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty trace file " + path.string());
  }
  const auto header = split(line, ',');
  if (header.size() < 5 || header[0] != "sweep" || header[1] != "k") {
    throw DataError("unexpected trace header in " + path.string());
  }
  const std::size_t max_k = (header.size() - 5) / 2;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw DataError("wrong field count in " + path.filename().string() + " line " +
                      std::to_string(line_no));
    }
    TraceRecord r;
    r.sweep = parse_number<std::int64_t>(f[0], path, line_no);
    r.k = parse_number<int>(f[1], path, line_no);
    r.move = move_kind_from_string(f[2]);
    r.accepted = parse_number<int>(f[3], path, line_no) != 0;
    r.loglik = parse_number<double>(f[4], path, line_no);
    if (r.k < 1 || static_cast<std::size_t>(r.k) > max_k) {
      throw DataError("component count out of range in " + path.filename().string());
    }
    for (int j = 0; j < r.k; ++j) {
      r.rates.push_back(parse_number<double>(f[5 + j], path, line_no));
      r.weights.push_back(parse_number<double>(f[5 + max_k + j], path, line_no));
    }
    trace.records.push_back(std::move(r));
  }
}

void read_alloc_file(const fs::path& path, ChainTrace& trace) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) {
    throw DataError("cannot read " + path.string());
  }
  std::size_t index = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (index >= trace.records.size()) {
      throw DataError("more allocation rows than trace records in " + path.string());
    }
    auto& r = trace.records[index++];
    if (parse_number<std::int64_t>(f[0], path, line_no) != r.sweep) {
      throw DataError("allocation sweep mismatch in " + path.string());
    }
    r.alloc.reserve(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) {
      const int z = parse_number<int>(f[i], path, line_no) - 1;
      if (z < 0 || z >= r.k) {
        throw DataError("allocation label out of range in " + path.string());
      }
      r.alloc.push_back(z);
    }
  }
  if (index != trace.records.size()) {
    throw DataError("fewer allocation rows than trace records in " + path.string());
  }
}

void read_moves_file(const fs::path& path, ChainTrace& trace) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) {
    throw DataError("cannot read " + path.string());
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) {
      throw DataError("wrong field count in " + path.string());
    }
    trace.seed = parse_number<std::uint64_t>(f[1], path, line_no);
    const auto idx = static_cast<std::size_t>(move_kind_from_string(f[2]));
    trace.tally.attempted[idx] = parse_number<std::int64_t>(f[3], path, line_no);
    trace.tally.accepted[idx] = parse_number<std::int64_t>(f[4], path, line_no);
  }
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void write_trace(const ChainTrace& trace, const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string suffix = std::to_string(trace.chain_index) + ".csv";

  int max_k = 1;
  for (const auto& r : trace.records) {
    max_k = std::max(max_k, r.k);
  }
  {
    auto out = open_out(dir / ("chain_" + suffix));
    out << "sweep,k,move,accepted,loglik";
    for (int j = 1; j <= max_k; ++j) {
      out << ",rate_" << j;
    }
    for (int j = 1; j <= max_k; ++j) {
      out << ",weight_" << j;
    }
    out << '\n';
    for (const auto& r : trace.records) {
      out << r.sweep << ',' << r.k << ',' << to_string(r.move) << ',' << (r.accepted ? 1 : 0)
          << ',' << format_double(r.loglik);
      for (int j = 0; j < max_k; ++j) {
        out << ',';
        if (j < r.k) {
          out << format_double(r.rates[j]);
        }
      }
      for (int j = 0; j < max_k; ++j) {
        out << ',';
        if (j < r.k) {
          out << format_double(r.weights[j]);
        }
      }
      out << '\n';
    }
  }

  const bool has_alloc =
      !trace.records.empty() && !trace.records.front().alloc.empty();
  if (has_alloc) {
    auto out = open_out(dir / ("alloc_" + suffix));
    out << "sweep";
    for (const auto& id : data.class_ids()) {
      out << ',' << id;
    }
    out << '\n';
    for (const auto& r : trace.records) {
      out << r.sweep;
      for (int z : r.alloc) {
        out << ',' << (z + 1);
      }
      out << '\n';
    }
  }

  auto out = open_out(dir / ("moves_" + suffix));
  out << "chain,seed,move,attempted,accepted\n";
  for (auto kind : {MoveKind::split, MoveKind::merge, MoveKind::birth, MoveKind::death}) {
    out << trace.chain_index << ',' << trace.seed << ',' << to_string(kind) << ','
        << trace.tally.attempts(kind) << ',' << trace.tally.accepts(kind) << '\n';
  }
}

std::vector<ChainTrace> read_traces(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("trace directory " + dir.string() + " does not exist");
  }
  static const std::regex pattern(R"(chain_(\d+)\.csv)");
  std::map<int, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      found.emplace(std::stoi(m[1].str()), entry.path());
    }
  }
  if (found.empty()) {
    throw DataError("no chain_<i>.csv trace files in " + dir.string());
  }
  std::vector<ChainTrace> traces;
  for (const auto& [index, path] : found) {
    ChainTrace trace;
    trace.chain_index = index;
    read_chain_file(path, trace);
    const auto suffix = std::to_string(index) + ".csv";
    if (fs::exists(dir / ("alloc_" + suffix))) {
      read_alloc_file(dir / ("alloc_" + suffix), trace);
    }
    if (fs::exists(dir / ("moves_" + suffix))) {
      read_moves_file(dir / ("moves_" + suffix), trace);
    } else {
      trace.tally = tally_from_records(trace);
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<std::string> read_class_ids(const fs::path& dir) {
  static const std::regex pattern(R"(alloc_(\d+)\.csv)");
  std::map<int, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      found.emplace(std::stoi(m[1].str()), entry.path());
    }
  }
  if (found.empty()) {
    return {};
  }
  std::ifstream in(found.begin()->second);
  std::string line;
  if (!in || !std::getline(in, line)) {
    throw DataError("cannot read " + found.begin()->second.string());
  }
  auto ids = split(line, ',');
  ids.erase(ids.begin());
  return ids;
}

void write_diagnostics_csv(std::span<const DiagnosticRow> rows, const fs::path& path) {
  auto out = open_out(path);
  out << "checkpoint,statistic,p_value,pair\n";
  for (const auto& row : rows) {
    out << row.checkpoint << ',' << format_double(row.statistic) << ','
        << format_double(row.p_value) << ',' << row.pair << '\n';
  }
}

void write_allocation_csv(const std::vector<std::vector<double>>& matrix,
                          std::span<const std::string> class_ids, const fs::path& path) {
  if (matrix.size() != class_ids.size()) {
    throw std::invalid_argument("allocation matrix rows differ from class id count");
  }
  auto out = open_out(path);
  out << "class_id";
  const std::size_t k = matrix.empty() ? 0 : matrix.front().size();
  for (std::size_t j = 1; j <= k; ++j) {
    out << ",p_" << j;
  }
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << class_ids[i];
    for (double p : matrix[i]) {
      out << ',' << format_double(p);
    }
    out << '\n';
  }
}

nlohmann::ordered_json summary_json(std::span<const ChainTrace> traces, double level,
                                    std::optional<int> extra_k) {
  nlohmann::ordered_json j;
  j["n_chains"] = traces.size();
  std::int64_t records = 0;
  for (const auto& t : traces) {
    records += static_cast<std::int64_t>(t.records.size());
  }
  j["records"] = records;

  nlohmann::ordered_json probs = nlohmann::ordered_json::object();
  const auto model_probs = model_probabilities(traces);
  for (const auto& [k, p] : model_probs) {
    probs[std::to_string(k)] = p;
  }
  j["model_probabilities"] = probs;

  const auto rates = acceptance_rates(traces);
  j["acceptance_rates"] = {{"birth_death", optional_json(rates.birth_death)},
                           {"split_merge", optional_json(rates.split_merge)},
                           {"combined", optional_json(rates.combined)}};

  nlohmann::ordered_json conditional = nlohmann::ordered_json::array();
  for (const auto& [k, p] : model_probs) {
    if (conditional_count(traces, k) < kMinConditionalSamples && extra_k != k) {
      continue;
    }
    const auto est = conditional_estimates(traces, k, level);
    nlohmann::ordered_json block;
    block["k"] = est.k;
    block["samples"] = est.samples;
    block["level"] = est.level;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& e : est.parameters) {
      params.push_back({{"name", e.name}, {"mean", e.mean}, {"hpd", {e.hpd.lo, e.hpd.hi}}});
    }
    block["parameters"] = params;
    conditional.push_back(block);
  }
  if (extra_k && !model_probs.contains(*extra_k)) {
    throw InsufficientSamples(*extra_k, 0, kMinConditionalSamples);
  }
  j["conditional"] = conditional;
  return j;
}

}  // namespace rjpois
