#include "rjpois/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rjpois/data.hpp"
#include "rjpois/diagnostics.hpp"
#include "rjpois/io.hpp"
#include "rjpois/summary.hpp"

namespace rjpois {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Input problems map to exit code 2, failures during computation to 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BetaShape beta_shape(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    throw ConfigError(key + " must be a two-element numeric array");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

template <class T>
T number(const json& value, const std::string& key) {
  if (!value.is_number()) {
    throw ConfigError(key + " must be a number");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) {
      throw ConfigError(key + " must be an integer");
    }
  }
  return value.get<T>();
}

std::optional<int> parse_init_k(const std::string& text) {
  if (text == "random") {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const int k = std::stoi(text, &used);
    if (used == text.size()) {
      return k;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("init_k must be a positive integer or \"random\"");
}

AcceptanceForm form_from_string(const std::string& name) {
  if (name == "marginalized") {
    return AcceptanceForm::marginalized;
  }
  if (name == "missing_data") {
    return AcceptanceForm::missing_data;
  }
  throw ConfigError("acceptance_form must be \"marginalized\" or \"missing_data\"");
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) {
    throw UsageError(flag + " is empty");
  }
  return values;
}

// CLI11 consumes a reversed argument vector.
template <class Body>
int guarded(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err, Body&& body) {
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << text;
}

void print_report(std::ostream& os, const nlohmann::ordered_json& summary) {
  os << "Posterior model order\n";
  os << "  k  probability\n";
  for (const auto& [k, p] : summary["model_probabilities"].items()) {
    os << std::setw(3) << k << "  " << std::fixed << std::setprecision(4) << p.get<double>()
       << '\n';
  }
  os << "\nAcceptance rates\n";
  for (const auto& [family, rate] : summary["acceptance_rates"].items()) {
    os << "  " << std::left << std::setw(12) << family << std::right;
    if (rate.is_null()) {
      os << "undefined\n";
    } else {
      os << std::fixed << std::setprecision(4) << rate.get<double>() << '\n';
    }
  }
  for (const auto& block : summary["conditional"]) {
    os << "\nEstimates conditional on k = " << block["k"].get<int>() << " ("
       << block["samples"].get<std::int64_t>() << " samples, "
       << std::setprecision(0) << block["level"].get<double>() * 100.0 << "% HPD)\n";
    for (const auto& p : block["parameters"]) {
      os << "  " << std::left << std::setw(10) << p["name"].get<std::string>() << std::right
         << std::fixed << std::setprecision(4) << std::setw(10) << p["mean"].get<double>()
         << "  (" << p["hpd"][0].get<double>() << ", " << p["hpd"][1].get<double>() << ")\n";
    }
  }
  os.unsetf(std::ios::floatfield);
  os << std::setprecision(6);
}

}  // namespace

void ExperimentConfig::finalize() {
  if (!burn_in_set) {
    run.burn_in = run.sweeps / 10;
  }
  hyper.validate();
  run.validate();
  if (run.init_k && *run.init_k > hyper.k_max) {
    throw ConfigError("init_k exceeds k_max");
  }
  if (!(up_prob > 0.0 && up_prob < 1.0)) {
    throw ConfigError("b_k_default must lie in (0, 1)");
  }
  move_probs().validate();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "alpha") {
      cfg.hyper.alpha = number<double>(value, key);
    } else if (key == "beta") {
      cfg.hyper.beta = number<double>(value, key);
    } else if (key == "delta") {
      cfg.hyper.delta = number<double>(value, key);
    } else if (key == "k_max") {
      cfg.hyper.k_max = number<int>(value, key);
    } else if (key == "split_beta_u1") {
      cfg.hyper.split_u1 = beta_shape(value, key);
    } else if (key == "split_beta_u2") {
      cfg.hyper.split_u2 = beta_shape(value, key);
    } else if (key == "move_mix") {
      cfg.hyper.move_mix = number<double>(value, key);
    } else if (key == "b_k_default") {
      cfg.up_prob = number<double>(value, key);
    } else if (key == "sweeps") {
      cfg.run.sweeps = number<std::int64_t>(value, key);
    } else if (key == "burn_in") {
      cfg.run.burn_in = number<std::int64_t>(value, key);
      cfg.burn_in_set = true;
    } else if (key == "thin") {
      cfg.run.thin = number<std::int64_t>(value, key);
    } else if (key == "chains") {
      cfg.run.n_chains = number<int>(value, key);
    } else if (key == "seeds") {
      if (!value.is_array()) {
        throw ConfigError("seeds must be an array of unsigned integers");
      }
      cfg.run.seeds.clear();
      for (const auto& s : value) {
        if (!s.is_number_unsigned()) {
          throw ConfigError("seeds must be an array of unsigned integers");
        }
        cfg.run.seeds.push_back(s.get<std::uint64_t>());
      }
    } else if (key == "scheme") {
      if (!value.is_string()) {
        throw ConfigError("scheme must be a string");
      }
      cfg.run.scheme = scheme_from_string(value.get<std::string>());
    } else if (key == "init_k") {
      cfg.run.init_k = value.is_string() ? parse_init_k(value.get<std::string>())
                                         : std::optional<int>(number<int>(value, key));
    } else if (key == "acceptance_form") {
      if (!value.is_string()) {
        throw ConfigError("acceptance_form must be a string");
      }
      cfg.run.form = form_from_string(value.get<std::string>());
    } else if (key == "store_alloc") {
      if (!value.is_boolean()) {
        throw ConfigError("store_alloc must be a boolean");
      }
      cfg.run.store_alloc = value.get<bool>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  if (path.extension() == ".toml") {
    throw ConfigError("TOML configs are not supported; use JSON");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void write_posterior_outputs(std::span<const ChainTrace> traces,
                             std::span<const std::string> class_ids, const fs::path& dir,
                             const OutputOptions& options, std::ostream* report) {
  fs::create_directories(dir);

  std::vector<DiagnosticRow> rows;
  if (traces.size() >= 2) {
    const auto window = options.window.value_or(default_window(traces));
    rows = diagnostics_table(traces, window, options.stride.value_or(default_stride(traces)));
  }
  write_diagnostics_csv(rows, dir / "diagnostics.csv");

  const auto summary = summary_json(traces, options.level, options.k);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  const bool has_alloc = !class_ids.empty() && !traces.empty() && !traces[0].records.empty() &&
                         !traces[0].records[0].alloc.empty();
  if (has_alloc) {
    for (const auto& block : summary["conditional"]) {
      const int k = block["k"].get<int>();
      write_allocation_csv(allocation_matrix(traces, k, 1), class_ids,
                           dir / ("allocation_k" + std::to_string(k) + ".csv"));
    }
  }
  if (report != nullptr) {
    print_report(*report, summary);
  }
}

int cmd_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit a Poisson mixture with an unknown number of components", "rjpois run"};
  std::string data_path;
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> scheme;
  std::optional<std::int64_t> sweeps;
  std::optional<std::int64_t> burn_in;
  std::optional<std::int64_t> thin;
  std::optional<int> chains;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> init_k;
  std::optional<std::string> form;
  std::optional<int> k_max;
  double level = 0.95;
  bool sequential = false;
  bool quiet = false;
  app.add_option("--data", data_path, "Dataset CSV (class_id,deaths,exposure)")->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--scheme", scheme, "combined, bd or sm");
  app.add_option("--sweeps", sweeps, "Sweeps per chain");
  app.add_option("--burn-in", burn_in, "Discarded initial sweeps");
  app.add_option("--thin", thin, "Keep every thin-th sweep");
  app.add_option("--chains", chains, "Number of chains");
  app.add_option("--seed", seed, "Base seed; chain i uses seed + i");
  app.add_option("--init-k", init_k, "Starting k, or \"random\"");
  app.add_option("--form", form, "Acceptance ratio form: marginalized or missing_data");
  app.add_option("--k-max", k_max, "Largest admissible k");
  app.add_option("--level", level, "HPD level")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--sequential", sequential, "Run chains one after another");
  app.add_flag("--quiet", quiet, "Do not print the summary report");

  return guarded(app, args, out, err, [&]() {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    }
    if (scheme) {
      cfg.run.scheme = scheme_from_string(*scheme);
    }
    if (sweeps) {
      cfg.run.sweeps = *sweeps;
    }
    if (burn_in) {
      cfg.run.burn_in = *burn_in;
      cfg.burn_in_set = true;
    }
    if (thin) {
      cfg.run.thin = *thin;
    }
    if (chains) {
      cfg.run.n_chains = *chains;
      if (!cfg.run.seeds.empty() && cfg.run.seeds.size() != static_cast<std::size_t>(*chains)) {
        cfg.run.seeds.clear();
      }
    }
    if (seed) {
      cfg.run.base_seed = *seed;
      cfg.run.seeds.clear();
    }
    if (init_k) {
      cfg.run.init_k = parse_init_k(*init_k);
    }
    if (form) {
      cfg.run.form = form_from_string(*form);
    }
    if (k_max) {
      cfg.hyper.k_max = *k_max;
    }
    cfg.finalize();

    if (!fs::is_regular_file(data_path)) {
      throw UsageError("data file " + data_path + " does not exist");
    }
    const Dataset data = load_csv(data_path);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      throw UsageError("cannot create output directory " + out_dir);
    }

    const auto traces =
        run_multichain(cfg.run, data, cfg.hyper, cfg.move_probs(), !sequential);
    for (const auto& trace : traces) {
      write_trace(trace, data, out_dir);
    }
    write_csv(data, fs::path(out_dir) / "data.csv");

    OutputOptions options;
    options.level = level;
    write_posterior_outputs(traces, data.class_ids(), out_dir, options, quiet ? nullptr : &out);
    return 0;
  });
}

int cmd_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate an exposure-weighted Poisson mixture dataset", "rjpois simulate"};
  std::optional<int> k;
  std::string rates_text;
  std::string weights_text;
  std::size_t n = 72;
  std::uint64_t seed = 1;
  std::string out_path;
  double exposure_lo = 5.0;
  double exposure_hi = 50.0;
  app.add_option("--k", k, "Number of components");
  app.add_option("--rates", rates_text, "Comma-separated increasing rates")->required();
  app.add_option("--weights", weights_text, "Comma-separated weights summing to 1")->required();
  app.add_option("--n", n, "Number of classes");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_path, "Output CSV; true allocations go to <stem>.truth.csv")
      ->required();
  app.add_option("--exposure-lo", exposure_lo, "Lower bound of uniform exposures");
  app.add_option("--exposure-hi", exposure_hi, "Upper bound of uniform exposures");

  return guarded(app, args, out, err, [&]() {
    SyntheticSpec spec;
    spec.rates = parse_list(rates_text, "--rates");
    spec.weights = parse_list(weights_text, "--weights");
    if (k && static_cast<std::size_t>(*k) != spec.rates.size()) {
      throw UsageError("--k does not match the number of rates");
    }
    if (spec.weights.size() != spec.rates.size()) {
      throw UsageError("--rates and --weights differ in length");
    }
    spec.n = n;
    spec.seed = seed;
    spec.exposure = UniformExposures{exposure_lo, exposure_hi};
    try {
      spec.validate();
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    const auto sim = simulate(spec);

    const fs::path path(out_path);
    if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
      throw UsageError("output directory " + path.parent_path().string() + " does not exist");
    }
    write_csv(sim.data, path);
    fs::path truth = path;
    truth.replace_extension(".truth.csv");
    std::ostringstream text;
    text << "class_id,component\n";
    for (std::size_t i = 0; i < sim.data.size(); ++i) {
      text << sim.data.class_ids()[i] << ',' << (sim.allocations[i] + 1) << '\n';
    }
    write_text(truth, text.str());
    out << "wrote " << path.string() << " and " << truth.string() << '\n';
    return 0;
  });
}

int cmd_summarize(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Summarize existing traces", "rjpois summarize"};
  std::string traces_dir;
  std::string out_dir;
  std::optional<int> k;
  double level = 0.95;
  std::optional<std::int64_t> window;
  std::optional<std::int64_t> stride;
  app.add_option("--traces", traces_dir, "Directory holding chain_<c>.csv files")->required();
  app.add_option("--out", out_dir, "Output directory (default: the traces directory)");
  app.add_option("--k", k, "Report estimates and allocations conditional on this k");
  app.add_option("--level", level, "HPD level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--window", window, "Diagnostics checkpoint spacing in records");
  app.add_option("--stride", stride, "Diagnostics subsampling stride (default: autocorrelation time of k)");

  return guarded(app, args, out, err, [&]() {
    if (!(level > 0.0 && level < 1.0)) {
      throw UsageError("--level must lie in (0, 1)");
    }
    std::vector<ChainTrace> traces;
    std::vector<std::string> class_ids;
    try {
      traces = read_traces(traces_dir);
      class_ids = read_class_ids(traces_dir);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    if (k) {
      const auto found = conditional_count(traces, *k);
      if (found < kMinConditionalSamples) {
        throw InsufficientSamples(*k, found, kMinConditionalSamples);
      }
    }
    OutputOptions options;
    options.level = level;
    options.k = k;
    options.window = window;
    options.stride = stride;
    write_posterior_outputs(traces, class_ids, out_dir.empty() ? traces_dir : out_dir, options,
                            &out);
    return 0;
  });
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string usage =
      "usage: rjpois <run|simulate|summarize> [options]\n"
      "       rjpois <command> --help\n";
  if (args.empty()) {
    err << usage;
    return 2;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "run") {
    return cmd_run(rest, out, err);
  }
  if (args[0] == "simulate") {
    return cmd_simulate(rest, out, err);
  }
  if (args[0] == "summarize") {
    return cmd_summarize(rest, out, err);
  }
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return 0;
  }
  err << "unknown command '" << args[0] << "'\n" << usage;
  return 2;
}

}  // namespace rjpois
