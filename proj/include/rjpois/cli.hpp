#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rjpois/chain.hpp"
#include "rjpois/model.hpp"
#include "rjpois/rjmoves.hpp"

namespace rjpois {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything a run needs besides the data.
struct ExperimentConfig {
  Hyperparams hyper;
  double up_prob = 0.5;  // b_k for 1 < k < k_max
  RunConfig run;
  /// When no burn-in is given it defaults to a tenth of the sweeps, which is
  /// 10000 at the default sweep count.
  bool burn_in_set = false;

  MoveProbs move_probs() const { return MoveProbs::standard(hyper.k_max, up_prob); }
  /// Fills the burn-in default, then validates every part.
  void finalize();
};

/// Reads a JSON object with any of the keys alpha, beta, delta, k_max,
/// split_beta_u1, split_beta_u2 (two-element arrays), move_mix, b_k_default,
/// sweeps, burn_in, thin, chains, seeds, scheme, init_k (integer or
/// "random"), acceptance_form, store_alloc. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

struct OutputOptions {
  double level = 0.95;
  std::optional<int> k;                // also write allocation/estimates for this k
  std::optional<std::int64_t> window;  // diagnostics window; default tenth of a chain
  std::optional<std::int64_t> stride;  // diagnostics subsampling; default from autocorrelation of k
};

/// Writes diagnostics.csv, summary.json and allocation_k<k>.csv (for every k
/// reported in the summary, when allocations are present) into `dir`, and a
/// plain-text report to `report` when non-null.
void write_posterior_outputs(std::span<const ChainTrace> traces,
                             std::span<const std::string> class_ids,
                             const std::filesystem::path& dir, const OutputOptions& options,
                             std::ostream* report);

/// Each command takes its flags (without the program or command name) and
/// returns the process exit code: 0 on success, 2 for bad flags, paths or
/// inputs, 1 for failures while computing.
int cmd_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_summarize(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatches on args[0] ("run", "simulate" or "summarize").
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rjpois
