#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rjpois/chain.hpp"
#include "rjpois/data.hpp"
#include "rjpois/diagnostics.hpp"

namespace rjpois {

// Files written per chain c into an output directory:
//   chain_<c>.csv  sweep,k,move,accepted,loglik,rate_1..rate_K,weight_1..weight_K
//                  (K = largest k in the trace; unused cells empty)
//   alloc_<c>.csv  sweep,<class_id>... with 1-based component labels
//   moves_<c>.csv  chain,seed,move,attempted,accepted (post burn-in tally)

void write_trace(const ChainTrace& trace, const Dataset& data, const std::filesystem::path& dir);

/// Reads every chain_<c>.csv in `dir` (with its alloc_/moves_ companions when
/// present), ordered by chain index. Throws DataError if none exist or a
/// file is malformed.
std::vector<ChainTrace> read_traces(const std::filesystem::path& dir);

/// checkpoint,statistic,p_value,pair
void write_diagnostics_csv(std::span<const DiagnosticRow> rows, const std::filesystem::path& path);

/// class_id,p_1..p_k
void write_allocation_csv(const std::vector<std::vector<double>>& matrix,
                          std::span<const std::string> class_ids,
                          const std::filesystem::path& path);

/// Class ids from the header of the first alloc_<c>.csv in `dir`; empty when
/// no allocation file exists.
std::vector<std::string> read_class_ids(const std::filesystem::path& dir);

/// Model probabilities, acceptance rates, and conditional estimates for every
/// k with enough samples (plus `extra_k` when given, which must have them).
nlohmann::ordered_json summary_json(std::span<const ChainTrace> traces, double level,
                                    std::optional<int> extra_k = std::nullopt);

}  // namespace rjpois
