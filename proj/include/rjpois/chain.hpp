#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rjpois/model.hpp"
#include "rjpois/rjmoves.hpp"

namespace rjpois {

enum class Scheme { combined, birth_death, split_merge };

std::string_view to_string(Scheme scheme);
/// Accepts "combined", "bd"/"birth_death", "sm"/"split_merge".
Scheme scheme_from_string(std::string_view name);

struct RunConfig {
  std::int64_t sweeps = 100000;
  std::int64_t burn_in = 10000;
  std::int64_t thin = 10;
  int n_chains = 4;
  /// Per-chain seeds. When empty, chain i uses base_seed + i.
  std::vector<std::uint64_t> seeds;
  std::uint64_t base_seed = 1;
  Scheme scheme = Scheme::combined;
  /// Starting component count; nullopt draws it uniformly from {1..k_max}.
  std::optional<int> init_k = 1;
  AcceptanceForm form = AcceptanceForm::marginalized;
  bool store_alloc = true;

  std::uint64_t chain_seed(int chain_index) const;
  std::int64_t expected_records() const { return (sweeps - burn_in) / thin; }
  void validate() const;
};

/// Attempted and accepted counts per move kind.
struct MoveTally {
  std::array<std::int64_t, 5> attempted{};
  std::array<std::int64_t, 5> accepted{};

  void record(MoveKind kind, bool was_accepted);
  std::int64_t attempts(MoveKind kind) const { return attempted[static_cast<std::size_t>(kind)]; }
  std::int64_t accepts(MoveKind kind) const { return accepted[static_cast<std::size_t>(kind)]; }
  MoveTally& operator+=(const MoveTally& other);
  bool operator==(const MoveTally&) const = default;
};

struct TraceRecord {
  std::int64_t sweep = 0;  // 0-based sweep index
  int k = 0;
  MoveKind move = MoveKind::none;
  bool accepted = false;
  double loglik = 0.0;  // observed log likelihood after the sweep
  std::vector<double> rates;
  std::vector<double> weights;
  std::vector<int> alloc;  // empty when allocations are not stored

  bool operator==(const TraceRecord&) const = default;
};

struct ChainTrace {
  int chain_index = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  /// Move outcomes over every post-burn-in sweep, thinned or not.
  MoveTally tally;

  bool operator==(const ChainTrace&) const = default;
};

/// Starting state: k components with rates drawn from the prior and sorted,
/// weights from Dirichlet(delta), allocations from their full conditionals.
MixtureState initial_state(Rng& rng, int k, const Dataset& data, const Hyperparams& hyper);

/// Result of one sweep's trans-dimensional step.
struct MoveOutcome {
  MoveKind kind = MoveKind::none;
  bool accepted = false;
};

/// Chooses and applies one trans-dimensional move to `state` in place.
MoveOutcome trans_dimensional_step(Rng& rng, MixtureState& state, const Dataset& data,
                                   const Hyperparams& hyper, const MoveProbs& probs,
                                   Scheme scheme, AcceptanceForm form);

ChainTrace run_chain(const RunConfig& config, int chain_index, const Dataset& data,
                     const Hyperparams& hyper, const MoveProbs& probs);

/// Runs every chain on its own thread when `parallel` is set; the traces are
/// identical either way.
std::vector<ChainTrace> run_multichain(const RunConfig& config, const Dataset& data,
                                       const Hyperparams& hyper, const MoveProbs& probs,
                                       bool parallel = true);

}  // namespace rjpois
