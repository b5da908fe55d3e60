#include "rjpois/chain.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "rjpois/gibbs.hpp"

namespace rjpois {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::combined:
      return "combined";
    case Scheme::birth_death:
      return "bd";
    case Scheme::split_merge:
      return "sm";
  }
  return "combined";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "combined") {
    return Scheme::combined;
  }
  if (name == "bd" || name == "birth_death" || name == "birth_death_only") {
    return Scheme::birth_death;
  }
  if (name == "sm" || name == "split_merge" || name == "split_merge_only") {
    return Scheme::split_merge;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::uint64_t RunConfig::chain_seed(int chain_index) const {
  if (!seeds.empty()) {
    return seeds.at(static_cast<std::size_t>(chain_index));
  }
  return base_seed + static_cast<std::uint64_t>(chain_index);
}

void RunConfig::validate() const {
  if (sweeps < 1) {
    throw std::invalid_argument("sweeps must be positive");
  }
  if (burn_in < 0 || burn_in >= sweeps) {
    throw std::invalid_argument("burn_in must satisfy 0 <= burn_in < sweeps");
  }
  if (thin < 1) {
    throw std::invalid_argument("thin must be positive");
  }
  if (n_chains < 1) {
    throw std::invalid_argument("n_chains must be positive");
  }
  if (!seeds.empty()) {
    if (seeds.size() != static_cast<std::size_t>(n_chains)) {
      throw std::invalid_argument("one seed per chain required");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw std::invalid_argument("chain seeds must be pairwise distinct");
    }
  }
  if (init_k && *init_k < 1) {
    throw std::invalid_argument("init_k must be positive");
  }
}

void MoveTally::record(MoveKind kind, bool was_accepted) {
  const auto idx = static_cast<std::size_t>(kind);
  ++attempted[idx];
  if (was_accepted) {
    ++accepted[idx];
  }
}

MoveTally& MoveTally::operator+=(const MoveTally& other) {
  for (std::size_t i = 0; i < attempted.size(); ++i) {
    attempted[i] += other.attempted[i];
    accepted[i] += other.accepted[i];
  }
  return *this;
}

MixtureState initial_state(Rng& rng, int k, const Dataset& data, const Hyperparams& hyper) {
  if (k < 1 || k > hyper.k_max) {
    throw std::invalid_argument("initial k outside [1, k_max]");
  }
  MixtureState state;
  do {
    state.rates.clear();
    for (int j = 0; j < k; ++j) {
      state.rates.push_back(gamma_sample(rng, hyper.alpha, hyper.beta));
    }
    std::sort(state.rates.begin(), state.rates.end());
  } while (!strictly_increasing(state.rates));
  state.weights = dirichlet_sample(rng, std::vector<double>(k, hyper.delta));
  state.alloc = sample_allocations(rng, state.rates, state.weights, data).alloc;
  return state;
}

MoveOutcome trans_dimensional_step(Rng& rng, MixtureState& state, const Dataset& data,
                                   const Hyperparams& hyper, const MoveProbs& probs,
                                   Scheme scheme, AcceptanceForm form) {
  const int k = state.k();
  bool birth_death = scheme == Scheme::birth_death;
  if (scheme == Scheme::combined) {
    birth_death = rng.uniform() < hyper.move_mix;
  }
  const double up = birth_death ? probs.birth[k] : probs.split[k];
  const double down = birth_death ? probs.death[k] : probs.merge[k];
  if (up + down <= 0.0) {
    return {};
  }
  const double u = rng.uniform();
  if (u >= up + down) {
    return {};
  }
  const bool increase = u < up;

  MoveProposal proposal;
  if (birth_death) {
    proposal = increase ? propose_birth(rng, state, data, hyper, probs, form)
                        : propose_death(rng, state, data, hyper, probs, form);
  } else {
    proposal = increase ? propose_split(rng, state, data, hyper, probs, form)
                        : propose_merge(rng, state, data, hyper, probs, form);
  }
  MoveOutcome outcome{proposal.kind, false};
  if (!proposal.rejected_immediately && std::log(rng.uniform()) < proposal.log_accept_ratio) {
    state = std::move(proposal.proposed);
    outcome.accepted = true;
  }
  return outcome;
}

ChainTrace run_chain(const RunConfig& config, int chain_index, const Dataset& data,
                     const Hyperparams& hyper, const MoveProbs& probs) {
  config.validate();
  hyper.validate();
  probs.validate();
  if (probs.k_max() != hyper.k_max) {
    throw std::invalid_argument("move probabilities and hyperparameters disagree on k_max");
  }
  ChainTrace trace;
  trace.chain_index = chain_index;
  trace.seed = config.chain_seed(chain_index);
  trace.records.reserve(static_cast<std::size_t>(config.expected_records()));

  Rng rng(trace.seed);
  const int k0 = config.init_k ? *config.init_k
                               : static_cast<int>(rng.uniform_index(hyper.k_max)) + 1;
  if (k0 > hyper.k_max) {
    throw std::invalid_argument("init_k exceeds k_max");
  }
  MixtureState state = initial_state(rng, k0, data, hyper);

  for (std::int64_t sweep = 0; sweep < config.sweeps; ++sweep) {
    state = gibbs_sweep(rng, state, data, hyper);
    const auto outcome =
        trans_dimensional_step(rng, state, data, hyper, probs, config.scheme, config.form);
    if (sweep < config.burn_in) {
      continue;
    }
    if (outcome.kind != MoveKind::none) {
      trace.tally.record(outcome.kind, outcome.accepted);
    }
    if ((sweep - config.burn_in + 1) % config.thin != 0) {
      continue;
    }
    TraceRecord rec;
    rec.sweep = sweep;
    rec.k = state.k();
    rec.move = outcome.kind;
    rec.accepted = outcome.accepted;
    rec.loglik = observed_loglik(state, data);
    rec.rates = state.rates;
    rec.weights = state.weights;
    if (config.store_alloc) {
      rec.alloc = state.alloc;
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

std::vector<ChainTrace> run_multichain(const RunConfig& config, const Dataset& data,
                                       const Hyperparams& hyper, const MoveProbs& probs,
                                       bool parallel) {
  config.validate();
  std::vector<ChainTrace> traces(static_cast<std::size_t>(config.n_chains));
  if (!parallel || config.n_chains == 1) {
    for (int c = 0; c < config.n_chains; ++c) {
      traces[c] = run_chain(config, c, data, hyper, probs);
    }
    return traces;
  }
  std::vector<std::exception_ptr> errors(traces.size());
  {
    std::vector<std::jthread> workers;
    workers.reserve(traces.size());
    for (int c = 0; c < config.n_chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          traces[c] = run_chain(config, c, data, hyper, probs);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
  return traces;
}

}  // namespace rjpois
