#include "rjpois/rjmoves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rjpois/gibbs.hpp"

namespace rjpois {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_open_unit(double u) { return u > 0.0 && u < 1.0; }

double safe_log(double p) { return p > 0.0 ? std::log(p) : -kInf; }

MoveProposal rejected(MoveKind kind, MoveAux aux) {
  MoveProposal p;
  p.kind = kind;
  p.rejected_immediately = true;
  p.log_accept_ratio = -kInf;
  p.aux = aux;
  return p;
}

// Fills proposed.alloc either from the caller or by drawing from the full
// conditionals at the proposed parameters, and records log p_a.
void attach_allocations(Rng& rng, MoveProposal& proposal, const Dataset& data,
                        const std::vector<int>* proposed_alloc) {
  auto& s = proposal.proposed;
  if (proposed_alloc != nullptr) {
    s.alloc = *proposed_alloc;
    proposal.log_pa_proposed = eval_alloc_logprob(s.alloc, s.rates, s.weights, data);
  } else {
    auto draw = sample_allocations(rng, s.rates, s.weights, data);
    s.alloc = std::move(draw.alloc);
    proposal.log_pa_proposed = draw.log_prob;
  }
}

double current_log_pa(const MixtureState& state, const Dataset& data, AcceptanceForm form) {
  if (form == AcceptanceForm::marginalized) {
    return 0.0;
  }
  return eval_alloc_logprob(state.alloc, state.rates, state.weights, data);
}

bool valid_parameters(const MixtureState& s) {
  for (std::size_t j = 0; j < s.rates.size(); ++j) {
    if (!(s.rates[j] > 0.0) || !std::isfinite(s.rates[j]) || !(s.weights[j] >= 0.0)) {
      return false;
    }
  }
  return strictly_increasing(s.rates);
}

}  // namespace

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::none:
      return "none";
    case MoveKind::split:
      return "split";
    case MoveKind::merge:
      return "merge";
    case MoveKind::birth:
      return "birth";
    case MoveKind::death:
      return "death";
  }
  return "none";
}

MoveKind move_kind_from_string(std::string_view name) {
  for (auto kind : {MoveKind::none, MoveKind::split, MoveKind::merge, MoveKind::birth,
                    MoveKind::death}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown move kind '" + std::string(name) + "'");
}

MoveProbs MoveProbs::standard(int k_max, double up_prob) {
  if (k_max < 1) {
    throw std::invalid_argument("k_max must be at least 1");
  }
  if (!(up_prob > 0.0 && up_prob < 1.0)) {
    throw std::invalid_argument("up_prob must lie in (0, 1)");
  }
  const auto size = static_cast<std::size_t>(k_max) + 1;
  MoveProbs probs{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0),
                  std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)};
  for (int k = 1; k <= k_max; ++k) {
    double up = up_prob;
    if (k == k_max) {
      up = 0.0;
    } else if (k == 1) {
      up = 1.0;
    }
    const double down = (k == 1) ? 0.0 : 1.0 - up;
    probs.birth[k] = probs.split[k] = up;
    probs.death[k] = probs.merge[k] = down;
  }
  return probs;
}

void MoveProbs::validate() const {
  const std::size_t size = birth.size();
  if (size < 2 || death.size() != size || split.size() != size || merge.size() != size) {
    throw std::invalid_argument("move probabilities must cover k = 1..k_max");
  }
  const int kmax = k_max();
  for (int k = 1; k <= kmax; ++k) {
    for (double p : {birth[k], death[k], split[k], merge[k]}) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("move probabilities must lie in [0, 1]");
      }
    }
    if (birth[k] + death[k] > 1.0 + 1e-12 || split[k] + merge[k] > 1.0 + 1e-12) {
      throw std::invalid_argument("move probabilities exceed 1 at k = " + std::to_string(k));
    }
  }
  if (death[1] != 0.0 || merge[1] != 0.0 || birth[kmax] != 0.0 || split[kmax] != 0.0) {
    throw std::invalid_argument("moves leaving [1, k_max] must have zero probability");
  }
}

SplitTransform split_transform(double weight, double rate, double u1, double u2) {
  if (!in_open_unit(u1) || !in_open_unit(u2)) {
    throw std::invalid_argument("split variables must lie in (0, 1)");
  }
  if (!(weight > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("split requires positive weight and rate");
  }
  SplitTransform t;
  t.weight1 = weight * u1;
  t.weight2 = weight * (1.0 - u1);
  t.rate1 = rate * u2;
  t.rate2 = rate * (1.0 - u1 * u2) / (1.0 - u1);
  t.log_jacobian = std::log(rate) + std::log(weight) - std::log1p(-u1);
  return t;
}

MergeTransform merge_transform(double weight1, double rate1, double weight2, double rate2) {
  if (!(weight1 > 0.0) || !(weight2 > 0.0) || !(rate1 > 0.0) || !(rate2 > 0.0)) {
    throw std::invalid_argument("merge requires positive weights and rates");
  }
  if (rate1 > rate2) {
    throw std::invalid_argument("merge requires ordered rates");
  }
  MergeTransform m;
  m.weight = weight1 + weight2;
  m.rate = (weight1 * rate1 + weight2 * rate2) / m.weight;
  if (rate1 == rate2) {
    m.rate = rate1;
  }
  m.u1 = weight1 / m.weight;
  m.u2 = rate1 / m.rate;
  return m;
}

BirthTransform birth_transform(std::span<const double> rates, std::span<const double> weights,
                               double new_weight, double new_rate) {
  if (!in_open_unit(new_weight) || !(new_rate > 0.0)) {
    throw std::invalid_argument("birth requires new weight in (0, 1) and positive rate");
  }
  const std::size_t k = rates.size();
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(rates.begin(), rates.end(), new_rate) - rates.begin());
  if (pos < k && rates[pos] == new_rate) {
    throw std::invalid_argument("birth rate ties an existing component");
  }
  BirthTransform t;
  t.rates.reserve(k + 1);
  t.weights.reserve(k + 1);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == pos) {
      t.rates.push_back(new_rate);
      t.weights.push_back(new_weight);
    }
    t.rates.push_back(rates[j]);
    t.weights.push_back(weights[j] * (1.0 - new_weight));
  }
  if (pos == k) {
    t.rates.push_back(new_rate);
    t.weights.push_back(new_weight);
  }
  t.inserted = pos;
  t.log_jacobian = static_cast<double>(k - 1) * std::log1p(-new_weight);
  return t;
}

DeathTransform death_transform(std::span<const double> rates, std::span<const double> weights,
                               std::size_t index) {
  const std::size_t k = rates.size();
  if (k < 2) {
    throw std::invalid_argument("death requires at least two components");
  }
  if (index >= k) {
    throw std::out_of_range("death index out of range");
  }
  DeathTransform t;
  t.removed_weight = weights[index];
  t.removed_rate = rates[index];
  double remaining = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j != index) {
      t.rates.push_back(rates[j]);
      t.weights.push_back(weights[j]);
      remaining += weights[j];
    }
  }
  if (!(remaining > 0.0)) {
    throw std::domain_error("death leaves no weight on the remaining components");
  }
  for (double& w : t.weights) {
    w /= remaining;
  }
  return t;
}

double move_data_term(const MixtureState& state, double log_pa, const Dataset& data,
                      AcceptanceForm form) {
  if (form == AcceptanceForm::marginalized) {
    return observed_loglik(state, data);
  }
  const auto stats = SufficientStats::compute(state.alloc, data, state.k());
  return log_alloc_prior(stats, state.weights) + complete_loglik(state, data) - log_pa;
}

double split_log_ratio(const MixtureState& small, double small_log_pa, const MixtureState& big,
                       double big_log_pa, const MoveAux& aux, const Dataset& data,
                       const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  const int k = small.k();
  double log_a = log_prior(big, hyper) - log_prior(small, hyper);
  log_a += move_data_term(big, big_log_pa, data, form) -
           move_data_term(small, small_log_pa, data, form);
  log_a += safe_log(probs.merge[k + 1]) - safe_log(probs.split[k]);
  log_a -= beta_logpdf(aux.u1, hyper.split_u1.a, hyper.split_u1.b);
  log_a -= beta_logpdf(aux.u2, hyper.split_u2.a, hyper.split_u2.b);
  log_a += std::log(aux.merged_rate) + std::log(aux.merged_weight) - std::log1p(-aux.u1);
  return log_a;
}

double birth_log_ratio(const MixtureState& small, double small_log_pa, const MixtureState& big,
                       double big_log_pa, const MoveAux& aux, const Dataset& data,
                       const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  const int k = small.k();
  const double kd = static_cast<double>(k);
  double log_a = log_prior(big, hyper) - log_prior(small, hyper);
  log_a += move_data_term(big, big_log_pa, data, form) -
           move_data_term(small, small_log_pa, data, form);
  // Death picks one of the k + 1 components uniformly.
  log_a += safe_log(probs.death[k + 1]) - std::log(kd + 1.0) - safe_log(probs.birth[k]);
  log_a -= beta_logpdf(aux.new_weight, 1.0, kd);
  log_a -= gamma_logpdf(aux.new_rate, hyper.alpha, hyper.beta);
  log_a += (kd - 1.0) * std::log1p(-aux.new_weight);
  return log_a;
}

double birth_log_ratio_reduced(const MixtureState& small, double small_log_pa,
                               const MixtureState& big, double big_log_pa, const Dataset& data,
                               const MoveProbs& probs, AcceptanceForm form) {
  const int k = small.k();
  return move_data_term(big, big_log_pa, data, form) -
         move_data_term(small, small_log_pa, data, form) + safe_log(probs.death[k + 1]) -
         safe_log(probs.birth[k]);
}

MoveProposal propose_split_with(Rng& rng, const MixtureState& state, std::size_t component,
                                double u1, double u2, const Dataset& data,
                                const Hyperparams& hyper, const MoveProbs& probs,
                                AcceptanceForm form, const std::vector<int>* proposed_alloc) {
  const std::size_t k = state.rates.size();
  if (static_cast<int>(k) >= hyper.k_max) {
    throw std::logic_error("no split available at k = k_max");
  }
  if (component >= k) {
    throw std::out_of_range("split component out of range");
  }
  MoveAux aux;
  aux.component = component;
  aux.u1 = u1;
  aux.u2 = u2;
  aux.merged_weight = state.weights[component];
  aux.merged_rate = state.rates[component];
  if (!(aux.merged_weight > 0.0)) {
    return rejected(MoveKind::split, aux);
  }
  const auto t = split_transform(aux.merged_weight, aux.merged_rate, u1, u2);

  MoveProposal proposal;
  proposal.kind = MoveKind::split;
  proposal.aux = aux;
  auto& s = proposal.proposed;
  s.rates.reserve(k + 1);
  s.weights.reserve(k + 1);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == component) {
      s.rates.insert(s.rates.end(), {t.rate1, t.rate2});
      s.weights.insert(s.weights.end(), {t.weight1, t.weight2});
    } else {
      s.rates.push_back(state.rates[j]);
      s.weights.push_back(state.weights[j]);
    }
  }
  // A split that breaks the ordering has no merge counterpart.
  if (!valid_parameters(s) || !std::isfinite(t.log_jacobian)) {
    return rejected(MoveKind::split, aux);
  }
  attach_allocations(rng, proposal, data, proposed_alloc);
  proposal.log_accept_ratio =
      split_log_ratio(state, current_log_pa(state, data, form), s, proposal.log_pa_proposed, aux,
                      data, hyper, probs, form);
  return proposal;
}

MoveProposal propose_merge_with(Rng& rng, const MixtureState& state, std::size_t pair,
                                const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc) {
  const std::size_t k = state.rates.size();
  if (k < 2) {
    throw std::logic_error("no merge available at k = 1");
  }
  if (pair + 1 >= k) {
    throw std::out_of_range("merge pair out of range");
  }
  MoveAux aux;
  aux.component = pair;
  const double w1 = state.weights[pair];
  const double w2 = state.weights[pair + 1];
  if (!(w1 > 0.0) || !(w2 > 0.0)) {
    return rejected(MoveKind::merge, aux);
  }
  const auto m = merge_transform(w1, state.rates[pair], w2, state.rates[pair + 1]);
  aux.u1 = m.u1;
  aux.u2 = m.u2;
  aux.merged_weight = m.weight;
  aux.merged_rate = m.rate;
  if (!in_open_unit(m.u1) || !in_open_unit(m.u2)) {
    return rejected(MoveKind::merge, aux);
  }

  MoveProposal proposal;
  proposal.kind = MoveKind::merge;
  proposal.aux = aux;
  auto& s = proposal.proposed;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == pair) {
      s.rates.push_back(m.rate);
      s.weights.push_back(m.weight);
      ++j;
    } else {
      s.rates.push_back(state.rates[j]);
      s.weights.push_back(state.weights[j]);
    }
  }
  attach_allocations(rng, proposal, data, proposed_alloc);
  proposal.log_accept_ratio =
      -split_log_ratio(s, proposal.log_pa_proposed, state, current_log_pa(state, data, form), aux,
                       data, hyper, probs, form);
  return proposal;
}

MoveProposal propose_birth_with(Rng& rng, const MixtureState& state, double new_weight,
                                double new_rate, const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc) {
  const std::size_t k = state.rates.size();
  if (static_cast<int>(k) >= hyper.k_max) {
    throw std::logic_error("no birth available at k = k_max");
  }
  MoveAux aux;
  aux.new_weight = new_weight;
  aux.new_rate = new_rate;
  if (!in_open_unit(new_weight) || !(new_rate > 0.0) ||
      std::binary_search(state.rates.begin(), state.rates.end(), new_rate)) {
    return rejected(MoveKind::birth, aux);
  }
  auto t = birth_transform(state.rates, state.weights, new_weight, new_rate);
  aux.component = t.inserted;

  MoveProposal proposal;
  proposal.kind = MoveKind::birth;
  proposal.aux = aux;
  proposal.proposed.rates = std::move(t.rates);
  proposal.proposed.weights = std::move(t.weights);
  attach_allocations(rng, proposal, data, proposed_alloc);
  proposal.log_accept_ratio =
      birth_log_ratio(state, current_log_pa(state, data, form), proposal.proposed,
                      proposal.log_pa_proposed, aux, data, hyper, probs, form);
  return proposal;
}

MoveProposal propose_death_with(Rng& rng, const MixtureState& state, std::size_t victim,
                                const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc) {
  const std::size_t k = state.rates.size();
  if (k < 2) {
    throw std::logic_error("no death available at k = 1");
  }
  if (victim >= k) {
    throw std::out_of_range("death index out of range");
  }
  MoveAux aux;
  aux.component = victim;
  aux.new_weight = state.weights[victim];
  aux.new_rate = state.rates[victim];
  // The matching birth needs its weight strictly inside (0, 1).
  if (!in_open_unit(aux.new_weight)) {
    return rejected(MoveKind::death, aux);
  }
  auto t = death_transform(state.rates, state.weights, victim);

  MoveProposal proposal;
  proposal.kind = MoveKind::death;
  proposal.aux = aux;
  proposal.proposed.rates = std::move(t.rates);
  proposal.proposed.weights = std::move(t.weights);
  attach_allocations(rng, proposal, data, proposed_alloc);
  proposal.log_accept_ratio =
      -birth_log_ratio(proposal.proposed, proposal.log_pa_proposed, state,
                       current_log_pa(state, data, form), aux, data, hyper, probs, form);
  return proposal;
}

MoveProposal propose_split(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  if (state.k() >= hyper.k_max) {
    throw std::logic_error("no split available at k = k_max");
  }
  const std::size_t j = rng.uniform_index(state.rates.size());
  const double u1 = beta_sample(rng, hyper.split_u1.a, hyper.split_u1.b);
  const double u2 = beta_sample(rng, hyper.split_u2.a, hyper.split_u2.b);
  return propose_split_with(rng, state, j, u1, u2, data, hyper, probs, form);
}

MoveProposal propose_merge(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  if (state.k() < 2) {
    throw std::logic_error("no merge available at k = 1");
  }
  const std::size_t pair = rng.uniform_index(state.rates.size() - 1);
  return propose_merge_with(rng, state, pair, data, hyper, probs, form);
}

MoveProposal propose_birth(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  if (state.k() >= hyper.k_max) {
    throw std::logic_error("no birth available at k = k_max");
  }
  const double new_weight = beta_sample(rng, 1.0, static_cast<double>(state.k()));
  const double new_rate = gamma_sample(rng, hyper.alpha, hyper.beta);
  return propose_birth_with(rng, state, new_weight, new_rate, data, hyper, probs, form);
}

MoveProposal propose_death(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form) {
  if (state.k() < 2) {
    throw std::logic_error("no death available at k = 1");
  }
  const std::size_t victim = rng.uniform_index(state.rates.size());
  return propose_death_with(rng, state, victim, data, hyper, probs, form);
}

}  // namespace rjpois
