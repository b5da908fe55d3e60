#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "rjpois/dists.hpp"
#include "rjpois/model.hpp"

namespace rjpois {

enum class MoveKind { none, split, merge, birth, death };

std::string_view to_string(MoveKind kind);
MoveKind move_kind_from_string(std::string_view name);

/// How the data enter a trans-dimensional acceptance ratio.
///
/// `marginalized` uses the observed (allocation-free) likelihood of each side.
/// `missing_data` uses p(z|w) L(D|rates,z) / p_a(z) with the allocations and
/// their proposal probabilities; the two are algebraically identical.
enum class AcceptanceForm { marginalized, missing_data };

/// Attempt probabilities for each direction, indexed by the current k.
/// Vectors have k_max + 1 entries; index 0 is unused.
struct MoveProbs {
  std::vector<double> birth;
  std::vector<double> death;
  std::vector<double> split;
  std::vector<double> merge;

  /// b_k = s_k = up_prob for 1 < k < k_max; only the increasing moves are
  /// available at k = 1 and only the decreasing ones at k = k_max.
  static MoveProbs standard(int k_max, double up_prob = 0.5);

  int k_max() const { return static_cast<int>(birth.size()) - 1; }
  void validate() const;
};

struct SplitTransform {
  double weight1 = 0.0;
  double rate1 = 0.0;
  double weight2 = 0.0;
  double rate2 = 0.0;
  double log_jacobian = 0.0;
};

/// (w, rate, u1, u2) -> (w u1, rate u2), (w (1-u1), rate (1-u1 u2)/(1-u1)),
/// with |Jacobian| = rate w / (1 - u1).
SplitTransform split_transform(double weight, double rate, double u1, double u2);

struct MergeTransform {
  double weight = 0.0;
  double rate = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

/// Weight-summing, mean-preserving merge of two ordered components and the
/// (u1, u2) that split_transform needs to reproduce them.
MergeTransform merge_transform(double weight1, double rate1, double weight2, double rate2);

struct BirthTransform {
  std::vector<double> rates;
  std::vector<double> weights;
  std::size_t inserted = 0;  // index of the new component after rank insertion
  double log_jacobian = 0.0;  // (k-1) log(1 - new_weight)
};

/// Scales the existing weights by (1 - new_weight) and inserts the new
/// component at its rank among the rates. Throws if new_rate ties an
/// existing rate.
BirthTransform birth_transform(std::span<const double> rates, std::span<const double> weights,
                               double new_weight, double new_rate);

struct DeathTransform {
  std::vector<double> rates;
  std::vector<double> weights;
  double removed_weight = 0.0;
  double removed_rate = 0.0;
};

/// Removes a component and renormalizes the remaining weights.
DeathTransform death_transform(std::span<const double> rates, std::span<const double> weights,
                               std::size_t index);

/// Random inputs and bookkeeping behind a proposal.
struct MoveAux {
  std::size_t component = 0;  // split: component split; merge: left index of the pair;
                              // birth: inserted index; death: removed index
  double u1 = 0.0;
  double u2 = 0.0;
  double new_weight = 0.0;  // birth/death: the weight of the added or removed component
  double new_rate = 0.0;
  double merged_weight = 0.0;  // split/merge: the single-component side
  double merged_rate = 0.0;
};

struct MoveProposal {
  MoveKind kind = MoveKind::none;
  MixtureState proposed;
  double log_accept_ratio = 0.0;
  bool rejected_immediately = false;
  MoveAux aux;
  double log_pa_proposed = 0.0;  // log p_a of proposed.alloc under the proposed parameters
};

/// Data contribution of one side of a move under the chosen form; `log_pa`
/// is only read for the missing-data form.
double move_data_term(const MixtureState& state, double log_pa, const Dataset& data,
                      AcceptanceForm form);

/// log A for splitting `small` (k components) into `big` (k + 1). The aux
/// fields u1, u2, merged_weight, merged_rate describe the split.
double split_log_ratio(const MixtureState& small, double small_log_pa, const MixtureState& big,
                       double big_log_pa, const MoveAux& aux, const Dataset& data,
                       const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form);

/// log A for a birth from `small` (k) to `big` (k + 1) with the new component
/// (aux.new_weight, aux.new_rate). Full form, valid for any delta.
double birth_log_ratio(const MixtureState& small, double small_log_pa, const MixtureState& big,
                       double big_log_pa, const MoveAux& aux, const Dataset& data,
                       const Hyperparams& hyper, const MoveProbs& probs, AcceptanceForm form);

/// The same ratio after the prior/proposal cancellations that hold when
/// delta = 1: data ratio times d_{k+1} / b_k.
double birth_log_ratio_reduced(const MixtureState& small, double small_log_pa,
                               const MixtureState& big, double big_log_pa, const Dataset& data,
                               const MoveProbs& probs, AcceptanceForm form);

MoveProposal propose_split(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs,
                           AcceptanceForm form = AcceptanceForm::marginalized);
MoveProposal propose_merge(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs,
                           AcceptanceForm form = AcceptanceForm::marginalized);
MoveProposal propose_birth(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs,
                           AcceptanceForm form = AcceptanceForm::marginalized);
MoveProposal propose_death(Rng& rng, const MixtureState& state, const Dataset& data,
                           const Hyperparams& hyper, const MoveProbs& probs,
                           AcceptanceForm form = AcceptanceForm::marginalized);

/// Variants with the random choices supplied by the caller. Allocations for
/// the proposed state are drawn from `rng` unless `proposed_alloc` is given,
/// in which case that vector is used and its p_a evaluated.
MoveProposal propose_split_with(Rng& rng, const MixtureState& state, std::size_t component,
                                double u1, double u2, const Dataset& data,
                                const Hyperparams& hyper, const MoveProbs& probs,
                                AcceptanceForm form,
                                const std::vector<int>* proposed_alloc = nullptr);
MoveProposal propose_merge_with(Rng& rng, const MixtureState& state, std::size_t pair,
                                const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc = nullptr);
MoveProposal propose_birth_with(Rng& rng, const MixtureState& state, double new_weight,
                                double new_rate, const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc = nullptr);
MoveProposal propose_death_with(Rng& rng, const MixtureState& state, std::size_t victim,
                                const Dataset& data, const Hyperparams& hyper,
                                const MoveProbs& probs, AcceptanceForm form,
                                const std::vector<int>* proposed_alloc = nullptr);

}  // namespace rjpois
