#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rjpois/chain.hpp"

namespace rjpois {

/// Between-model acceptance rates; nullopt when a family was never attempted.
struct AcceptanceRates {
  std::optional<double> birth_death;
  std::optional<double> split_merge;
  std::optional<double> combined;
};

AcceptanceRates acceptance_rates(const MoveTally& tally);
AcceptanceRates acceptance_rates(std::span<const ChainTrace> traces);

/// Tally rebuilt from the per-record move fields (exact when thin = 1).
MoveTally tally_from_records(const ChainTrace& trace);

struct ChiSquareResult {
  std::int64_t checkpoint = 0;  // number of leading records per chain used
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
};

/// Chi-square test of homogeneity of the model-indicator distribution across
/// chains. Adjacent k categories are pooled until every expected cell count
/// is at least 5; a single remaining category gives statistic 0, p-value 1.
ChiSquareResult chisq_homogeneity(const std::vector<std::vector<int>>& k_by_chain);

/// Cumulative chi-square diagnostics at checkpoints window, 2 window, ... over
/// the shortest trace (the final partial window is included). Records are
/// taken every `stride` records.
std::vector<ChiSquareResult> chisq_model_indicator(std::span<const ChainTrace> traces,
                                                   std::int64_t window, std::int64_t stride = 1);

/// Integrated autocorrelation time 1 + 2 sum rho_l, truncated by Geyer's
/// initial positive sequence rule. Returns 1 for constant or tiny series.
double integrated_autocorr_time(std::span<const double> series);

/// Subsampling stride that makes retained k values roughly independent: the
/// largest integrated autocorrelation time of k over the chains, rounded up.
std::int64_t default_stride(std::span<const ChainTrace> traces);

/// Window giving ten cumulative checkpoints over the shortest trace.
std::int64_t default_window(std::span<const ChainTrace> traces);

enum class Functional { rate_1, loglik, weight_1 };

std::string_view to_string(Functional functional);
Functional functional_from_string(std::string_view name);

std::vector<double> functional_values(const ChainTrace& trace, Functional functional,
                                      std::size_t limit = SIZE_MAX);

double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic two-sample Kolmogorov-Smirnov p-value with Stephens' small
/// sample correction.
double ks_p_value(double statistic, std::size_t n, std::size_t m);

/// Critical value of the two-sample statistic at the given significance
/// level from the asymptotic Kolmogorov distribution.
double ks_critical_value(double significance, std::size_t n, std::size_t m);

using Matrix = std::vector<std::vector<double>>;

/// Pairwise KS statistics between chains on a scalar functional of each record.
Matrix ks_cross_chain(std::span<const ChainTrace> traces, Functional functional,
                      std::size_t limit = SIZE_MAX);

struct DiagnosticRow {
  std::int64_t checkpoint = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  std::string pair;  // "chisq" or "ks_<functional>:<i>-<j>"
};

/// Chi-square rows followed by KS rows (rate_1) at every checkpoint.
std::vector<DiagnosticRow> diagnostics_table(std::span<const ChainTrace> traces,
                                             std::int64_t window, std::int64_t stride = 1);

}  // namespace rjpois
