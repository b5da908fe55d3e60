#include "rjpois/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace rjpois {

namespace {

std::optional<double> ratio(std::int64_t accepted, std::int64_t attempted) {
  if (attempted == 0) {
    return std::nullopt;
  }
  return static_cast<double>(accepted) / static_cast<double>(attempted);
}

void require_two_traces(std::span<const ChainTrace> traces) {
  if (traces.size() < 2) {
    throw std::invalid_argument("cross-chain diagnostics need at least two traces");
  }
}

std::size_t shortest(std::span<const ChainTrace> traces) {
  std::size_t n = SIZE_MAX;
  for (const auto& t : traces) {
    n = std::min(n, t.records.size());
  }
  return n;
}

// Kolmogorov distribution survival function, P(K > x).
double kolmogorov_survival(double x) {
  if (x < 0.2) {
    return 1.0;
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

AcceptanceRates acceptance_rates(const MoveTally& tally) {
  const auto bd_att = tally.attempts(MoveKind::birth) + tally.attempts(MoveKind::death);
  const auto bd_acc = tally.accepts(MoveKind::birth) + tally.accepts(MoveKind::death);
  const auto sm_att = tally.attempts(MoveKind::split) + tally.attempts(MoveKind::merge);
  const auto sm_acc = tally.accepts(MoveKind::split) + tally.accepts(MoveKind::merge);
  return {ratio(bd_acc, bd_att), ratio(sm_acc, sm_att), ratio(bd_acc + sm_acc, bd_att + sm_att)};
}

AcceptanceRates acceptance_rates(std::span<const ChainTrace> traces) {
  MoveTally total;
  for (const auto& t : traces) {
    total += t.tally;
  }
  return acceptance_rates(total);
}

MoveTally tally_from_records(const ChainTrace& trace) {
  MoveTally tally;
  for (const auto& r : trace.records) {
    if (r.move != MoveKind::none) {
      tally.record(r.move, r.accepted);
    }
  }
  return tally;
}

ChiSquareResult chisq_homogeneity(const std::vector<std::vector<int>>& k_by_chain) {
  if (k_by_chain.size() < 2) {
    throw std::invalid_argument("chi-square homogeneity needs at least two chains");
  }
  const std::size_t rows = k_by_chain.size();
  std::map<int, std::vector<double>> columns;
  std::vector<double> row_totals(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int k : k_by_chain[r]) {
      auto& col = columns[k];
      col.resize(rows, 0.0);
      col[r] += 1.0;
    }
    row_totals[r] = static_cast<double>(k_by_chain[r].size());
  }
  double grand = 0.0;
  double min_row = std::numeric_limits<double>::infinity();
  for (double t : row_totals) {
    grand += t;
    min_row = std::min(min_row, t);
  }
  ChiSquareResult result;
  if (grand == 0.0 || min_row == 0.0) {
    return result;
  }

  // Pool adjacent k values (in increasing order) until the smallest expected
  // count in each pooled column reaches 5.
  std::vector<std::vector<double>> pooled;
  std::vector<double> pending(rows, 0.0);
  double pending_total = 0.0;
  for (const auto& [k, col] : columns) {
    for (std::size_t r = 0; r < rows; ++r) {
      pending[r] += col[r];
      pending_total += col[r];
    }
    if (min_row * pending_total / grand >= 5.0) {
      pooled.push_back(pending);
      pending.assign(rows, 0.0);
      pending_total = 0.0;
    }
  }
  if (pending_total > 0.0) {
    if (pooled.empty()) {
      pooled.push_back(pending);
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        pooled.back()[r] += pending[r];
      }
    }
  }
  if (pooled.size() < 2) {
    return result;
  }

  double stat = 0.0;
  for (const auto& col : pooled) {
    double col_total = 0.0;
    for (double v : col) {
      col_total += v;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const double expected = row_totals[r] * col_total / grand;
      const double diff = col[r] - expected;
      stat += diff * diff / expected;
    }
  }
  result.statistic = stat;
  result.df = static_cast<int>((rows - 1) * (pooled.size() - 1));
  boost::math::chi_squared dist(result.df);
  result.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return result;
}

double integrated_autocorr_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) {
    return 1.0;
  }
  double mean = 0.0;
  for (double v : series) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  const auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      acc += (series[i] - mean) * (series[i + lag] - mean);
    }
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) {
    return 1.0;
  }
  // Sum consecutive pairs Gamma_m = rho(2m) + rho(2m+1) while they stay positive.
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (pair <= 0.0) {
      break;
    }
    tau += 2.0 * pair;
  }
  return std::max(tau, 1.0);
}

std::int64_t default_stride(std::span<const ChainTrace> traces) {
  double tau = 1.0;
  for (const auto& t : traces) {
    std::vector<double> ks;
    ks.reserve(t.records.size());
    for (const auto& r : t.records) {
      ks.push_back(static_cast<double>(r.k));
    }
    tau = std::max(tau, integrated_autocorr_time(ks));
  }
  return static_cast<std::int64_t>(std::ceil(tau));
}

std::int64_t default_window(std::span<const ChainTrace> traces) {
  const auto n = static_cast<std::int64_t>(traces.empty() ? 0 : shortest(traces));
  return std::max<std::int64_t>(1, n / 10);
}

std::vector<ChiSquareResult> chisq_model_indicator(std::span<const ChainTrace> traces,
                                                   std::int64_t window, std::int64_t stride) {
  require_two_traces(traces);
  if (window < 1 || stride < 1) {
    throw std::invalid_argument("window and stride must be positive");
  }
  const auto n = static_cast<std::int64_t>(shortest(traces));
  std::vector<ChiSquareResult> out;
  for (std::int64_t checkpoint = window;; checkpoint += window) {
    const std::int64_t upto = std::min(checkpoint, n);
    std::vector<std::vector<int>> ks(traces.size());
    for (std::size_t c = 0; c < traces.size(); ++c) {
      for (std::int64_t i = stride - 1; i < upto; i += stride) {
        ks[c].push_back(traces[c].records[static_cast<std::size_t>(i)].k);
      }
    }
    auto res = chisq_homogeneity(ks);
    res.checkpoint = upto;
    out.push_back(res);
    if (upto >= n) {
      break;
    }
  }
  return out;
}

std::string_view to_string(Functional functional) {
  switch (functional) {
    case Functional::rate_1:
      return "rate_1";
    case Functional::loglik:
      return "loglik";
    case Functional::weight_1:
      return "weight_1";
  }
  return "rate_1";
}

Functional functional_from_string(std::string_view name) {
  for (auto f : {Functional::rate_1, Functional::loglik, Functional::weight_1}) {
    if (to_string(f) == name) {
      return f;
    }
  }
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

std::vector<double> functional_values(const ChainTrace& trace, Functional functional,
                                      std::size_t limit) {
  std::vector<double> values;
  const std::size_t n = std::min(limit, trace.records.size());
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = trace.records[i];
    switch (functional) {
      case Functional::rate_1:
        values.push_back(r.rates.front());
        break;
      case Functional::loglik:
        values.push_back(r.loglik);
        break;
      case Functional::weight_1:
        values.push_back(r.weights.front());
        break;
    }
  }
  return values;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("KS statistic needs non-empty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) {
      ++i;
    }
    while (j < b.size() && b[j] == x) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_p_value(double statistic, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

double ks_critical_value(double significance, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return c * std::sqrt((nd + md) / (nd * md));
}

Matrix ks_cross_chain(std::span<const ChainTrace> traces, Functional functional,
                      std::size_t limit) {
  require_two_traces(traces);
  std::vector<std::vector<double>> values;
  for (const auto& t : traces) {
    if (t.records.empty()) {
      throw std::invalid_argument("KS diagnostics need non-empty traces");
    }
    values.push_back(functional_values(t, functional, limit));
  }
  Matrix m(traces.size(), std::vector<double>(traces.size(), 0.0));
  for (std::size_t a = 0; a < traces.size(); ++a) {
    for (std::size_t b = a + 1; b < traces.size(); ++b) {
      m[a][b] = m[b][a] = ks_statistic(values[a], values[b]);
    }
  }
  return m;
}

std::vector<DiagnosticRow> diagnostics_table(std::span<const ChainTrace> traces,
                                             std::int64_t window, std::int64_t stride) {
  std::vector<DiagnosticRow> rows;
  for (const auto& res : chisq_model_indicator(traces, window, stride)) {
    rows.push_back({res.checkpoint, res.statistic, res.p_value, "chisq"});
  }
  const auto n = static_cast<std::int64_t>(shortest(traces));
  const std::string prefix = "ks_" + std::string(to_string(Functional::rate_1)) + ":";
  for (std::int64_t checkpoint = window;; checkpoint += window) {
    const std::int64_t upto = std::min(checkpoint, n);
    std::vector<std::vector<double>> values;
    for (const auto& t : traces) {
      std::vector<double> all = functional_values(t, Functional::rate_1, upto);
      std::vector<double> kept;
      for (std::size_t i = static_cast<std::size_t>(stride) - 1; i < all.size();
           i += static_cast<std::size_t>(stride)) {
        kept.push_back(all[i]);
      }
      values.push_back(std::move(kept));
    }
    for (std::size_t a = 0; a < traces.size(); ++a) {
      for (std::size_t b = a + 1; b < traces.size(); ++b) {
        if (values[a].empty() || values[b].empty()) {
          continue;
        }
        const double d = ks_statistic(values[a], values[b]);
        rows.push_back({upto, d, ks_p_value(d, values[a].size(), values[b].size()),
                        prefix + std::to_string(a) + "-" + std::to_string(b)});
      }
    }
    if (upto >= n) {
      break;
    }
  }
  return rows;
}

}  // namespace rjpois
