#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cfr/dataset.hpp"

namespace cfr {

/// X[i][j] = 100 * counts[i][j] / totals[i]. Rows with a zero total, or with
/// more counted tokens than the total, are rejected.
Dataset counts_to_percentages(std::vector<std::string> sample_ids,
                              std::vector<std::string> feature_names,
                              const std::vector<std::vector<long long>>& counts,
                              const std::vector<long long>& totals, std::vector<double> targets);

/// Product-moment correlation; NaN when either side has zero variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

struct RankedFeature {
  std::string name;
  std::size_t index = 0;
  double r = 0.0;
};

struct PearsonRanking {
  std::vector<RankedFeature> top;
  /// Zero-variance features that were skipped.
  std::vector<std::string> warnings;
};

/// Top-k features by |r| with the target, descending; ties by name.
PearsonRanking pearson_rank(const Dataset& data, std::size_t k);

struct LassoResult {
  std::vector<double> beta;
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<std::string> selected;
  std::size_t sweeps = 0;
  /// Objective after every sweep.
  std::vector<double> objective_trace;
};

/// Coordinate descent on ||y - b0 - X beta||^2 + lambda * ||beta||_1 with the
/// intercept b0 unpenalised (columns and target centred). Stops when the
/// largest coefficient change in a sweep is below 1e-8 or after 10^4 sweeps.
LassoResult lasso_fit(const Dataset& data, double lambda);

/// Smallest lambda for which every coefficient is zero: 2 * max_j |xc_j^T yc|.
double lasso_lambda_max(const Dataset& data);

double lasso_objective(const Dataset& data, const std::vector<double>& beta, double intercept,
                       double lambda);

struct SelectionEntry {
  std::string feature;
  double pct = 0.0;  // share of trials with a nonzero coefficient, 0..100
};

struct SelectionReport {
  /// Features that appeared at least once, by descending pct then name.
  std::vector<SelectionEntry> appearances;
  /// Features with pct >= threshold * 100, same order.
  std::vector<std::string> selected;
};

struct LassoProtocolConfig {
  double lambda = 1.0;
  int trials = 100;
  double subset_frac = 0.8;
  double threshold = 0.9;
  std::uint64_t seed = 0;
};

/// Repeated lasso on random subsets of round(subset_frac * n) samples.
/// Trial t draws its subset with seed + t.
SelectionReport lasso_selection_protocol(const Dataset& data, const LassoProtocolConfig& config);

std::string format_selection_csv(const SelectionReport& report);

struct DateBin {
  int lo = 0;  // inclusive
  int hi = 0;  // inclusive
  std::size_t count = 0;
};

/// ceil(sqrt(N)) equal-width integer-year bins starting at min(dates); the
/// width is ceil((max - min + 1) / bins).
std::vector<DateBin> date_bins(const std::vector<int>& dates);

}  // namespace cfr
