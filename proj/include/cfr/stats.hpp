#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfr/dataset.hpp"

namespace cfr {

struct RunRecord {
  int run_id = 0;
  std::string method;
  std::optional<double> train_mse;
  double test_mse = 0.0;

  bool operator==(const RunRecord&) const = default;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Uniform random partition with round(train_frac * n) training rows.
Split random_split(const Dataset& data, double train_frac, std::uint64_t seed);
/// random_split at 0.8; needs n >= 5.
Split split_80_20(const Dataset& data, std::uint64_t seed);

/// Train on a random train_frac of the samples whose target lies in
/// [year_lo, year_hi]; test on every sample outside it.
Split out_of_domain_split(const Dataset& data, double year_lo, double year_hi,
                          double train_frac, std::uint64_t seed);

struct Summary {
  double avg = 0.0;
  double med = 0.0;
  double std = 0.0;  // sample (n - 1); 0 when n == 1
  std::size_t n = 0;
  bool std_defined() const { return n > 1; }
};

Summary summarize(std::vector<double> values);

struct MethodSummary {
  std::string method;
  std::optional<Summary> train;
  Summary test;
};

/// Per-method summaries of train and test MSE, in order of first appearance.
std::vector<MethodSummary> describe(const std::vector<RunRecord>& records);
void sort_by_test_average(std::vector<MethodSummary>& table);

/// Rank 1 for the smallest value; ties share their average rank.
std::vector<double> rank_methods(const std::vector<double>& mses);

struct RankMatrix {
  std::vector<std::string> methods;
  std::vector<int> run_ids;
  std::vector<std::vector<double>> ranks;  // runs x methods

  std::size_t runs() const { return ranks.size(); }
  std::size_t method_count() const { return methods.size(); }
  std::vector<double> mean_ranks() const;
};

/// Ranks test MSE within each run. Every run must report every method.
RankMatrix build_rank_matrix(const std::vector<RunRecord>& records);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
};

/// Tie-corrected Friedman chi-square with k - 1 degrees of freedom.
FriedmanResult friedman_test(const RankMatrix& ranks);

double chi2_sf(double x, double df);

/// CDF of the studentized range of k standard normals (infinite df).
double studentized_range_cdf(double q, int k);

/// Nemenyi critical value q_alpha(k) (studentized range quantile / sqrt 2),
/// tabulated for alpha in {0.05, 0.10} and 2 <= k <= 20.
double nemenyi_q(int k, double alpha);

/// q_alpha(k) * sqrt(k (k + 1) / (6 n)).
double nemenyi_cd(int k, int n, double alpha);

struct PosthocResult {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> p_values;
  std::vector<std::vector<std::string>> bands;  // "NS", "<0.05", "<0.01", "<0.001"
};

std::string significance_band(double p);
PosthocResult posthoc_pairwise(const RankMatrix& ranks);

struct FirstPlace {
  std::string method;
  std::size_t firsts = 0;
  double min_rank = 0.0;
  double max_rank = 0.0;
};

/// A method is credited in a run when its rank is the run's minimum, so tied
/// winners are all credited.
std::vector<FirstPlace> first_place_table(const RankMatrix& ranks);

/// Scientific text with values below 1e-300 printed as "<1e-300".
std::string format_p_value(double p);

}  // namespace cfr
