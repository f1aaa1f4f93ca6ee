#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cfr/dataset.hpp"
#include "cfr/iter_cfr.hpp"
#include "cfr/memetic.hpp"
#include "cfr/stats.hpp"

namespace cfr {

/// Natively fitted methods: "iter-cfr", "ols", "lasso".
bool is_native_method(const std::string& method);

struct BenchmarkConfig {
  std::vector<std::string> methods = {"iter-cfr", "ols", "lasso"};
  int runs = 100;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
  MAConfig ma{};
  std::size_t max_depth = kDefaultMaxDepth;
  double lasso_lambda = 1.0;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 1;
};

/// Repeated random train/test splits; run r uses seed + r for both the split
/// and the methods. Records are ordered by run id, then method order.
std::vector<RunRecord> run_benchmark(const Dataset& data, const BenchmarkConfig& config);

/// Same protocol with out_of_domain_split over [year_lo, year_hi].
std::vector<RunRecord> run_out_of_domain(const Dataset& data, double year_lo, double year_hi,
                                         const BenchmarkConfig& config);

/// RunRecords CSV: `run_id,method,train_mse,test_mse`; an absent train MSE is
/// an empty field.
std::string format_records_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_records_csv(const std::string& text);

/// Descriptive table: text and CSV renderings.
std::string format_describe_text(const std::vector<MethodSummary>& table, const std::string& title);
std::string format_describe_csv(const std::vector<MethodSummary>& table);

std::string format_first_place_text(const std::vector<FirstPlace>& table);
std::string format_first_place_csv(const std::vector<FirstPlace>& table);

std::string format_ranks_csv(const RankMatrix& ranks);
std::string format_posthoc_csv(const PosthocResult& posthoc);
/// {"alpha", "cd", "runs", "methods": [{"method", "mean_rank"}]}
std::string format_cd_json(const RankMatrix& ranks, double alpha);

struct StatsReport {
  std::string text;
  std::string ranks_csv;
  std::string posthoc_csv;
  std::string cd_json;
  std::string first_place_csv;
};

StatsReport compute_stats_report(const std::vector<RunRecord>& records, double alpha);

}  // namespace cfr
