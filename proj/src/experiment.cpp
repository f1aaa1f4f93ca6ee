#include "cfr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "cfr/baselines.hpp"
#include "cfr/errors.hpp"
#include "csv.hpp"
#include "json.hpp"

namespace cfr {

bool is_native_method(const std::string& method) {
  return method == "iter-cfr" || method == "ols" || method == "lasso";
}

namespace {

RunRecord fit_and_score(const std::string& method, const Split& split, const BenchmarkConfig& config,
                        int run, std::uint64_t seed) {
  RunRecord rec;
  rec.run_id = run;
  rec.method = method;
  if (method == "iter-cfr") {
    MAConfig ma = config.ma;
    ma.seed = seed;
    const auto fit = fit_iter_cfr(split.train, ma, config.max_depth);
    rec.train_mse = mean_squared_error(fit.model, split.train);
    rec.test_mse = mean_squared_error(fit.model, split.test);
  } else if (method == "ols") {
    const auto model = ols_fit(split.train);
    rec.train_mse = mean_squared_error(model, split.train);
    rec.test_mse = mean_squared_error(model, split.test);
  } else if (method == "lasso") {
    const auto model = lasso_model(split.train, config.lasso_lambda);
    rec.train_mse = mean_squared_error(model, split.train);
    rec.test_mse = mean_squared_error(model, split.test);
  } else {
    throw InputError("unknown method '" + method + "'");
  }
  return rec;
}

std::vector<RunRecord> run_protocol(const BenchmarkConfig& config,
                                    const std::function<Split(std::uint64_t)>& make_split) {
  if (config.runs < 1) throw InputError("benchmark: runs must be >= 1");
  if (config.methods.empty()) throw InputError("benchmark: no methods");
  for (const auto& m : config.methods) {
    if (!is_native_method(m)) throw InputError("benchmark: unknown method '" + m + "'");
  }
  const auto runs = static_cast<std::size_t>(config.runs);
  std::vector<std::vector<RunRecord>> per_run(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        const std::uint64_t seed = config.seed + r;
        const Split split = make_split(seed);
        for (const auto& m : config.methods) {
          per_run[r].push_back(fit_and_score(m, split, config, static_cast<int>(r), seed));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(runs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> out;
  for (auto& recs : per_run) {
    for (auto& rec : recs) out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::vector<RunRecord> run_benchmark(const Dataset& data, const BenchmarkConfig& config) {
  return run_protocol(config, [&](std::uint64_t seed) {
    return random_split(data, config.train_frac, seed);
  });
}

std::vector<RunRecord> run_out_of_domain(const Dataset& data, double year_lo, double year_hi,
                                         const BenchmarkConfig& config) {
  // Validate the range once up front so the error is not per-run.
  (void)out_of_domain_split(data, year_lo, year_hi, config.train_frac, config.seed);
  return run_protocol(config, [&](std::uint64_t seed) {
    return out_of_domain_split(data, year_lo, year_hi, config.train_frac, seed);
  });
}

std::string format_records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "run_id,method,train_mse,test_mse\n";
  for (const auto& r : records) {
    out << r.run_id << ',' << detail::csv_escape(r.method) << ','
        << (r.train_mse ? format_double(*r.train_mse) : std::string()) << ','
        << format_double(r.test_mse) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> parse_records_csv(const std::string& text) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty()) throw SchemaError("empty run-record file", 1);
  const std::vector<std::string> header = {"run_id", "method", "train_mse", "test_mse"};
  if (rows.front().fields != header) {
    throw SchemaError("header must be 'run_id,method,train_mse,test_mse'", rows.front().line);
  }
  std::vector<RunRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 4) throw SchemaError("expected 4 fields", row.line);
    RunRecord r;
    r.run_id = static_cast<int>(detail::parse_integer(row.fields[0], row.line, "run_id"));
    r.method = row.fields[1];
    if (r.method.empty()) throw SchemaError("missing method", row.line);
    if (!row.fields[2].empty()) r.train_mse = detail::parse_real(row.fields[2], row.line, "train_mse");
    r.test_mse = detail::parse_real(row.fields[3], row.line, "test_mse");
    if (!(r.test_mse >= 0.0)) throw SchemaError("test_mse must be >= 0", row.line);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_describe_text(const std::vector<MethodSummary>& table, const std::string& title) {
  std::ostringstream out;
  out << title << '\n';
  out << std::left << std::setw(12) << "method" << std::right;
  for (const char* h : {"train avg", "train med", "train std", "test avg", "test med", "test std"}) {
    out << std::setw(14) << h;
  }
  out << '\n' << std::fixed << std::setprecision(6);
  for (const auto& m : table) {
    out << std::left << std::setw(12) << m.method << std::right;
    if (m.train) {
      out << std::setw(14) << m.train->avg << std::setw(14) << m.train->med << std::setw(14)
          << m.train->std;
    } else {
      out << std::setw(14) << "-" << std::setw(14) << "-" << std::setw(14) << "-";
    }
    out << std::setw(14) << m.test.avg << std::setw(14) << m.test.med << std::setw(14) << m.test.std;
    if (!m.test.std_defined()) out << "  (single run: std set to 0)";
    out << '\n';
  }
  return out.str();
}

std::string format_describe_csv(const std::vector<MethodSummary>& table) {
  std::ostringstream out;
  out << "method,runs,train_avg,train_med,train_std,test_avg,test_med,test_std\n";
  for (const auto& m : table) {
    out << detail::csv_escape(m.method) << ',' << m.test.n << ',';
    if (m.train) {
      out << format_double(m.train->avg) << ',' << format_double(m.train->med) << ','
          << format_double(m.train->std) << ',';
    } else {
      out << ",,,";
    }
    out << format_double(m.test.avg) << ',' << format_double(m.test.med) << ','
        << format_double(m.test.std) << '\n';
  }
  return out.str();
}

std::string format_first_place_text(const std::vector<FirstPlace>& table) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "method" << std::right << std::setw(8) << "#first"
      << std::setw(10) << "min rank" << std::setw(10) << "max rank" << '\n';
  out << std::fixed << std::setprecision(1);
  for (const auto& f : table) {
    out << std::left << std::setw(12) << f.method << std::right << std::setw(8) << f.firsts
        << std::setw(10) << f.min_rank << std::setw(10) << f.max_rank << '\n';
  }
  return out.str();
}

std::string format_first_place_csv(const std::vector<FirstPlace>& table) {
  std::ostringstream out;
  out << "method,firsts,min_rank,max_rank\n";
  for (const auto& f : table) {
    out << detail::csv_escape(f.method) << ',' << f.firsts << ',' << format_double(f.min_rank)
        << ',' << format_double(f.max_rank) << '\n';
  }
  return out.str();
}

std::string format_ranks_csv(const RankMatrix& ranks) {
  std::ostringstream out;
  out << "run_id";
  for (const auto& m : ranks.methods) out << ',' << detail::csv_escape(m);
  out << '\n';
  for (std::size_t i = 0; i < ranks.runs(); ++i) {
    out << ranks.run_ids[i];
    for (double r : ranks.ranks[i]) out << ',' << format_double(r);
    out << '\n';
  }
  return out.str();
}

std::string format_posthoc_csv(const PosthocResult& posthoc) {
  std::ostringstream out;
  out << "method_a,method_b,p_value,band\n";
  const std::size_t k = posthoc.methods.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      out << detail::csv_escape(posthoc.methods[i]) << ',' << detail::csv_escape(posthoc.methods[j])
          << ',' << format_double(posthoc.p_values[i][j]) << ',' << posthoc.bands[i][j] << '\n';
    }
  }
  return out.str();
}

std::string format_cd_json(const RankMatrix& ranks, double alpha) {
  nlohmann::json doc;
  const auto mean = ranks.mean_ranks();
  doc["alpha"] = alpha;
  doc["cd"] = nemenyi_cd(static_cast<int>(ranks.method_count()), static_cast<int>(ranks.runs()), alpha);
  doc["runs"] = ranks.runs();
  doc["methods"] = nlohmann::json::array();
  for (std::size_t j = 0; j < ranks.method_count(); ++j) {
    doc["methods"].push_back({{"method", ranks.methods[j]}, {"mean_rank", mean[j]}});
  }
  return doc.dump(2) + "\n";
}

StatsReport compute_stats_report(const std::vector<RunRecord>& records, double alpha) {
  const auto ranks = build_rank_matrix(records);
  const auto friedman = friedman_test(ranks);
  const auto posthoc = posthoc_pairwise(ranks);
  const auto firsts = first_place_table(ranks);
  const int k = static_cast<int>(ranks.method_count());
  const double cd = nemenyi_cd(k, static_cast<int>(ranks.runs()), alpha);

  StatsReport report;
  std::ostringstream text;
  text << "methods: " << k << ", runs: " << ranks.runs() << '\n';
  text << "Friedman chi-square: " << std::setprecision(6) << friedman.statistic << " (df "
       << friedman.df << "), p = " << format_p_value(friedman.p_value) << '\n';
  text << "Nemenyi critical difference (alpha " << alpha << "): " << std::fixed
       << std::setprecision(3) << cd << '\n';
  text << "\nmean ranks\n";
  const auto mean = ranks.mean_ranks();
  std::vector<std::size_t> order(mean.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
  for (std::size_t j : order) {
    text << "  " << std::left << std::setw(12) << ranks.methods[j] << std::right << std::setw(8)
         << mean[j] << '\n';
  }
  text << "\npairwise significance (Nemenyi)\n" << std::setw(12) << "";
  for (const auto& m : posthoc.methods) text << std::setw(10) << m.substr(0, 9);
  text << '\n';
  for (std::size_t i = 0; i < posthoc.methods.size(); ++i) {
    text << std::left << std::setw(12) << posthoc.methods[i] << std::right;
    for (std::size_t j = 0; j < posthoc.methods.size(); ++j) {
      text << std::setw(10) << (i == j ? "-" : posthoc.bands[i][j]);
    }
    text << '\n';
  }
  text << "\nfirst places\n" << format_first_place_text(firsts);

  report.text = text.str();
  report.ranks_csv = format_ranks_csv(ranks);
  report.posthoc_csv = format_posthoc_csv(posthoc);
  report.cd_json = format_cd_json(ranks, alpha);
  report.first_place_csv = format_first_place_csv(firsts);
  return report;
}

}  // namespace cfr
