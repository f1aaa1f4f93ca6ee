#include "cfr/cfr.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "cfr/baselines.hpp"
#include "cfr/errors.hpp"
#include "cfr/experiment.hpp"
#include "cfr/features.hpp"
#include "cfr/generators.hpp"
#include "cfr/iter_cfr.hpp"
#include "csv.hpp"

struct cfr_dataset {
  cfr::Dataset value;
};
struct cfr_model {
  cfr::ContinuedFractionModel value;
};
struct cfr_records {
  std::vector<cfr::RunRecord> value;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
cfr_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CFR_OK;
  } catch (const cfr::ParseError& e) {
    g_last_error = e.what();
    return CFR_ERR_PARSE;
  } catch (const cfr::SchemaError& e) {
    g_last_error = e.what();
    return CFR_ERR_SCHEMA;
  } catch (const cfr::IoError& e) {
    g_last_error = e.what();
    return CFR_ERR_IO;
  } catch (const cfr::InputError& e) {
    g_last_error = e.what();
    return CFR_ERR_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CFR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CFR_ERR_INTERNAL;
  }
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (!p) throw cfr::InputError(std::string("null ") + what);
  return *p;
}

void need_out(const void* p) {
  if (!p) throw cfr::InputError("null output pointer");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cfr::MAConfig to_cpp(const cfr_ma_config& c) {
  cfr::MAConfig out;
  out.generations = c.generations;
  out.mutation_rate = c.mutation_rate;
  out.delta = c.delta;
  out.root_stagnation_reset = c.root_stagnation_reset;
  out.tree_depth = c.tree_depth;
  out.seed = c.seed;
  out.local_search.restarts = c.nm_restarts;
  out.local_search.max_iters_per_restart = c.nm_max_iters;
  out.local_search.stagnation_reset = c.nm_stagnation_reset;
  return out;
}

cfr::BenchmarkConfig to_cpp(const cfr_benchmark_config& c) {
  cfr::BenchmarkConfig out;
  out.methods.clear();
  std::string list = c.methods ? c.methods : "";
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.methods.push_back(item);
  }
  out.runs = c.runs;
  out.train_frac = c.train_frac;
  out.seed = c.seed;
  out.ma = to_cpp(c.ma);
  out.max_depth = c.max_depth;
  out.lasso_lambda = c.lasso_lambda;
  out.threads = c.threads;
  return out;
}

}  // namespace

extern "C" {

const char* cfr_version(void) { return "1.0.0"; }
const char* cfr_last_error(void) { return g_last_error.c_str(); }
void cfr_string_free(char* s) { std::free(s); }

cfr_status cfr_dataset_load_csv(const char* path, cfr_dataset** out) {
  return guarded([&] {
    need_out(out);
    if (!path) throw cfr::InputError("null path");
    *out = new cfr_dataset{cfr::read_dataset_csv(path)};
  });
}

cfr_status cfr_dataset_save_csv(const cfr_dataset* data, const char* path) {
  return guarded([&] {
    if (!path) throw cfr::InputError("null path");
    cfr::write_dataset_csv(need(data, "dataset").value, path);
  });
}

cfr_status cfr_dataset_create(size_t rows, size_t cols, const double* x, const double* y,
                              const char* const* sample_ids, const char* const* feature_names,
                              cfr_dataset** out) {
  return guarded([&] {
    need_out(out);
    if ((rows * cols > 0 && !x) || (rows > 0 && !y)) throw cfr::InputError("null data array");
    std::vector<std::string> ids(rows);
    std::vector<std::string> names(cols);
    for (size_t i = 0; i < rows; ++i) ids[i] = sample_ids ? sample_ids[i] : "s" + std::to_string(i);
    for (size_t j = 0; j < cols; ++j) {
      names[j] = feature_names ? feature_names[j] : "f" + std::to_string(j);
    }
    std::vector<double> vals(x, x + rows * cols);
    std::vector<double> ys(y, y + rows);
    *out = new cfr_dataset{cfr::Dataset(std::move(ids), std::move(names), std::move(vals), std::move(ys))};
  });
}

void cfr_dataset_free(cfr_dataset* data) { delete data; }
size_t cfr_dataset_rows(const cfr_dataset* data) { return data ? data->value.rows() : 0; }
size_t cfr_dataset_cols(const cfr_dataset* data) { return data ? data->value.cols() : 0; }

double cfr_dataset_target(const cfr_dataset* data, size_t row) {
  if (!data || row >= data->value.rows()) return 0.0;
  return data->value.targets()[row];
}

double cfr_dataset_value(const cfr_dataset* data, size_t row, size_t col) {
  if (!data || row >= data->value.rows() || col >= data->value.cols()) return 0.0;
  return data->value.at(row, col);
}

const char* cfr_dataset_feature_name(const cfr_dataset* data, size_t col) {
  if (!data || col >= data->value.cols()) return nullptr;
  return data->value.feature_names()[col].c_str();
}

cfr_status cfr_gen_sinc(size_t n, double lo, double hi, double noise_sd, uint64_t seed,
                        cfr_dataset** out) {
  return guarded([&] {
    need_out(out);
    *out = new cfr_dataset{cfr::make_sinc(n, lo, hi, noise_sd, seed)};
  });
}

cfr_status cfr_gen_sparse_linear(size_t n, size_t p, size_t k_informative, double noise_sd,
                                 uint64_t seed, cfr_dataset** out, double* truth_beta,
                                 double* truth_intercept) {
  return guarded([&] {
    need_out(out);
    auto gen = cfr::make_sparse_linear(n, p, k_informative, noise_sd, seed);
    if (truth_beta) std::copy(gen.beta.begin(), gen.beta.end(), truth_beta);
    if (truth_intercept) *truth_intercept = gen.intercept;
    *out = new cfr_dataset{std::move(gen.data)};
  });
}

void cfr_ma_config_default(cfr_ma_config* config) {
  if (!config) return;
  const cfr::MAConfig d;
  config->generations = d.generations;
  config->mutation_rate = d.mutation_rate;
  config->delta = d.delta;
  config->root_stagnation_reset = d.root_stagnation_reset;
  config->tree_depth = d.tree_depth;
  config->seed = d.seed;
  config->nm_restarts = d.local_search.restarts;
  config->nm_max_iters = d.local_search.max_iters_per_restart;
  config->nm_stagnation_reset = d.local_search.stagnation_reset;
}

cfr_status cfr_fit_iter_cfr(const cfr_dataset* data, const cfr_ma_config* config, size_t max_depth,
                            cfr_model** out, cfr_depth_record* history, size_t history_capacity,
                            size_t* history_count) {
  return guarded([&] {
    need_out(out);
    auto result = cfr::fit_iter_cfr(need(data, "dataset").value, to_cpp(need(config, "config")),
                                    max_depth);
    if (history) {
      for (size_t i = 0; i < result.history.size() && i < history_capacity; ++i) {
        history[i] = {result.history[i].depth, result.history[i].train_mse,
                      result.history[i].accepted ? 1 : 0};
      }
    }
    if (history_count) *history_count = result.history.size();
    *out = new cfr_model{std::move(result.model)};
  });
}

cfr_status cfr_fit_ols(const cfr_dataset* data, cfr_model** out, int* ridge_fallback) {
  return guarded([&] {
    need_out(out);
    const auto fit = cfr::ols_fit(need(data, "dataset").value);
    if (ridge_fallback) *ridge_fallback = fit.ridge_fallback ? 1 : 0;
    *out = new cfr_model{fit.as_cf_model()};
  });
}

cfr_status cfr_fit_lasso(const cfr_dataset* data, double lambda, cfr_model** out) {
  return guarded([&] {
    need_out(out);
    *out = new cfr_model{cfr::lasso_model(need(data, "dataset").value, lambda).as_cf_model()};
  });
}

void cfr_model_free(cfr_model* model) { delete model; }
size_t cfr_model_depth(const cfr_model* model) { return model ? model->value.depth() : 0; }
size_t cfr_model_feature_count(const cfr_model* model) {
  return model ? model->value.feature_count() : 0;
}

cfr_status cfr_model_evaluate(const cfr_model* model, const double* x, size_t len, double* out) {
  return guarded([&] {
    need_out(out);
    if (len > 0 && !x) throw cfr::InputError("null feature vector");
    *out = need(model, "model").value.evaluate(std::span<const double>(x, len));
  });
}

cfr_status cfr_model_mse(const cfr_model* model, const cfr_dataset* data, double* mse,
                         size_t* undefined_count) {
  return guarded([&] {
    need_out(mse);
    const auto report = cfr::evaluate_dataset(need(model, "model").value, need(data, "dataset").value);
    *mse = report.mse;
    if (undefined_count) *undefined_count = report.undefined_count;
  });
}

cfr_status cfr_model_to_json(const cfr_model* model, char** out) {
  return guarded([&] {
    need_out(out);
    *out = dup(cfr::model_to_json(need(model, "model").value));
  });
}

cfr_status cfr_model_from_json(const char* document, cfr_model** out) {
  return guarded([&] {
    need_out(out);
    if (!document) throw cfr::InputError("null document");
    *out = new cfr_model{cfr::model_from_json(document)};
  });
}

cfr_status cfr_model_to_text(const cfr_model* model, char** out) {
  return guarded([&] {
    need_out(out);
    *out = dup(cfr::model_to_text(need(model, "model").value));
  });
}

cfr_status cfr_select_pearson(const cfr_dataset* data, size_t k, cfr_dataset** reduced,
                              char** report_csv, char** warnings) {
  return guarded([&] {
    need_out(reduced);
    need_out(report_csv);
    const auto& ds = need(data, "dataset").value;
    const auto ranking = cfr::pearson_rank(ds, k);
    std::vector<std::size_t> cols;
    std::ostringstream csv;
    csv << "feature,r\n";
    for (const auto& f : ranking.top) {
      cols.push_back(f.index);
      csv << cfr::detail::csv_escape(f.name) << ',' << cfr::format_double(f.r) << '\n';
    }
    std::string warn;
    for (const auto& w : ranking.warnings) warn += "zero-variance feature skipped: " + w + "\n";
    auto out_ds = std::make_unique<cfr_dataset>(cfr_dataset{ds.select_features(cols)});
    *report_csv = dup(csv.str());
    if (warnings) *warnings = dup(warn);
    *reduced = out_ds.release();
  });
}

cfr_status cfr_select_lasso(const cfr_dataset* data, double lambda, int trials, double subset_frac,
                            double threshold, uint64_t seed, cfr_dataset** reduced,
                            char** report_csv) {
  return guarded([&] {
    need_out(reduced);
    need_out(report_csv);
    const auto& ds = need(data, "dataset").value;
    const auto report = cfr::lasso_selection_protocol(ds, {lambda, trials, subset_frac, threshold, seed});
    std::vector<std::size_t> cols;
    for (const auto& name : report.selected) cols.push_back(ds.feature_index(name));
    auto out_ds = std::make_unique<cfr_dataset>(cfr_dataset{ds.select_features(cols)});
    *report_csv = dup(cfr::format_selection_csv(report));
    *reduced = out_ds.release();
  });
}

cfr_status cfr_date_bins(const int* dates, size_t n, char** report_csv) {
  return guarded([&] {
    need_out(report_csv);
    if (n > 0 && !dates) throw cfr::InputError("null dates");
    const auto bins = cfr::date_bins(std::vector<int>(dates, dates + n));
    std::ostringstream csv;
    csv << "lo,hi,count\n";
    for (const auto& b : bins) csv << b.lo << ',' << b.hi << ',' << b.count << '\n';
    *report_csv = dup(csv.str());
  });
}

void cfr_benchmark_config_default(cfr_benchmark_config* config) {
  if (!config) return;
  const cfr::BenchmarkConfig d;
  config->methods = "iter-cfr,ols,lasso";
  config->runs = d.runs;
  config->train_frac = d.train_frac;
  config->seed = d.seed;
  cfr_ma_config_default(&config->ma);
  config->max_depth = d.max_depth;
  config->lasso_lambda = d.lasso_lambda;
  config->threads = d.threads;
}

cfr_status cfr_run_benchmark(const cfr_dataset* data, const cfr_benchmark_config* config,
                             cfr_records** out) {
  return guarded([&] {
    need_out(out);
    auto recs = cfr::run_benchmark(need(data, "dataset").value, to_cpp(need(config, "config")));
    *out = new cfr_records{std::move(recs)};
  });
}

cfr_status cfr_run_out_of_domain(const cfr_dataset* data, double year_lo, double year_hi,
                                 const cfr_benchmark_config* config, cfr_records** out) {
  return guarded([&] {
    need_out(out);
    auto recs = cfr::run_out_of_domain(need(data, "dataset").value, year_lo, year_hi,
                                       to_cpp(need(config, "config")));
    *out = new cfr_records{std::move(recs)};
  });
}

cfr_status cfr_records_create(cfr_records** out) {
  return guarded([&] {
    need_out(out);
    *out = new cfr_records{};
  });
}

void cfr_records_free(cfr_records* records) { delete records; }
size_t cfr_records_count(const cfr_records* records) { return records ? records->value.size() : 0; }

cfr_status cfr_records_load_csv(const char* path, cfr_records** out) {
  return guarded([&] {
    need_out(out);
    if (!path) throw cfr::InputError("null path");
    *out = new cfr_records{cfr::parse_records_csv(cfr::detail::read_file(path))};
  });
}

cfr_status cfr_records_to_csv(const cfr_records* records, char** out) {
  return guarded([&] {
    need_out(out);
    *out = dup(cfr::format_records_csv(need(records, "records").value));
  });
}

cfr_status cfr_records_append(cfr_records* dst, const cfr_records* src) {
  return guarded([&] {
    if (!dst) throw cfr::InputError("null records");
    const auto& add = need(src, "records").value;
    dst->value.insert(dst->value.end(), add.begin(), add.end());
  });
}

cfr_status cfr_records_import_predictions(cfr_records* dst, const char* method, const char* path,
                                          const cfr_dataset* data) {
  return guarded([&] {
    if (!dst) throw cfr::InputError("null records");
    if (!method || !*method) throw cfr::InputError("missing method name");
    if (!path) throw cfr::InputError("null path");
    const auto preds = cfr::import_predictions(path, method);
    auto recs = cfr::score_predictions(preds, need(data, "dataset").value);
    dst->value.insert(dst->value.end(), recs.begin(), recs.end());
  });
}

cfr_status cfr_report_describe(const cfr_records* records, const char* title, int sort_by_test,
                               char** text, char** csv) {
  return guarded([&] {
    auto table = cfr::describe(need(records, "records").value);
    if (sort_by_test) cfr::sort_by_test_average(table);
    const std::string t = cfr::format_describe_text(table, title ? title : "");
    const std::string c = cfr::format_describe_csv(table);
    if (text) *text = dup(t);
    if (csv) *csv = dup(c);
  });
}

cfr_status cfr_report_first_place(const cfr_records* records, char** text, char** csv) {
  return guarded([&] {
    const auto table = cfr::first_place_table(cfr::build_rank_matrix(need(records, "records").value));
    if (text) *text = dup(cfr::format_first_place_text(table));
    if (csv) *csv = dup(cfr::format_first_place_csv(table));
  });
}

cfr_status cfr_stats(const cfr_records* records, double alpha, cfr_stats_output* out) {
  return guarded([&] {
    need_out(out);
    const auto& recs = need(records, "records").value;
    const auto ranks = cfr::build_rank_matrix(recs);
    const auto friedman = cfr::friedman_test(ranks);
    const auto report = cfr::compute_stats_report(recs, alpha);
    out->friedman_statistic = friedman.statistic;
    out->friedman_p = friedman.p_value;
    out->critical_difference = cfr::nemenyi_cd(static_cast<int>(ranks.method_count()),
                                               static_cast<int>(ranks.runs()), alpha);
    out->text = dup(report.text);
    out->ranks_csv = dup(report.ranks_csv);
    out->posthoc_csv = dup(report.posthoc_csv);
    out->cd_json = dup(report.cd_json);
    out->first_place_csv = dup(report.first_place_csv);
  });
}

void cfr_stats_output_free(cfr_stats_output* out) {
  if (!out) return;
  for (char** s : {&out->text, &out->ranks_csv, &out->posthoc_csv, &out->cd_json, &out->first_place_csv}) {
    std::free(*s);
    *s = nullptr;
  }
}

cfr_status cfr_nemenyi_cd(int k, int n, double alpha, double* out) {
  return guarded([&] {
    need_out(out);
    *out = cfr::nemenyi_cd(k, n, alpha);
  });
}

}  // extern "C"
