/* C interface to the continued fraction regression library.
 *
 * All objects are opaque handles released with their matching *_free
 * function. Functions return CFR_OK on success; on failure the message of the
 * most recent error on the calling thread is available from cfr_last_error().
 * Strings returned through char** parameters are heap allocated and must be
 * released with cfr_string_free().
 */
#ifndef CFR_CFR_H
#define CFR_CFR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CFR_BUILDING_LIBRARY)
#    define CFR_API __declspec(dllexport)
#  else
#    define CFR_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) && __GNUC__ >= 4
#  define CFR_API __attribute__((visibility("default")))
#else
#  define CFR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfr_status {
  CFR_OK = 0,
  CFR_ERR_INPUT = 1,    /* bad argument, shape mismatch, empty data */
  CFR_ERR_PARSE = 2,    /* malformed model document */
  CFR_ERR_SCHEMA = 3,   /* CSV row violates its file schema */
  CFR_ERR_IO = 4,       /* file could not be read or written */
  CFR_ERR_INTERNAL = 5
} cfr_status;

typedef struct cfr_dataset cfr_dataset;
typedef struct cfr_model cfr_model;
typedef struct cfr_records cfr_records;

CFR_API const char* cfr_version(void);
CFR_API const char* cfr_last_error(void);
CFR_API void cfr_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

CFR_API cfr_status cfr_dataset_load_csv(const char* path, cfr_dataset** out);
CFR_API cfr_status cfr_dataset_save_csv(const cfr_dataset* data, const char* path);
/* x is row-major rows x cols. ids and names may be NULL (generated). */
CFR_API cfr_status cfr_dataset_create(size_t rows, size_t cols, const double* x, const double* y,
                                      const char* const* sample_ids,
                                      const char* const* feature_names, cfr_dataset** out);
CFR_API void cfr_dataset_free(cfr_dataset* data);
CFR_API size_t cfr_dataset_rows(const cfr_dataset* data);
CFR_API size_t cfr_dataset_cols(const cfr_dataset* data);
CFR_API double cfr_dataset_target(const cfr_dataset* data, size_t row);
CFR_API double cfr_dataset_value(const cfr_dataset* data, size_t row, size_t col);
CFR_API const char* cfr_dataset_feature_name(const cfr_dataset* data, size_t col);

CFR_API cfr_status cfr_gen_sinc(size_t n, double lo, double hi, double noise_sd, uint64_t seed,
                                cfr_dataset** out);
/* truth_beta (length p) and truth_intercept may be NULL. */
CFR_API cfr_status cfr_gen_sparse_linear(size_t n, size_t p, size_t k_informative,
                                         double noise_sd, uint64_t seed, cfr_dataset** out,
                                         double* truth_beta, double* truth_intercept);

/* ---- models ------------------------------------------------------------ */

typedef struct cfr_ma_config {
  int generations;
  double mutation_rate;
  double delta;
  int root_stagnation_reset;
  int tree_depth;
  uint64_t seed;
  int nm_restarts;
  int nm_max_iters;
  int nm_stagnation_reset;
} cfr_ma_config;

CFR_API void cfr_ma_config_default(cfr_ma_config* config);

typedef struct cfr_depth_record {
  size_t depth;
  double train_mse;
  int accepted;
} cfr_depth_record;

/* Fits iter-CFR. history may be NULL; otherwise up to history_capacity entries
 * are written and *history_count receives the full history length. */
CFR_API cfr_status cfr_fit_iter_cfr(const cfr_dataset* data, const cfr_ma_config* config,
                                    size_t max_depth, cfr_model** out,
                                    cfr_depth_record* history, size_t history_capacity,
                                    size_t* history_count);
/* Depth-0 models. ridge_fallback may be NULL. */
CFR_API cfr_status cfr_fit_ols(const cfr_dataset* data, cfr_model** out, int* ridge_fallback);
CFR_API cfr_status cfr_fit_lasso(const cfr_dataset* data, double lambda, cfr_model** out);

CFR_API void cfr_model_free(cfr_model* model);
CFR_API size_t cfr_model_depth(const cfr_model* model);
CFR_API size_t cfr_model_feature_count(const cfr_model* model);
CFR_API cfr_status cfr_model_evaluate(const cfr_model* model, const double* x, size_t len,
                                      double* out);
CFR_API cfr_status cfr_model_mse(const cfr_model* model, const cfr_dataset* data, double* mse,
                                 size_t* undefined_count);
CFR_API cfr_status cfr_model_to_json(const cfr_model* model, char** out);
CFR_API cfr_status cfr_model_from_json(const char* document, cfr_model** out);
CFR_API cfr_status cfr_model_to_text(const cfr_model* model, char** out);

/* ---- feature selection -------------------------------------------------- */

/* Keeps the top-k features by |Pearson r|. report_csv: feature,r. warnings
 * (may be NULL) lists skipped zero-variance features, one per line. */
CFR_API cfr_status cfr_select_pearson(const cfr_dataset* data, size_t k, cfr_dataset** reduced,
                                      char** report_csv, char** warnings);
/* Repeated lasso; keeps features at or above the threshold. report_csv: word,pct. */
CFR_API cfr_status cfr_select_lasso(const cfr_dataset* data, double lambda, int trials,
                                    double subset_frac, double threshold, uint64_t seed,
                                    cfr_dataset** reduced, char** report_csv);
/* CSV lo,hi,count of ceil(sqrt(N)) year bins. */
CFR_API cfr_status cfr_date_bins(const int* dates, size_t n, char** report_csv);

/* ---- experiments -------------------------------------------------------- */

typedef struct cfr_benchmark_config {
  const char* methods; /* comma separated subset of iter-cfr,ols,lasso */
  int runs;
  double train_frac;
  uint64_t seed;
  cfr_ma_config ma;
  size_t max_depth;
  double lasso_lambda;
  unsigned threads;
} cfr_benchmark_config;

CFR_API void cfr_benchmark_config_default(cfr_benchmark_config* config);

CFR_API cfr_status cfr_run_benchmark(const cfr_dataset* data, const cfr_benchmark_config* config,
                                     cfr_records** out);
CFR_API cfr_status cfr_run_out_of_domain(const cfr_dataset* data, double year_lo, double year_hi,
                                         const cfr_benchmark_config* config, cfr_records** out);

CFR_API cfr_status cfr_records_create(cfr_records** out);
CFR_API void cfr_records_free(cfr_records* records);
CFR_API size_t cfr_records_count(const cfr_records* records);
CFR_API cfr_status cfr_records_load_csv(const char* path, cfr_records** out);
CFR_API cfr_status cfr_records_to_csv(const cfr_records* records, char** out);
/* Appends every record of src to dst. */
CFR_API cfr_status cfr_records_append(cfr_records* dst, const cfr_records* src);
/* Scores an external method's prediction CSV against the dataset and appends it. */
CFR_API cfr_status cfr_records_import_predictions(cfr_records* dst, const char* method,
                                                  const char* path, const cfr_dataset* data);

/* Avg/med/std table of train and test MSE; sort_by_test orders rows by test average. */
CFR_API cfr_status cfr_report_describe(const cfr_records* records, const char* title,
                                       int sort_by_test, char** text, char** csv);
CFR_API cfr_status cfr_report_first_place(const cfr_records* records, char** text, char** csv);

typedef struct cfr_stats_output {
  double friedman_statistic;
  double friedman_p;
  double critical_difference;
  char* text;
  char* ranks_csv;
  char* posthoc_csv;
  char* cd_json;
  char* first_place_csv;
} cfr_stats_output;

/* alpha must be 0.05 or 0.10. Release the strings with cfr_stats_output_free. */
CFR_API cfr_status cfr_stats(const cfr_records* records, double alpha, cfr_stats_output* out);
CFR_API void cfr_stats_output_free(cfr_stats_output* out);

CFR_API cfr_status cfr_nemenyi_cd(int k, int n, double alpha, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CFR_CFR_H */
