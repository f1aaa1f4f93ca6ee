// Command-line front end. Talks to the library only through the C interface.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfr/cfr.h"

namespace {

struct Failure {
  cfr_status status;
};

void check(cfr_status s) {
  if (s != CFR_OK) {
    std::cerr << "error: " << cfr_last_error() << '\n';
    throw Failure{s};
  }
}

// RAII owners for the C handles and strings.
template <typename T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  ~Handle() { Free(ptr_); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** out() { return &ptr_; }
  T* get() const { return ptr_; }

 private:
  T* ptr_ = nullptr;
};

using Dataset = Handle<cfr_dataset, cfr_dataset_free>;
using Model = Handle<cfr_model, cfr_model_free>;
using Records = Handle<cfr_records, cfr_records_free>;
using Text = Handle<char, cfr_string_free>;

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void add_ma_options(CLI::App* cmd, cfr_ma_config& ma) {
  cmd->add_option("--generations", ma.generations, "Memetic generations per depth")->capture_default_str();
  cmd->add_option("--mutation-rate", ma.mutation_rate, "Per-term mutation probability")->capture_default_str();
  cmd->add_option("--delta", ma.delta, "Fitness complexity penalty")->capture_default_str();
  cmd->add_option("--root-reset", ma.root_stagnation_reset,
                  "Generations without improvement before the root is reset")->capture_default_str();
  cmd->add_option("--tree-depth", ma.tree_depth, "Levels of the ternary population tree")->capture_default_str();
  cmd->add_option("--nm-restarts", ma.nm_restarts, "Nelder-Mead runs per local search")->capture_default_str();
  cmd->add_option("--nm-iters", ma.nm_max_iters, "Nelder-Mead iterations per run")->capture_default_str();
  cmd->add_option("--nm-stagnation", ma.nm_stagnation_reset,
                  "Iterations without improvement before Nelder-Mead restarts")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continued fraction regression and regression benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cfr_version()));

  // gen-sinc
  std::size_t sinc_n = 500;
  double sinc_lo = -10.0, sinc_hi = 10.0, sinc_noise = 0.1;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* gen_sinc = app.add_subcommand("gen-sinc", "Noisy 1 + sin(x)/x on an even grid, features x and x^2");
  gen_sinc->add_option("--n", sinc_n, "Number of points")->capture_default_str();
  gen_sinc->add_option("--lo", sinc_lo, "Grid start")->capture_default_str();
  gen_sinc->add_option("--hi", sinc_hi, "Grid end")->capture_default_str();
  gen_sinc->add_option("--noise", sinc_noise, "Noise standard deviation")->capture_default_str();
  gen_sinc->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen_sinc->add_option("--out", out_path, "Dataset CSV to write")->required();

  // gen-sparse
  std::size_t sp_n = 120, sp_p = 50, sp_k = 5;
  double sp_noise = 0.5;
  std::string truth_path;
  auto* gen_sparse = app.add_subcommand("gen-sparse", "Sparse linear data with a truth sidecar");
  gen_sparse->add_option("--n", sp_n, "Samples")->capture_default_str();
  gen_sparse->add_option("--p", sp_p, "Features")->capture_default_str();
  gen_sparse->add_option("--k", sp_k, "Informative features")->capture_default_str();
  gen_sparse->add_option("--noise", sp_noise, "Noise standard deviation")->capture_default_str();
  gen_sparse->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen_sparse->add_option("--out", out_path, "Dataset CSV to write")->required();
  gen_sparse->add_option("--truth", truth_path, "Truth CSV (feature,beta); default <out>.truth.csv");

  // fit
  std::string data_path, method = "iter-cfr", model_path;
  double lambda = 1.0;
  std::size_t max_depth = 5;
  cfr_ma_config ma;
  cfr_ma_config_default(&ma);
  auto* fit = app.add_subcommand("fit", "Fit one model and write its JSON document");
  fit->add_option("--data", data_path, "Dataset CSV")->required();
  fit->add_option("--method", method, "iter-cfr, ols or lasso")
      ->check(CLI::IsMember({"iter-cfr", "ols", "lasso"}))->capture_default_str();
  fit->add_option("--lambda", lambda, "Lasso penalty")->capture_default_str();
  fit->add_option("--max-depth", max_depth, "iter-CFR depth cap")->capture_default_str();
  fit->add_option("--seed", seed, "Random seed")->capture_default_str();
  fit->add_option("--model-out", model_path, "Model JSON to write");
  add_ma_options(fit, ma);

  // eval
  auto* eval = app.add_subcommand("eval", "MSE of a saved model on a dataset");
  eval->add_option("--model", model_path, "Model JSON")->required();
  eval->add_option("--data", data_path, "Dataset CSV")->required();

  // benchmark / ood
  cfr_benchmark_config bench;
  cfr_benchmark_config_default(&bench);
  std::string methods = "iter-cfr,ols,lasso";
  std::string out_dir = "report";
  std::vector<std::string> imports;
  double split = 0.8;
  auto add_protocol_options = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_path, "Dataset CSV")->required();
    cmd->add_option("--methods", methods, "Comma-separated native methods")->capture_default_str();
    cmd->add_option("--runs", bench.runs, "Repetitions")->capture_default_str();
    cmd->add_option("--split", split, "Training fraction")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed; run r uses seed + r")->capture_default_str();
    cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--lambda", bench.lasso_lambda, "Lasso penalty")->capture_default_str();
    cmd->add_option("--max-depth", bench.max_depth, "iter-CFR depth cap")->capture_default_str();
    cmd->add_option("--import", imports, "External predictions as METHOD=FILE (repeatable)");
    cmd->add_option("--out-dir", out_dir, "Directory for records and reports")->capture_default_str();
    add_ma_options(cmd, bench.ma);
  };
  auto* benchmark = app.add_subcommand("benchmark", "Repeated random train/test splits");
  add_protocol_options(benchmark);
  double year_lo = 1585, year_hi = 1610;
  auto* ood = app.add_subcommand("ood", "Train inside a target range, test outside it");
  add_protocol_options(ood);
  ood->add_option("--lo", year_lo, "Range start (inclusive)")->capture_default_str();
  ood->add_option("--hi", year_hi, "Range end (inclusive)")->capture_default_str();

  // stats
  std::vector<std::string> record_files;
  double alpha = 0.10;
  auto* stats = app.add_subcommand("stats", "Friedman test, Nemenyi post-hoc, CD data, first places");
  stats->add_option("records", record_files, "RunRecords CSV files")->required();
  stats->add_option("--alpha", alpha, "Significance level for the critical difference (0.05 or 0.10)")
      ->capture_default_str();
  stats->add_option("--out-dir", out_dir, "Directory for stats outputs")->capture_default_str();

  // select
  std::size_t top_k = 50;
  bool use_lasso = false;
  int trials = 100;
  double subset = 0.8, threshold = 0.9;
  std::string report_path;
  auto* select = app.add_subcommand("select", "Pearson top-k or repeated-lasso feature selection");
  select->add_option("--data", data_path, "Dataset CSV")->required();
  select->add_option("--top-k", top_k, "Features kept by |Pearson r|")->capture_default_str();
  select->add_flag("--lasso", use_lasso, "Use the repeated-lasso protocol instead");
  select->add_option("--lambda", lambda, "Lasso penalty")->capture_default_str();
  select->add_option("--trials", trials, "Lasso trials")->capture_default_str();
  select->add_option("--subset", subset, "Sample fraction per trial")->capture_default_str();
  select->add_option("--threshold", threshold, "Minimum appearance share")->capture_default_str();
  select->add_option("--seed", seed, "Random seed")->capture_default_str();
  select->add_option("--out", out_path, "Reduced dataset CSV")->required();
  select->add_option("--report", report_path, "Selection report CSV; default <out>.report.csv");

  // bins
  auto* bins = app.add_subcommand("bins", "sqrt(N) histogram of the (year) targets");
  bins->add_option("--data", data_path, "Dataset CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_sinc) {
      Dataset ds;
      check(cfr_gen_sinc(sinc_n, sinc_lo, sinc_hi, sinc_noise, seed, ds.out()));
      check(cfr_dataset_save_csv(ds.get(), out_path.c_str()));
      std::cout << "wrote " << cfr_dataset_rows(ds.get()) << " samples to " << out_path << '\n';
    } else if (*gen_sparse) {
      Dataset ds;
      std::vector<double> beta(sp_p);
      double intercept = 0.0;
      check(cfr_gen_sparse_linear(sp_n, sp_p, sp_k, sp_noise, seed, ds.out(), beta.data(), &intercept));
      check(cfr_dataset_save_csv(ds.get(), out_path.c_str()));
      if (truth_path.empty()) truth_path = out_path + ".truth.csv";
      std::string truth = "feature,beta\n(intercept)," + std::to_string(intercept) + "\n";
      for (std::size_t j = 0; j < sp_p; ++j) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", beta[j]);
        truth += std::string(cfr_dataset_feature_name(ds.get(), j)) + "," + buf + "\n";
      }
      write_text(truth_path, truth);
      std::cout << "wrote " << sp_n << "x" << sp_p << " to " << out_path << ", truth to " << truth_path << '\n';
    } else if (*fit) {
      Dataset ds;
      check(cfr_dataset_load_csv(data_path.c_str(), ds.out()));
      Model model;
      if (method == "iter-cfr") {
        ma.seed = seed;
        std::vector<cfr_depth_record> history(max_depth + 2);
        std::size_t count = 0;
        check(cfr_fit_iter_cfr(ds.get(), &ma, max_depth, model.out(), history.data(), history.size(), &count));
        for (std::size_t i = 0; i < count && i < history.size(); ++i) {
          std::cout << "depth " << history[i].depth << "  train mse " << history[i].train_mse
                    << (history[i].accepted ? "" : "  (rejected)") << '\n';
        }
      } else if (method == "ols") {
        int ridge = 0;
        check(cfr_fit_ols(ds.get(), model.out(), &ridge));
        if (ridge) std::cout << "note: rank-deficient design, ridge fallback used\n";
      } else {
        check(cfr_fit_lasso(ds.get(), lambda, model.out()));
      }
      double mse = 0.0;
      std::size_t undefined = 0;
      check(cfr_model_mse(model.get(), ds.get(), &mse, &undefined));
      Text text;
      check(cfr_model_to_text(model.get(), text.out()));
      std::cout << text.get() << "train mse " << mse << ", undefined evaluations " << undefined << '\n';
      if (!model_path.empty()) {
        Text json;
        check(cfr_model_to_json(model.get(), json.out()));
        write_text(model_path, json.get());
      }
    } else if (*eval) {
      Dataset ds;
      check(cfr_dataset_load_csv(data_path.c_str(), ds.out()));
      Model model;
      check(cfr_model_from_json(read_text(model_path).c_str(), model.out()));
      double mse = 0.0;
      std::size_t undefined = 0;
      check(cfr_model_mse(model.get(), ds.get(), &mse, &undefined));
      std::cout << "mse " << mse << ", undefined evaluations " << undefined << '\n';
    } else if (*benchmark || *ood) {
      Dataset ds;
      check(cfr_dataset_load_csv(data_path.c_str(), ds.out()));
      bench.methods = methods.c_str();
      bench.train_frac = split;
      bench.seed = seed;
      Records records;
      if (methods.empty()) {
        check(cfr_records_create(records.out()));
      } else if (*benchmark) {
        check(cfr_run_benchmark(ds.get(), &bench, records.out()));
      } else {
        check(cfr_run_out_of_domain(ds.get(), year_lo, year_hi, &bench, records.out()));
      }
      for (const auto& item : imports) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--import expects METHOD=FILE");
        check(cfr_records_import_predictions(records.get(), item.substr(0, eq).c_str(),
                                             item.substr(eq + 1).c_str(), ds.get()));
      }
      const std::filesystem::path dir(out_dir);
      Text csv, text, dcsv, ftext, fcsv;
      check(cfr_records_to_csv(records.get(), csv.out()));
      const bool is_ood = static_cast<bool>(*ood);
      const std::string title = is_ood ? "Out-of-domain MSE (sorted by average test MSE)"
                                       : "Descriptive statistics of train/test MSE";
      check(cfr_report_describe(records.get(), title.c_str(), is_ood ? 1 : 0, text.out(), dcsv.out()));
      check(cfr_report_first_place(records.get(), ftext.out(), fcsv.out()));
      write_text(dir / "records.csv", csv.get());
      write_text(dir / "describe.txt", text.get());
      write_text(dir / "describe.csv", dcsv.get());
      write_text(dir / "first_place.txt", ftext.get());
      write_text(dir / "first_place.csv", fcsv.get());
      std::cout << text.get() << '\n' << ftext.get();
    } else if (*stats) {
      Records all;
      check(cfr_records_create(all.out()));
      for (const auto& f : record_files) {
        Records part;
        check(cfr_records_load_csv(f.c_str(), part.out()));
        check(cfr_records_append(all.get(), part.get()));
      }
      cfr_stats_output out{};
      check(cfr_stats(all.get(), alpha, &out));
      const std::filesystem::path dir(out_dir);
      write_text(dir / "stats.txt", out.text);
      write_text(dir / "ranks.csv", out.ranks_csv);
      write_text(dir / "posthoc.csv", out.posthoc_csv);
      write_text(dir / "cd.json", out.cd_json);
      write_text(dir / "first_place.csv", out.first_place_csv);
      std::cout << out.text;
      cfr_stats_output_free(&out);
    } else if (*select) {
      Dataset ds;
      check(cfr_dataset_load_csv(data_path.c_str(), ds.out()));
      Dataset reduced;
      Text report;
      if (use_lasso) {
        check(cfr_select_lasso(ds.get(), lambda, trials, subset, threshold, seed, reduced.out(), report.out()));
      } else {
        Text warnings;
        check(cfr_select_pearson(ds.get(), top_k, reduced.out(), report.out(), warnings.out()));
        std::cerr << warnings.get();
      }
      check(cfr_dataset_save_csv(reduced.get(), out_path.c_str()));
      if (report_path.empty()) report_path = out_path + ".report.csv";
      write_text(report_path, report.get());
      std::cout << report.get() << "kept " << cfr_dataset_cols(reduced.get()) << " features\n";
    } else if (*bins) {
      Dataset ds;
      check(cfr_dataset_load_csv(data_path.c_str(), ds.out()));
      std::vector<int> dates(cfr_dataset_rows(ds.get()));
      for (std::size_t i = 0; i < dates.size(); ++i) {
        dates[i] = static_cast<int>(std::lround(cfr_dataset_target(ds.get(), i)));
      }
      Text csv;
      check(cfr_date_bins(dates.data(), dates.size(), csv.out()));
      std::cout << csv.get();
    }
  } catch (const Failure& f) {
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
