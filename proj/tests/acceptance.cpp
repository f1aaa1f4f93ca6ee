// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cfr/baselines.hpp"
#include "cfr/cf_model.hpp"
#include "cfr/experiment.hpp"
#include "cfr/features.hpp"
#include "cfr/generators.hpp"
#include "cfr/iter_cfr.hpp"
#include "cfr/stats.hpp"
#include "printed_models.hpp"

using namespace cfr;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool accepted_strictly_decreasing(const IterCfrResult& r) {
  for (std::size_t k = 1; k < r.history.size(); ++k)
    if (r.history[k].accepted && !(r.history[k].train_mse < r.history[k - 1].train_mse))
      return false;
  return true;
}

std::vector<IterCfrResult> sinc_runs;

void criterion_1() {
  // One 500-point noisy sinc set; iter-CFR with the default configuration
  // under ten seeds. Needs >= 5 runs with MSE <= 0.03 and depth in 1..5.
  const auto data = make_sinc(500, -10.0, 10.0, 0.1, 1);
  int good = 0;
  std::ostringstream mses;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MAConfig c;
    c.seed = seed * 1000;
    auto r = fit_iter_cfr(data, c);
    const double mse = mean_squared_error(r.model, data);
    const std::size_t depth = r.model.depth();
    if (mse <= 0.03 && depth >= 1 && depth <= 5) ++good;
    mses << (seed > 1 ? " " : "") << fmt("%.5f", mse) << "@d" << depth;
    sinc_runs.push_back(std::move(r));
  }
  report(1, good >= 5, "sinc iter-CFR training MSE <= 0.03 in >= 5/10 seeds",
         std::to_string(good) + "/10 [" + mses.str() + "]");
}

void criterion_2() {
  const std::vector<double> two{2.0};
  const double mills = testing::mills_model(3).evaluate(two);
  const double mills_err = std::abs(mills - 3.0 / 7.0);

  double sinc_err = 0.0;
  const auto sinc = testing::printed_sinc_model();
  for (auto [x, expected] : testing::kPrintedSincProbes) {
    const std::vector<double> f{x, x * x};
    sinc_err = std::max(sinc_err, std::abs(sinc.evaluate(f) - expected));
  }
  double word_err = 0.0;
  const auto word = testing::printed_word_model();
  for (const auto& p : testing::kPrintedWordProbes)
    word_err = std::max(word_err, std::abs(word.evaluate(p.x) - p.value));

  report(2, mills_err <= 1e-12 && sinc_err <= 1e-9 && word_err <= 1e-9,
         "continued fraction evaluation oracles",
         "mills |err| " + fmt("%.2e", mills_err) + ", printed sinc max |err| " +
             fmt("%.2e", sinc_err) + ", printed word max |err| " + fmt("%.2e", word_err));
}

void criterion_3() {
  // Exact y = 3 x0 - 2 x1 + 0.5 over random inputs.
  const auto base = make_sparse_linear(100, 2, 2, 0.0, 31);
  std::vector<double> y;
  for (std::size_t i = 0; i < base.data.rows(); ++i)
    y.push_back(3.0 * base.data.at(i, 0) - 2.0 * base.data.at(i, 1) + 0.5);
  const Dataset linear(base.data.sample_ids(), base.data.feature_names(), base.data.values(), y);
  MAConfig c;
  c.seed = 31;
  const auto r = fit_iter_cfr(linear, c);
  std::size_t rejected = 0;
  for (const auto& h : r.history) rejected += h.accepted ? 0 : 1;
  const bool linear_ok = r.model.depth() == 0 && rejected == 1 && r.history.back().depth == 1 &&
                         !r.history.back().accepted;

  bool sinc_ok = !sinc_runs.empty();
  for (const auto& run : sinc_runs) sinc_ok = sinc_ok && accepted_strictly_decreasing(run);

  std::ostringstream hist;
  for (const auto& h : r.history)
    hist << " d" << h.depth << "=" << fmt("%.3e", h.train_mse) << (h.accepted ? "" : "(rejected)");
  report(3, linear_ok && sinc_ok, "iter-CFR stopping rule",
         "linear: returned depth " + std::to_string(r.model.depth()) + ", history" + hist.str() +
             "; sinc accepted MSEs strictly decreasing in " +
             std::to_string(sinc_runs.size()) + " runs: " + (sinc_ok ? "yes" : "no"));
}

void criterion_4() {
  const auto s = make_sparse_linear(120, 50, 5, 0.5, 4);

  // Largest lambda at which the full-data fit keeps at least 10 features.
  double lo = 0.0, hi = lasso_lambda_max(s.data);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lasso_fit(s.data, mid).selected.size() >= 10 ? lo : hi) = mid;
  }
  const double lambda = lo;
  const std::size_t kept = lasso_fit(s.data, lambda).selected.size();

  LassoProtocolConfig pc;
  pc.lambda = lambda;
  pc.seed = 4;
  const auto rep = lasso_selection_protocol(s.data, pc);
  double worst = 100.0;
  for (std::size_t j = 0; j < 50; ++j) {
    if (s.beta[j] == 0.0) continue;
    double pct = 0.0;
    for (const auto& e : rep.appearances)
      if (e.feature == s.data.feature_names()[j]) pct = e.pct;
    worst = std::min(worst, pct);
  }

  const auto ols = ols_fit(s.data);
  const auto l0 = lasso_fit(s.data, 0.0);
  double diff = std::abs(ols.intercept - l0.intercept);
  for (std::size_t j = 0; j < 50; ++j) diff = std::max(diff, std::abs(ols.coeffs[j] - l0.beta[j]));

  report(4, worst >= 90.0 && diff <= 1e-6, "lasso selection protocol",
         "lambda " + fmt("%.4g", lambda) + " keeps " + std::to_string(kept) +
             " features on full data; weakest true feature appears in " + fmt("%.0f", worst) +
             "% of 100 trials; " + std::to_string(rep.selected.size()) +
             " features >= 90%; lambda=0 vs OLS max |diff| " + fmt("%.2e", diff));
}

void criterion_5() {
  RankMatrix m;
  m.methods = {"A", "B", "C"};
  for (int r = 0; r < 10; ++r) {
    m.run_ids.push_back(r);
    m.ranks.push_back({1, 2, 3});
  }
  const auto f = friedman_test(m);
  const double p_ref = 4.539992976248485e-05;  // exp(-10)
  const double p_rel = std::abs(f.p_value - p_ref) / p_ref;
  const double cd = nemenyi_cd(11, 100, 0.10);
  const double halving = std::abs(nemenyi_cd(11, 400, 0.10) - cd / 2.0);
  report(5,
         std::abs(f.statistic - 20.0) <= 1e-12 && p_rel <= 1e-7 && std::abs(cd - 1.397) <= 0.15 &&
             halving <= 1e-15,
         "Friedman / Nemenyi critical difference",
         "statistic " + fmt("%.12g", f.statistic) + ", p " + fmt("%.10e", f.p_value) +
             " (rel err " + fmt("%.1e", p_rel) + "), CD(11,100,0.10) " + fmt("%.4f", cd) +
             " (CD at 0.05: " + fmt("%.4f", nemenyi_cd(11, 100, 0.05)) + "), CD(n*4) - CD/2 = " +
             fmt("%.1e", halving));
}

std::string benchmark_reports(const Dataset& data) {
  BenchmarkConfig c;
  c.runs = 20;
  c.seed = 600;
  const auto recs = run_benchmark(data, c);
  const auto table = describe(recs);
  const auto firsts = first_place_table(build_rank_matrix(recs));
  return format_records_csv(recs) + format_describe_text(table, "sinc, 20 runs") +
         format_describe_csv(table) + format_first_place_text(firsts) +
         format_first_place_csv(firsts);
}

void criterion_6() {
  const auto data = make_sinc(500, -10.0, 10.0, 0.1, 6);
  const auto a = benchmark_reports(data);
  const auto b = benchmark_reports(data);
  const bool shape = a.find("train avg") != std::string::npos &&
                     a.find("test std") != std::string::npos &&
                     a.find("iter-cfr") != std::string::npos && a.find("ols") != std::string::npos &&
                     a.find("lasso") != std::string::npos &&
                     a.find("method,firsts,min_rank,max_rank") != std::string::npos;
  report(6, shape && a == b, "20-run sinc benchmark reports reproducible",
         "report bytes " + std::to_string(a.size()) + ", identical across reruns: " +
             (a == b ? "yes" : "no"));
  std::printf("%s", a.substr(a.find("sinc, 20 runs")).c_str());
}

void criterion_7() {
  // Corpus-dependent numbers cannot be reproduced; check that corpus-shaped
  // inputs flow through the pipeline: 11 methods x 100 runs, external methods
  // in the prediction-import format, out-of-domain year ranges.
  bool ok = true;
  std::string detail;
  try {
    const std::vector<std::string> methods{"ada-b", "grad-b", "rf",   "xg-b", "mlp",     "sgd-r",
                                           "krnl-r", "l-svr", "lasso-l", "l-regr", "iter-cfr"};
    std::vector<RunRecord> recs;
    for (int run = 0; run < 100; ++run)
      for (std::size_t j = 0; j < methods.size(); ++j)
        recs.push_back({run, methods[j], 90.0 + j, 120.0 + double((j * 7 + run) % 11)});
    const auto back = parse_records_csv(format_records_csv(recs));
    const auto stats = compute_stats_report(back, 0.10);
    ok = ok && back == recs && stats.cd_json.find("\"runs\": 100") != std::string::npos;

    std::vector<double> years;
    for (int i = 0; i < 181; ++i) years.push_back(1560 + (i * 13) % 80);
    const auto words = make_sparse_linear(181, 50, 5, 0.5, 7);
    const Dataset plays(words.data.sample_ids(), words.data.feature_names(), words.data.values(),
                        years);
    const auto split = split_80_20(plays, 0);
    const auto ood = out_of_domain_split(plays, 1585, 1610, 0.8, 0);
    ok = ok && split.train.rows() == 145 && ood.test.rows() > 0;
    std::string csv = "run_id,sample_id,prediction,split\n";
    for (const auto& id : split.test.sample_ids()) csv += "0," + id + ",1600,test\n";
    ok = ok && score_predictions(parse_predictions_csv(csv, "rf"), plays).size() == 1;
    detail = "corpus values not reproducible; schema checks (11x100 records, 181-sample splits, "
             "prediction import) " + std::string(ok ? "pass" : "fail");
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("schema check threw: ") + e.what();
  }
  report(7, ok, "corpus tables (substituted by schema compatibility)", detail);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d failure(s), %.0f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
