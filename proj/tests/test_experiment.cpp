#include "cfr/baselines.hpp"
#include "cfr/errors.hpp"
#include "cfr/experiment.hpp"
#include "cfr/generators.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cfr;

namespace {

BenchmarkConfig small_config(std::vector<std::string> methods, int runs) {
  BenchmarkConfig c;
  c.methods = std::move(methods);
  c.runs = runs;
  c.seed = 40;
  c.ma.generations = 3;
  c.max_depth = 1;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("benchmark records are ordered and reproducible") {
    const auto data = make_sinc(80, -10, 10, 0.1, 1);
    auto cfg = small_config({"iter-cfr", "ols", "lasso"}, 3);
    const auto a = run_benchmark(data, cfg);
    REQUIRE(a.size() == 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].run_id == static_cast<int>(i / 3));
      CHECK(a[i].method == cfg.methods[i % 3]);
      CHECK(a[i].train_mse.has_value());
      CHECK(a[i].test_mse >= 0.0);
    }
    cfg.threads = 3;
    CHECK(run_benchmark(data, cfg) == a);
  }

  TEST_CASE("benchmark OLS run matches a direct fit on the same split") {
    const auto data = make_sinc(60, -10, 10, 0.1, 2);
    const auto recs = run_benchmark(data, small_config({"ols"}, 2));
    const auto split = random_split(data, 0.8, 40 + 1);
    const auto m = ols_fit(split.train);
    CHECK(recs[1].test_mse == mean_squared_error(m, split.test));
    CHECK(*recs[1].train_mse == mean_squared_error(m, split.train));
  }

  TEST_CASE("out-of-domain benchmark tests only outside the range") {
    const auto s = make_sparse_linear(100, 3, 2, 0.5, 6);
    std::vector<double> y;
    for (std::size_t i = 0; i < 100; ++i) y.push_back(1560.0 + double(i % 60));
    const Dataset d(s.data.sample_ids(), s.data.feature_names(), s.data.values(), y);
    const auto recs = run_out_of_domain(d, 1585, 1610, small_config({"ols", "lasso"}, 2));
    CHECK(recs.size() == 4);
    CHECK_THROWS_AS(run_out_of_domain(d, 1000, 2000, small_config({"ols"}, 1)), InputError);
  }

  TEST_CASE("unknown native method") {
    CHECK(is_native_method("lasso"));
    CHECK_FALSE(is_native_method("rf"));
    CHECK_THROWS_AS(run_benchmark(make_sinc(30), small_config({"rf"}, 1)), InputError);
  }

  TEST_CASE("records csv round-trips, absent train MSE included") {
    const std::vector<RunRecord> recs{{0, "ols", 0.125, 0.3333333333333333},
                                      {0, "rf", std::nullopt, 1e-17},
                                      {1, "ols", 2.0 / 3.0, 5.5},
                                      {1, "rf", std::nullopt, 0.1}};
    const auto text = format_records_csv(recs);
    CHECK(text.rfind("run_id,method,train_mse,test_mse\n", 0) == 0);
    CHECK(text.find("0,rf,,") != std::string::npos);
    CHECK(parse_records_csv(text) == recs);
    CHECK_THROWS_AS(parse_records_csv("run_id,method,train_mse,test_mse\n0,ols,1,-2\n"),
                    SchemaError);
    CHECK_THROWS_AS(parse_records_csv("run,method\n"), SchemaError);
  }

  TEST_CASE("report shapes") {
    std::vector<RunRecord> recs;
    for (int run = 0; run < 12; ++run) {
      recs.push_back({run, "iter-cfr", 0.01, 0.012 + 0.001 * (run % 3)});
      recs.push_back({run, "ols", 0.1, 0.11 + 0.001 * run});
      recs.push_back({run, "lasso", 0.1, run == 5 ? 0.001 : 0.12});
    }
    const auto table = describe(recs);
    const auto text = format_describe_text(table, "sinc");
    CHECK(text.find("train avg") != std::string::npos);
    CHECK(text.find("test std") != std::string::npos);
    const auto csv = format_describe_csv(table);
    CHECK(csv.rfind("method,runs,train_avg,train_med,train_std,test_avg,test_med,test_std\n", 0) == 0);

    const auto ranks = build_rank_matrix(recs);
    const auto firsts = first_place_table(ranks);
    CHECK(firsts[0].firsts == 11);
    CHECK(firsts[2].firsts == 1);
    CHECK(format_first_place_csv(firsts).rfind("method,firsts,min_rank,max_rank\n", 0) == 0);

    const auto report = compute_stats_report(recs, 0.10);
    const auto cd = nlohmann::json::parse(report.cd_json);
    CHECK(cd["alpha"] == 0.10);
    CHECK(cd["runs"] == 12);
    CHECK(cd["methods"].size() == 3);
    CHECK(cd["cd"].get<double>() == doctest::Approx(nemenyi_cd(3, 12, 0.10)));
    CHECK(report.text.find("Friedman") != std::string::npos);
    CHECK(report.ranks_csv.rfind("run_id,iter-cfr,ols,lasso\n", 0) == 0);
    CHECK(compute_stats_report(recs, 0.10).text == report.text);
  }

  TEST_CASE("imported methods join native ones in the statistics") {
    const auto data = make_sinc(40, -10, 10, 0.1, 3);
    const auto recs = run_benchmark(data, small_config({"ols"}, 2));
    std::string csv = "run_id,sample_id,prediction,split\n";
    for (int run = 0; run < 2; ++run) {
      const auto split = random_split(data, 0.8, 40 + run);
      for (const auto& id : split.test.sample_ids())
        csv += std::to_string(run) + "," + id + ",1.1,test\n";
    }
    auto all = recs;
    for (const auto& r : score_predictions(parse_predictions_csv(csv, "const"), data)) all.push_back(r);
    const auto back = parse_records_csv(format_records_csv(all));
    const auto ranks = build_rank_matrix(back);
    CHECK(ranks.methods == std::vector<std::string>{"ols", "const"});
    CHECK(ranks.runs() == 2);
  }
}
