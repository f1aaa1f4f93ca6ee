#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "cfr/errors.hpp"
#include "cfr/generators.hpp"
#include "cfr/stats.hpp"
#include "doctest.h"

using namespace cfr;

namespace {

Dataset indexed(std::size_t n, std::vector<double> targets = {}) {
  std::vector<std::string> ids;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("s" + std::to_string(i));
    x.push_back(static_cast<double>(i));
  }
  if (targets.empty()) targets = x;
  return Dataset(ids, {"x"}, x, targets);
}

RankMatrix ordered_fixture() {
  RankMatrix m;
  m.methods = {"A", "B", "C"};
  for (int r = 0; r < 10; ++r) {
    m.run_ids.push_back(r);
    m.ranks.push_back({1, 2, 3});
  }
  return m;
}

RankMatrix from_rows(std::vector<std::vector<double>> rows) {
  RankMatrix m;
  for (std::size_t j = 0; j < rows.front().size(); ++j) m.methods.push_back("m" + std::to_string(j));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.run_ids.push_back(static_cast<int>(r));
    m.ranks.push_back(rank_methods(rows[r]));
  }
  return m;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("80/20 split sizes and reproducibility") {
    const auto s = split_80_20(indexed(181), 4);
    CHECK(s.train.rows() == 145);
    CHECK(s.test.rows() == 36);
    std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
    all.insert(s.test_rows.begin(), s.test_rows.end());
    CHECK(all.size() == 181);

    const auto five = split_80_20(indexed(5), 1);
    CHECK(five.train.rows() == 4);
    CHECK(five.test.rows() == 1);

    CHECK(split_80_20(indexed(181), 4).train_rows == s.train_rows);
    CHECK(split_80_20(indexed(181), 5).train_rows != s.train_rows);
    CHECK_THROWS_AS(split_80_20(indexed(4), 0), InputError);
  }

  TEST_CASE("out-of-domain split") {
    std::vector<double> years;
    for (int i = 0; i < 100; ++i) years.push_back(1585 + i % 26);
    for (int i = 0; i < 20; ++i) years.push_back(i < 10 ? 1570 : 1620);
    const auto d = indexed(120, years);
    const auto s = out_of_domain_split(d, 1585, 1610, 0.8, 7);
    CHECK(s.train.rows() == 80);
    CHECK(s.test.rows() == 20);
    for (double y : s.test.targets()) CHECK((y < 1585 || y > 1610));
    for (double y : s.train.targets()) CHECK((y >= 1585 && y <= 1610));
    CHECK_THROWS_AS(out_of_domain_split(d, 1500, 1700, 0.8, 0), InputError);
    CHECK_THROWS_AS(out_of_domain_split(d, 1700, 1800, 0.8, 0), InputError);
  }

  TEST_CASE("summaries") {
    const auto s = summarize({3, 1, 2});
    CHECK(s.avg == 2.0);
    CHECK(s.med == 2.0);
    CHECK(s.std == 1.0);
    const auto one = summarize({4.2});
    CHECK(one.std == 0.0);
    CHECK_FALSE(one.std_defined());
    CHECK(summarize({1, 2, 3, 10}).med == 2.5);
  }

  TEST_CASE("summary of 100 values matches an independent two-pass oracle") {
    std::mt19937_64 rng(5);
    std::lognormal_distribution<double> ln(-2.0, 0.7);
    std::vector<double> v(100);
    for (double& x : v) x = ln(rng);
    long double sum = 0;
    for (double x : v) sum += x;
    const long double mean = sum / 100;
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double med = (sorted[49] + sorted[50]) / 2;
    const auto s = summarize(v);
    CHECK(std::abs(s.avg - static_cast<double>(mean)) < 1e-12);
    CHECK(std::abs(s.std - static_cast<double>(std::sqrt(ss / 99))) < 1e-12);
    CHECK(s.med == med);
  }

  TEST_CASE("describe and sort") {
    std::vector<RunRecord> recs{{0, "cfr", 1.0, 5.0}, {0, "ols", std::nullopt, 2.0},
                                {1, "cfr", 3.0, 7.0}, {1, "ols", std::nullopt, 4.0}};
    auto table = describe(recs);
    REQUIRE(table.size() == 2);
    CHECK(table[0].method == "cfr");
    CHECK(table[0].train->avg == 2.0);
    CHECK_FALSE(table[1].train.has_value());
    sort_by_test_average(table);
    CHECK(table[0].method == "ols");
  }

  TEST_CASE("ranking with ties") {
    CHECK(rank_methods({5, 7, 7, 9}) == std::vector<double>{1, 2.5, 2.5, 4});
    CHECK(rank_methods({2, 2, 2}) == std::vector<double>{2, 2, 2});
    std::vector<double> eleven{9, 3, 11, 1, 5, 7, 2, 10, 4, 8, 6};
    auto r = rank_methods(eleven);
    CHECK(r == eleven);  // values are already 1..11
    std::sort(r.begin(), r.end());
    for (int i = 0; i < 11; ++i) CHECK(r[i] == i + 1);
  }

  TEST_CASE("rank matrix rows sum to k(k+1)/2") {
    std::vector<RunRecord> recs;
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> u(0, 3);
    for (int run = 0; run < 30; ++run)
      for (const char* m : {"a", "b", "c", "d", "e"}) recs.push_back({run, m, std::nullopt, double(u(rng))});
    const auto m = build_rank_matrix(recs);
    CHECK(m.runs() == 30);
    for (const auto& row : m.ranks) CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 15.0);
    recs.pop_back();
    CHECK_THROWS_AS(build_rank_matrix(recs), InputError);
  }

  TEST_CASE("Friedman on the always-ordered fixture") {
    const auto f = friedman_test(ordered_fixture());
    CHECK(f.statistic == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(f.df == 2);
    // chi2 upper tail with 2 df is exp(-x / 2).
    CHECK(std::abs(f.p_value - std::exp(-10.0)) / std::exp(-10.0) < 1e-7);
    CHECK(std::abs(f.p_value - 4.54e-5) < 1e-7);
  }

  TEST_CASE("Friedman degenerate and paper-scale shapes") {
    RankMatrix flat = from_rows(std::vector<std::vector<double>>(6, {1.0, 1.0, 1.0}));
    const auto f = friedman_test(flat);
    CHECK(f.statistic == 0.0);
    CHECK(f.p_value == 1.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> rows(100, std::vector<double>(11));
    for (auto& row : rows)
      for (auto& v : row) v = u(rng);
    const auto big = friedman_test(from_rows(rows));
    CHECK(big.df == 10);
    CHECK(big.p_value >= 0.0);
    CHECK(big.p_value <= 1.0);
  }

  TEST_CASE("Friedman p-values under the null are rarely small") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0, 1);
    int large = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::vector<double>> rows(60, std::vector<double>(4));
      for (auto& row : rows)
        for (auto& v : row) v = u(rng);
      if (friedman_test(from_rows(rows)).p_value > 0.01) ++large;
    }
    CHECK(large >= 180);
  }

  TEST_CASE("Friedman is invariant to monotone transforms of MSEs") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 2);
    std::vector<std::vector<double>> rows(25, std::vector<double>(5)), logged = rows;
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < 5; ++j) {
        rows[r][j] = u(rng) + 0.1 * j;
        logged[r][j] = std::exp(3 * rows[r][j]) - 1;
      }
    CHECK(friedman_test(from_rows(rows)).statistic == friedman_test(from_rows(logged)).statistic);
  }

  TEST_CASE("studentized range distribution") {
    // Reference values from scipy.stats.studentized_range with df = inf.
    CHECK(studentized_range_cdf(2.0, 3) == doctest::Approx(0.66650067495985).epsilon(1e-8));
    CHECK(studentized_range_cdf(3.5, 5) == doctest::Approx(0.9036615360345732).epsilon(1e-8));
    CHECK(studentized_range_cdf(4.2, 11) == doctest::Approx(0.8978423877856295).epsilon(1e-8));
    CHECK(studentized_range_cdf(1.0, 2) == doctest::Approx(0.5204998778130465).epsilon(1e-8));
    // The tabulated critical values sit on the right quantiles.
    for (int k = 2; k <= 20; ++k) {
      CHECK(studentized_range_cdf(nemenyi_q(k, 0.05) * std::sqrt(2.0), k) ==
            doctest::Approx(0.95).epsilon(1e-4));
      CHECK(studentized_range_cdf(nemenyi_q(k, 0.10) * std::sqrt(2.0), k) ==
            doctest::Approx(0.90).epsilon(1e-4));
    }
  }

  TEST_CASE("Nemenyi critical difference") {
    CHECK(std::abs(nemenyi_cd(11, 100, 0.10) - 1.397) <= 0.15);
    CHECK(std::abs(nemenyi_cd(11, 100, 0.05) - 1.397) <= 0.15);
    CHECK(nemenyi_cd(11, 400, 0.10) == doctest::Approx(nemenyi_cd(11, 100, 0.10) / 2).epsilon(1e-15));
    CHECK(nemenyi_cd(2, 10, 0.05) > 0.0);
    for (int k = 3; k <= 20; ++k) CHECK(nemenyi_cd(k, 50, 0.05) > nemenyi_cd(k - 1, 50, 0.05));
    for (int n = 2; n < 200; ++n) CHECK(nemenyi_cd(5, n, 0.10) < nemenyi_cd(5, n - 1, 0.10));
    CHECK_THROWS_AS(nemenyi_cd(21, 10, 0.05), InputError);
    CHECK_THROWS_AS(nemenyi_cd(5, 10, 0.01), InputError);
  }

  TEST_CASE("post-hoc pairwise tests") {
    const auto ph = posthoc_pairwise(ordered_fixture());
    // |mean rank A - mean rank C| = 2 exceeds CD(3, 10) at 0.05.
    CHECK(2.0 > nemenyi_cd(3, 10, 0.05));
    CHECK(ph.p_values[0][2] < 0.05);
    CHECK(ph.bands[0][2] != "NS");
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(ph.p_values[i][j] == ph.p_values[j][i]);

    const auto same = posthoc_pairwise(from_rows(std::vector<std::vector<double>>(8, {1, 1, 1, 1})));
    for (const auto& row : same.bands)
      for (const auto& b : row) CHECK(b == "NS");

    CHECK(significance_band(0.2) == "NS");
    CHECK(significance_band(0.03) == "<0.05");
    CHECK(significance_band(0.005) == "<0.01");
    CHECK(significance_band(1e-9) == "<0.001");
  }

  TEST_CASE("first place table") {
    const auto dom = first_place_table(ordered_fixture());
    CHECK(dom[0].firsts == 10);
    CHECK(dom[1].firsts == 0);
    CHECK(dom[1].min_rank == 2.0);
    CHECK(dom[2].max_rank == 3.0);

    const auto tie = first_place_table(from_rows({{1.0, 1.0, 2.0}, {3.0, 1.0, 2.0}}));
    CHECK(tie[0].firsts == 1);
    CHECK(tie[1].firsts == 2);
    CHECK(tie[0].min_rank == 1.5);
    CHECK(tie[2].firsts == 0);
    CHECK(tie[2].min_rank > 1.0);
  }

  TEST_CASE("p-value formatting floor") {
    CHECK(format_p_value(1e-320) == "<1e-300");
    CHECK(format_p_value(0.0) == "<1e-300");
    CHECK(format_p_value(2.74845e-176).find("e-176") != std::string::npos);
  }
}
