#include <cmath>
#include <random>

#include "cfr/cf_model.hpp"
#include "cfr/errors.hpp"
#include "cfr/generators.hpp"
#include "doctest.h"
#include "printed_models.hpp"

using namespace cfr;

namespace {

ContinuedFractionModel random_model(std::size_t depth, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
  auto term = [&] {
    LinearTerm t;
    for (std::size_t j = 0; j < p; ++j) t.coeffs.push_back(n(rng));
    t.constant = n(rng) + 3.0;
    return t;
  };
  std::vector<LinearTerm> g, h;
  for (std::size_t i = 0; i <= depth; ++i) g.push_back(term());
  for (std::size_t i = 0; i < depth; ++i) h.push_back(term());
  return ContinuedFractionModel(names, g, h);
}

}  // namespace

TEST_SUITE("cf_model") {
  TEST_CASE("depth-0 constant model ignores its input") {
    ContinuedFractionModel m({"a", "b"}, {LinearTerm{{0, 0}, 1608.8}}, {});
    CHECK(m.depth() == 0);
    CHECK(m.active_features().empty());
    const std::vector<double> x{3.0, -7.0};
    CHECK(m.evaluate(x) == 1608.8);
  }

  TEST_CASE("Mills fraction truncated at depth 3 gives 3/7 at x = 2") {
    const auto m = testing::mills_model(3);
    const std::vector<double> x{2.0};
    CHECK(m.evaluate(x) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(std::abs(m.evaluate(x) - 3.0 / 7.0) < 1e-12);
  }

  TEST_CASE("Mills truncations close in on the Mills ratio") {
    const std::vector<double> x{2.0};
    const double d1 = testing::mills_model(1).evaluate(x);
    const double d3 = testing::mills_model(3).evaluate(x);
    const double d5 = testing::mills_model(5).evaluate(x);
    CHECK(d1 == doctest::Approx(0.5));
    CHECK(d5 == doctest::Approx(0.4225352112676056).epsilon(1e-14));
    CHECK(std::abs(d5 - d3) < std::abs(d3 - d1));
    const double mills = 0.42136922928805415;  // (1 - Phi(2)) / phi(2)
    CHECK((d1 - mills) * (d3 - mills) > 0.0);
    CHECK(std::abs(d5 - mills) < std::abs(d3 - mills));
  }

  TEST_CASE("printed depth-3 sinc model matches exact-arithmetic oracle") {
    const auto m = testing::printed_sinc_model();
    CHECK(m.depth() == 3);
    const std::vector<double> zero{0.0, 0.0};
    CHECK(std::abs(m.evaluate(zero) - testing::kPrintedSincAtZero) < 1e-9);
    for (auto [x, expected] : testing::kPrintedSincProbes) {
      const std::vector<double> f{x, x * x};
      CHECK(std::abs(m.evaluate(f) - expected) < 1e-9);
      CHECK(std::abs(testing::convergent_value(m, f) - expected) < 1e-9);
    }
  }

  TEST_CASE("printed depth-1 word model matches exact-arithmetic oracle") {
    const auto m = testing::printed_word_model();
    CHECK(m.depth() == 1);
    CHECK(m.active_features().size() == 6);
    for (const auto& probe : testing::kPrintedWordProbes) {
      CHECK(std::abs(m.evaluate(probe.x) - probe.value) < 1e-9);
    }
  }

  TEST_CASE("dimension mismatch is an input error") {
    const auto m = testing::printed_sinc_model();
    const std::vector<double> x{1.0};
    CHECK_THROWS_AS(m.evaluate(x), InputError);
  }

  TEST_CASE("construction enforces the term and mask invariants") {
    CHECK_THROWS_AS(ContinuedFractionModel({"a"}, {}, {}), InputError);
    CHECK_THROWS_AS(ContinuedFractionModel({"a"}, {LinearTerm{{1}, 0}, LinearTerm{{1}, 0}}, {}),
                    InputError);
    CHECK_THROWS_AS(ContinuedFractionModel({"a"}, {LinearTerm{{1, 2}, 0}}, {}), InputError);
    CHECK_THROWS_AS(ContinuedFractionModel({"a"}, {LinearTerm{{1}, 0}}, {}, {false}), InputError);
    CHECK_THROWS_AS(ContinuedFractionModel({"a"}, {LinearTerm{{NAN}, 0}}, {}), InputError);
  }

  TEST_CASE("deactivating a feature zeroes it everywhere") {
    auto m = random_model(2, 3, 11);
    m.set_active(1, false);
    for (std::size_t pos = 0; pos < m.term_count(); ++pos) CHECK(m.term(pos).coeffs[1] == 0.0);
    CHECK(m.active_features() == std::vector<std::size_t>{0, 2});
    CHECK(m.free_parameter_count() == 5 * 3);
  }

  TEST_CASE("free parameters round-trip") {
    auto m = random_model(2, 3, 5);
    m.set_active(0, false);
    auto p = m.free_parameters();
    for (double& v : p) v += 0.25;
    auto copy = m;
    copy.set_free_parameters(p);
    CHECK(copy.free_parameters() == p);
    CHECK(copy.term(0).coeffs[0] == 0.0);
  }

  TEST_CASE("denominator guard clamps and counts") {
    // 1 + 1 / (0 * x): the inner denominator is exactly zero.
    ContinuedFractionModel m({"x"}, {LinearTerm{{0}, 1.0}, LinearTerm{{0}, 0.0}},
                             {LinearTerm{{0}, 1.0}});
    std::size_t undefined = 0;
    const std::vector<double> x{0.5};
    CHECK(m.evaluate(x, &undefined) == doctest::Approx(1.0 + 1e12));
    CHECK(undefined == 1);
  }

  TEST_CASE("mse examples") {
    ContinuedFractionModel c({"x"}, {LinearTerm{{0}, 4.0}}, {});
    Dataset d({"a", "b"}, {"x"}, {0.0, 1.0}, {5.0, 3.0});
    const auto r = evaluate_dataset(c, d);
    CHECK(r.mse == 1.0);
    CHECK(r.predictions == std::vector<double>{4.0, 4.0});
    CHECK(r.undefined_count == 0);

    ContinuedFractionModel exact({"x"}, {LinearTerm{{2.0}, 1.0}}, {});
    Dataset line({"a", "b", "c"}, {"x"}, {0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
    CHECK(mean_squared_error(exact, line) == 0.0);

    CHECK_THROWS_AS(evaluate_dataset(c, Dataset({}, {"x"}, {}, {})), InputError);
  }

  TEST_CASE("printed sinc model on fresh noisy sinc data lies in the expected band") {
    const auto data = make_sinc(500, -10.0, 10.0, 0.1, 2024);
    const double mse = mean_squared_error(testing::printed_sinc_model(), data);
    CHECK(mse >= 0.005);
    CHECK(mse <= 0.05);
  }

  TEST_CASE("adding a zero-numerator level leaves predictions unchanged") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = random_model(seed % 4, 3, seed);
      const auto deeper = m.extended(m.depth() + 1 + seed % 2);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (int k = 0; k < 10; ++k) {
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        CHECK(deeper.evaluate(x) == m.evaluate(x));
      }
    }
  }

  TEST_CASE("feature permutation leaves predictions unchanged") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = random_model(2, 4, 100 + seed);
      const std::vector<std::size_t> perm{2, 0, 3, 1};
      auto permute = [&](const LinearTerm& t) {
        LinearTerm out{std::vector<double>(4), t.constant};
        for (std::size_t j = 0; j < 4; ++j) out.coeffs[j] = t.coeffs[perm[j]];
        return out;
      };
      std::vector<LinearTerm> g, h;
      for (const auto& t : m.g_terms()) g.push_back(permute(t));
      for (const auto& t : m.h_terms()) h.push_back(permute(t));
      ContinuedFractionModel pm({"f2", "f0", "f3", "f1"}, g, h);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      const std::vector<double> x{u(rng), u(rng), u(rng), u(rng)};
      const std::vector<double> px{x[2], x[0], x[3], x[1]};
      CHECK(pm.evaluate(px) == doctest::Approx(m.evaluate(x)).epsilon(1e-12));
    }
  }

  TEST_CASE("model document round-trips bitwise") {
    const auto m = random_model(2, 3, 77);
    const auto back = model_from_json(model_to_json(m));
    CHECK(back == m);
    for (std::size_t pos = 0; pos < m.term_count(); ++pos) {
      CHECK(back.term(pos).constant == m.term(pos).constant);
      CHECK(back.term(pos).coeffs == m.term(pos).coeffs);
    }
    const auto word = testing::printed_word_model();
    CHECK(model_from_json(model_to_json(word)) == word);
  }

  TEST_CASE("malformed model documents") {
    CHECK_THROWS_AS(model_from_json(""), ParseError);
    try {
      model_from_json("{\"format\": \"cfr-model\", \"depth\": 1,");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.position() > 0);
    }
    auto doc = model_to_json(testing::printed_sinc_model());
    doc.replace(doc.find("\"depth\": 3"), 10, "\"depth\": 2");
    CHECK_THROWS_AS(model_from_json(doc), ParseError);
    CHECK_THROWS_AS(model_from_json("{\"format\": \"other\"}"), ParseError);
    CHECK_THROWS_AS(model_from_json("[]"), ParseError);
  }

  TEST_CASE("text rendering lists every term") {
    const auto text = model_to_text(testing::printed_word_model());
    CHECK(text.find("g0(x) = 1604.17") != std::string::npos);
    CHECK(text.find("h0(x)") != std::string::npos);
    CHECK(text.find("g1(x)") != std::string::npos);
  }
}
