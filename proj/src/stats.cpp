#include "cfr/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cfr/errors.hpp"

namespace cfr {

Split random_split(const Dataset& data, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw InputError("split: fraction must lie in (0, 1)");
  const std::size_t n = data.rows();
  if (n < 2) throw InputError("split: need at least 2 samples");
  auto n_train = static_cast<std::size_t>(std::round(train_frac * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Split s;
  s.train_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_rows.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train_rows.begin(), s.train_rows.end());
  std::sort(s.test_rows.begin(), s.test_rows.end());
  s.train = data.subset(s.train_rows);
  s.test = data.subset(s.test_rows);
  return s;
}

Split split_80_20(const Dataset& data, std::uint64_t seed) {
  if (data.rows() < 5) throw InputError("80/20 split: need at least 5 samples");
  return random_split(data, 0.8, seed);
}

Split out_of_domain_split(const Dataset& data, double year_lo, double year_hi,
                          double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac <= 1.0)) {
    throw InputError("out-of-domain split: fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> inside;
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double y = data.targets()[i];
    (y >= year_lo && y <= year_hi ? inside : outside).push_back(i);
  }
  if (inside.empty()) throw InputError("out-of-domain split: no samples inside the range");
  if (outside.empty()) throw InputError("out-of-domain split: no samples outside the range");
  auto n_train = static_cast<std::size_t>(std::round(train_frac * static_cast<double>(inside.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, inside.size());
  std::mt19937_64 rng(seed);
  std::shuffle(inside.begin(), inside.end(), rng);
  Split s;
  s.train_rows.assign(inside.begin(), inside.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(s.train_rows.begin(), s.train_rows.end());
  s.test_rows = outside;
  s.train = data.subset(s.train_rows);
  s.test = data.subset(s.test_rows);
  return s;
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw InputError("summary of no values");
  Summary s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  s.avg = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::sort(values.begin(), values.end());
  const std::size_t mid = s.n / 2;
  s.med = s.n % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.avg) * (v - s.avg);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::vector<MethodSummary> describe(const std::vector<RunRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> values;
  for (const auto& r : records) {
    if (!values.count(r.method)) order.push_back(r.method);
    auto& [train, test] = values[r.method];
    if (r.train_mse) train.push_back(*r.train_mse);
    test.push_back(r.test_mse);
  }
  std::vector<MethodSummary> out;
  for (const auto& m : order) {
    auto& [train, test] = values[m];
    MethodSummary ms;
    ms.method = m;
    if (!train.empty()) ms.train = summarize(train);
    ms.test = summarize(test);
    out.push_back(std::move(ms));
  }
  return out;
}

void sort_by_test_average(std::vector<MethodSummary>& table) {
  std::stable_sort(table.begin(), table.end(), [](const MethodSummary& a, const MethodSummary& b) {
    return a.test.avg < b.test.avg;
  });
}

std::vector<double> rank_methods(const std::vector<double>& mses) {
  const std::size_t k = mses.size();
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mses[a] < mses[b]; });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && mses[idx[j + 1]] == mses[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> RankMatrix::mean_ranks() const {
  std::vector<double> out(method_count(), 0.0);
  for (const auto& row : ranks) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  for (double& v : out) v /= static_cast<double>(runs());
  return out;
}

RankMatrix build_rank_matrix(const std::vector<RunRecord>& records) {
  RankMatrix m;
  std::map<std::string, std::size_t> method_index;
  for (const auto& r : records) {
    if (method_index.emplace(r.method, m.methods.size()).second) m.methods.push_back(r.method);
  }
  std::map<int, std::vector<std::optional<double>>> runs;
  for (const auto& r : records) {
    auto& row = runs[r.run_id];
    row.resize(m.methods.size());
    auto& slot = row[method_index[r.method]];
    if (slot) {
      throw InputError("rank matrix: duplicate record for run " + std::to_string(r.run_id) +
                       ", method " + r.method);
    }
    slot = r.test_mse;
  }
  for (auto& [run, row] : runs) {
    row.resize(m.methods.size());
    std::vector<double> mses;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j]) {
        throw InputError("rank matrix: run " + std::to_string(run) + " has no record for " +
                         m.methods[j]);
      }
      mses.push_back(*row[j]);
    }
    m.run_ids.push_back(run);
    m.ranks.push_back(rank_methods(mses));
  }
  return m;
}

double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

FriedmanResult friedman_test(const RankMatrix& ranks) {
  const std::size_t k = ranks.method_count();
  const std::size_t n = ranks.runs();
  if (k < 2) throw InputError("friedman: need at least 2 methods");
  if (n < 2) throw InputError("friedman: need at least 2 runs");
  FriedmanResult out;
  out.df = static_cast<int>(k) - 1;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);

  double ties = 0.0;
  for (const auto& row : ranks.ranks) {
    if (row.size() != k) throw InputError("friedman: ragged rank matrix");
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i;
      while (j + 1 < k && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      ties += t * t * t - t;
      i = j + 1;
    }
  }
  const double correction = 1.0 - ties / (nd * kd * (kd * kd - 1.0));
  if (correction <= 1e-12) return out;

  double ss = 0.0;
  for (double r : ranks.mean_ranks()) {
    const double d = r - (kd + 1.0) / 2.0;
    ss += d * d;
  }
  out.statistic = 12.0 * nd / (kd * (kd + 1.0)) * ss / correction;
  out.p_value = chi2_sf(out.statistic, static_cast<double>(out.df));
  return out;
}

double studentized_range_cdf(double q, int k) {
  if (k < 2) throw InputError("studentized range: k must be >= 2");
  if (q <= 0.0) return 0.0;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  auto integrand = [&](double z) {
    const double inner = Phi(z) - Phi(z - q);
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) * std::pow(inner, k - 1);
  };
  using boost::math::quadrature::gauss_kronrod;
  const double v = gauss_kronrod<double, 61>::integrate(integrand, -12.0, 12.0 + q, 15, 1e-14);
  return std::clamp(static_cast<double>(k) * v, 0.0, 1.0);
}

namespace {

// Studentized range quantiles (infinite df) divided by sqrt(2), k = 2..20.
constexpr std::array<double, 19> kQ05 = {
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878,
    3.101730, 3.163684, 3.218654, 3.268004, 3.312739, 3.353618, 3.391230,
    3.426041, 3.458425, 3.488685, 3.517073, 3.543799};
constexpr std::array<double, 19> kQ10 = {
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884,
    2.854606, 2.919889, 2.977768, 3.029694, 3.076733, 3.119693, 3.159199,
    3.195743, 3.229723, 3.261461, 3.291224, 3.319233};

}  // namespace

double nemenyi_q(int k, double alpha) {
  if (k < 2 || k > 20) throw InputError("nemenyi: k must lie in 2..20");
  const auto i = static_cast<std::size_t>(k - 2);
  if (std::abs(alpha - 0.05) < 1e-12) return kQ05[i];
  if (std::abs(alpha - 0.10) < 1e-12) return kQ10[i];
  throw InputError("nemenyi: alpha must be 0.05 or 0.10");
}

double nemenyi_cd(int k, int n, double alpha) {
  if (n < 1) throw InputError("nemenyi: n must be >= 1");
  const double kd = k;
  return nemenyi_q(k, alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

std::string significance_band(double p) {
  if (p < 0.001) return "<0.001";
  if (p < 0.01) return "<0.01";
  if (p < 0.05) return "<0.05";
  return "NS";
}

PosthocResult posthoc_pairwise(const RankMatrix& ranks) {
  const std::size_t k = ranks.method_count();
  if (k < 2) throw InputError("post-hoc: need at least 2 methods");
  if (ranks.runs() < 1) throw InputError("post-hoc: no runs");
  const auto mean = ranks.mean_ranks();
  const double kd = static_cast<double>(k);
  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(ranks.runs())));
  PosthocResult out;
  out.methods = ranks.methods;
  out.p_values.assign(k, std::vector<double>(k, 1.0));
  out.bands.assign(k, std::vector<std::string>(k, "NS"));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double q = std::abs(mean[i] - mean[j]) / se * std::sqrt(2.0);
      const double p = std::clamp(1.0 - studentized_range_cdf(q, static_cast<int>(k)), 0.0, 1.0);
      out.p_values[i][j] = out.p_values[j][i] = p;
      out.bands[i][j] = out.bands[j][i] = significance_band(p);
    }
  }
  return out;
}

std::vector<FirstPlace> first_place_table(const RankMatrix& ranks) {
  std::vector<FirstPlace> out(ranks.method_count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].method = ranks.methods[j];
    out[j].min_rank = std::numeric_limits<double>::infinity();
    out[j].max_rank = -std::numeric_limits<double>::infinity();
  }
  for (const auto& row : ranks.ranks) {
    const double best = *std::min_element(row.begin(), row.end());
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == best) ++out[j].firsts;
      out[j].min_rank = std::min(out[j].min_rank, row[j]);
      out[j].max_rank = std::max(out[j].max_rank, row[j]);
    }
  }
  return out;
}

std::string format_p_value(double p) {
  if (p < 1e-300) return "<1e-300";
  std::ostringstream out;
  out.precision(6);
  out << p;
  return out.str();
}

}  // namespace cfr
