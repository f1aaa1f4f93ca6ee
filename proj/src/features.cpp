#include "cfr/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cfr/errors.hpp"
#include "csv.hpp"

namespace cfr {

Dataset counts_to_percentages(std::vector<std::string> sample_ids,
                              std::vector<std::string> feature_names,
                              const std::vector<std::vector<long long>>& counts,
                              const std::vector<long long>& totals, std::vector<double> targets) {
  if (counts.size() != totals.size()) throw InputError("percentages: counts/totals row mismatch");
  const std::size_t p = feature_names.size();
  std::vector<double> values;
  values.reserve(counts.size() * p);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != p) throw InputError("percentages: ragged count row");
    if (totals[i] <= 0) {
      throw InputError("percentages: total for row " + std::to_string(i) + " is not positive");
    }
    long long row_sum = 0;
    for (long long c : counts[i]) {
      if (c < 0) throw InputError("percentages: negative count");
      row_sum += c;
    }
    if (row_sum > totals[i]) throw InputError("percentages: counts exceed total tokens");
    for (long long c : counts[i]) {
      values.push_back(100.0 * static_cast<double>(c) / static_cast<double>(totals[i]));
    }
  }
  return Dataset(std::move(sample_ids), std::move(feature_names), std::move(values),
                 std::move(targets));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw InputError("pearson: length mismatch");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

PearsonRanking pearson_rank(const Dataset& data, std::size_t k) {
  if (k > data.cols()) throw InputError("pearson rank: k exceeds feature count");
  PearsonRanking out;
  std::vector<RankedFeature> all;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const double r = pearson(data.column(j), data.targets());
    if (std::isnan(r)) {
      out.warnings.push_back(data.feature_names()[j]);
      continue;
    }
    all.push_back({data.feature_names()[j], j, r});
  }
  std::sort(all.begin(), all.end(), [](const RankedFeature& a, const RankedFeature& b) {
    const double fa = std::abs(a.r), fb = std::abs(b.r);
    if (fa != fb) return fa > fb;
    return a.name < b.name;
  });
  if (all.size() > k) all.resize(k);
  out.top = std::move(all);
  return out;
}

namespace {

struct Centred {
  std::vector<std::vector<double>> cols;  // centred columns
  std::vector<double> means;
  std::vector<double> y;                  // centred target
  double y_mean = 0.0;
};

Centred centre(const Dataset& data) {
  Centred c;
  const std::size_t n = data.rows();
  const auto& y = data.targets();
  c.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  c.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.y[i] = y[i] - c.y_mean;
  c.cols.resize(data.cols());
  c.means.resize(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    auto col = data.column(j);
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    for (double& v : col) v -= m;
    c.means[j] = m;
    c.cols[j] = std::move(col);
  }
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double lasso_lambda_max(const Dataset& data) {
  if (data.empty()) throw InputError("lasso: empty dataset");
  const auto c = centre(data);
  double m = 0.0;
  for (const auto& col : c.cols) m = std::max(m, std::abs(dot(col, c.y)));
  return 2.0 * m;
}

double lasso_objective(const Dataset& data, const std::vector<double>& beta, double intercept,
                       double lambda) {
  double rss = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double pred = intercept;
    const auto row = data.row(i);
    for (std::size_t j = 0; j < beta.size(); ++j) pred += beta[j] * row[j];
    const double r = data.targets()[i] - pred;
    rss += r * r;
  }
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  return rss + lambda * l1;
}

LassoResult lasso_fit(const Dataset& data, double lambda) {
  if (!(lambda >= 0.0)) throw InputError("lasso: lambda must be >= 0");
  if (data.empty()) throw InputError("lasso: empty dataset");
  const auto c = centre(data);
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<double> norms(p);
  for (std::size_t j = 0; j < p; ++j) norms[j] = dot(c.cols[j], c.cols[j]);

  LassoResult out;
  out.lambda = lambda;
  out.beta.assign(p, 0.0);
  std::vector<double> resid = c.y;
  const double half = lambda / 2.0;

  auto centred_objective = [&] {
    double rss = dot(resid, resid);
    double l1 = 0.0;
    for (double b : out.beta) l1 += std::abs(b);
    return rss + lambda * l1;
  };

  constexpr std::size_t kMaxSweeps = 10000;
  constexpr double kTolerance = 1e-8;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (norms[j] == 0.0) continue;
      const double old = out.beta[j];
      const double rho = dot(c.cols[j], resid) + norms[j] * old;
      double updated = 0.0;
      if (rho > half) {
        updated = (rho - half) / norms[j];
      } else if (rho < -half) {
        updated = (rho + half) / norms[j];
      }
      const double diff = updated - old;
      if (diff != 0.0) {
        for (std::size_t i = 0; i < n; ++i) resid[i] -= diff * c.cols[j][i];
        out.beta[j] = updated;
      }
      max_change = std::max(max_change, std::abs(diff));
    }
    out.sweeps = sweep + 1;
    out.objective_trace.push_back(centred_objective());
    if (max_change < kTolerance) break;
  }

  out.intercept = c.y_mean;
  for (std::size_t j = 0; j < p; ++j) {
    out.intercept -= c.means[j] * out.beta[j];
    if (out.beta[j] != 0.0) out.selected.push_back(data.feature_names()[j]);
  }
  return out;
}

SelectionReport lasso_selection_protocol(const Dataset& data, const LassoProtocolConfig& config) {
  if (!(config.subset_frac > 0.0 && config.subset_frac <= 1.0)) {
    throw InputError("lasso protocol: subset fraction must lie in (0, 1]");
  }
  if (config.trials < 1) throw InputError("lasso protocol: trials must be >= 1");
  if (data.empty()) throw InputError("lasso protocol: empty dataset");
  const std::size_t n = data.rows();
  const auto m = static_cast<std::size_t>(
      std::max(1.0, std::round(config.subset_frac * static_cast<double>(n))));
  std::vector<std::size_t> hits(data.cols(), 0);
  std::vector<std::size_t> idx(n);
  for (int t = 0; t < config.trials; ++t) {
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(t));
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto fit = lasso_fit(data.subset(std::span(idx.data(), m)), config.lambda);
    for (std::size_t j = 0; j < fit.beta.size(); ++j) {
      if (fit.beta[j] != 0.0) ++hits[j];
    }
  }

  SelectionReport report;
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < hits.size(); ++j) {
    if (hits[j] > 0) order.push_back(j);
  }
  const auto& names = data.feature_names();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hits[a] != hits[b]) return hits[a] > hits[b];
    return names[a] < names[b];
  });
  const double trials = static_cast<double>(config.trials);
  for (std::size_t j : order) {
    report.appearances.push_back({names[j], 100.0 * static_cast<double>(hits[j]) / trials});
    if (static_cast<double>(hits[j]) >= config.threshold * trials - 1e-9) {
      report.selected.push_back(names[j]);
    }
  }
  return report;
}

std::string format_selection_csv(const SelectionReport& report) {
  std::ostringstream out;
  out << "word,pct\n";
  for (const auto& e : report.appearances) {
    out << detail::csv_escape(e.feature) << ',' << format_double(e.pct) << '\n';
  }
  return out.str();
}

std::vector<DateBin> date_bins(const std::vector<int>& dates) {
  if (dates.empty()) throw InputError("date bins: no dates");
  const auto [lo_it, hi_it] = std::minmax_element(dates.begin(), dates.end());
  const int lo = *lo_it;
  const long long span = static_cast<long long>(*hi_it) - lo + 1;
  const auto bins = static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(dates.size()))));
  const long long width = (span + bins - 1) / bins;
  std::vector<DateBin> out(static_cast<std::size_t>(bins));
  for (long long b = 0; b < bins; ++b) {
    out[b].lo = static_cast<int>(lo + b * width);
    out[b].hi = static_cast<int>(lo + (b + 1) * width - 1);
  }
  for (int d : dates) out[static_cast<std::size_t>((d - lo) / width)].count++;
  return out;
}

}  // namespace cfr
