#include "cfr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cfr/errors.hpp"

namespace cfr {

Dataset make_sinc(std::size_t n, double lo, double hi, double noise_sd, std::uint64_t seed) {
  if (n < 2) throw InputError("sinc: need at least 2 points");
  if (!(hi > lo)) throw InputError("sinc: empty interval");
  if (!(noise_sd >= 0.0)) throw InputError("sinc: negative noise");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::string> ids(n);
  std::vector<double> values;
  std::vector<double> y(n);
  values.reserve(2 * n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? hi : lo + step * static_cast<double>(i);
    ids[i] = "s" + std::to_string(i);
    values.push_back(x);
    values.push_back(x * x);
    const double clean = x == 0.0 ? 2.0 : 1.0 + std::sin(x) / x;
    y[i] = clean + noise_sd * noise(rng);
  }
  return Dataset(std::move(ids), {"x", "x2"}, std::move(values), std::move(y));
}

SparseLinear make_sparse_linear(std::size_t n, std::size_t p, std::size_t k_informative,
                                double noise_sd, std::uint64_t seed) {
  if (n == 0 || p == 0) throw InputError("sparse linear: empty shape");
  if (k_informative > p) throw InputError("sparse linear: more informative features than features");
  if (!(noise_sd >= 0.0)) throw InputError("sparse linear: negative noise");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> feature(0.0, 10.0);
  std::uniform_real_distribution<double> magnitude(1.0, 3.0);
  std::bernoulli_distribution sign(0.5);
  std::normal_distribution<double> noise(0.0, 1.0);

  SparseLinear out;
  out.beta.assign(p, 0.0);
  std::vector<std::size_t> cols(p);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  for (std::size_t k = 0; k < k_informative; ++k) {
    out.beta[cols[k]] = (sign(rng) ? -1.0 : 1.0) * magnitude(rng);
  }
  out.intercept = 5.0;

  std::vector<std::string> ids(n);
  std::vector<std::string> names(p);
  for (std::size_t j = 0; j < p; ++j) names[j] = "f" + std::to_string(j);
  std::vector<double> values(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "s" + std::to_string(i);
    double t = out.intercept;
    for (std::size_t j = 0; j < p; ++j) {
      values[i * p + j] = feature(rng);
      t += out.beta[j] * values[i * p + j];
    }
    y[i] = t + noise_sd * noise(rng);
  }
  out.data = Dataset(std::move(ids), std::move(names), std::move(values), std::move(y));
  return out;
}

}  // namespace cfr
