#include "cfr/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cfr/errors.hpp"

namespace cfr {

void SimplexConfig::validate() const {
  if (restarts < 1) throw InputError("simplex: restarts must be >= 1");
  if (max_iters_per_restart < 1) throw InputError("simplex: max iterations must be >= 1");
  if (stagnation_reset < 1) throw InputError("simplex: stagnation reset must be >= 1");
  if (!(reflection > 0.0)) throw InputError("simplex: reflection must be > 0");
  if (!(expansion > 1.0)) throw InputError("simplex: expansion must be > 1");
  if (!(contraction > 0.0 && contraction < 1.0)) throw InputError("simplex: contraction not in (0,1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("simplex: shrink not in (0,1)");
}

namespace {

class Simplex {
 public:
  Simplex(const Objective& f, std::size_t n, std::size_t& evals)
      : f_(f), n_(n), evals_(evals), points_(n + 1, std::vector<double>(n)), values_(n + 1) {}

  double eval(std::span<const double> x) {
    ++evals_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }

  void init(const std::vector<double>& base, double base_value, std::span<const double> steps) {
    points_[0] = base;
    values_[0] = base_value;
    for (std::size_t i = 0; i < n_; ++i) {
      points_[i + 1] = base;
      points_[i + 1][i] += steps[i];
      values_[i + 1] = eval(points_[i + 1]);
    }
    order();
  }

  // One Nelder-Mead iteration; vertices stay sorted by value afterwards.
  void step(const SimplexConfig& c) {
    const std::size_t worst = n_;
    centroid_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) centroid_[j] += points_[i][j];
    }
    for (double& v : centroid_) v /= static_cast<double>(n_);

    auto along = [&](double t, std::vector<double>& out) {
      out.resize(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        out[j] = centroid_[j] + t * (points_[worst][j] - centroid_[j]);
      }
    };

    along(-c.reflection, reflected_);
    const double fr = eval(reflected_);
    if (fr < values_[0]) {
      along(-c.reflection * c.expansion, trial_);
      const double fe = eval(trial_);
      if (fe < fr) {
        replace_worst(trial_, fe);
      } else {
        replace_worst(reflected_, fr);
      }
    } else if (fr < values_[n_ - 1]) {
      replace_worst(reflected_, fr);
    } else {
      const bool outside = fr < values_[worst];
      along(outside ? -c.reflection * c.contraction : c.contraction, trial_);
      const double fc = eval(trial_);
      if (outside ? fc <= fr : fc < values_[worst]) {
        replace_worst(trial_, fc);
      } else {
        for (std::size_t i = 1; i <= n_; ++i) {
          for (std::size_t j = 0; j < n_; ++j) {
            points_[i][j] = points_[0][j] + c.shrink * (points_[i][j] - points_[0][j]);
          }
          values_[i] = eval(points_[i]);
        }
      }
    }
    order();
  }

  const std::vector<double>& best() const { return points_[0]; }
  double best_value() const { return values_[0]; }

 private:
  void replace_worst(const std::vector<double>& x, double v) {
    points_[n_] = x;
    values_[n_] = v;
  }

  void order() {
    std::vector<std::size_t> idx(n_ + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
    std::vector<std::vector<double>> p(n_ + 1);
    std::vector<double> v(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) {
      p[i] = std::move(points_[idx[i]]);
      v[i] = values_[idx[i]];
    }
    points_ = std::move(p);
    values_ = std::move(v);
  }

  const Objective& f_;
  std::size_t n_;
  std::size_t& evals_;
  std::vector<std::vector<double>> points_;
  std::vector<double> values_;
  std::vector<double> centroid_, reflected_, trial_;
};

}  // namespace

SimplexResult minimize(const Objective& objective, std::span<const double> start,
                       const SimplexConfig& config, std::uint64_t seed) {
  config.validate();
  for (double v : start) {
    if (!std::isfinite(v)) throw InputError("simplex: non-finite start point");
  }
  SimplexResult result;
  result.argmin.assign(start.begin(), start.end());
  result.value = objective(result.argmin);
  result.evaluations = 1;
  if (!std::isfinite(result.value)) throw InputError("simplex: objective not finite at start");

  const std::size_t n = start.size();
  if (n == 0) {
    result.restart_best.assign(static_cast<std::size_t>(config.restarts), result.value);
    return result;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::bernoulli_distribution flip(0.5);
  std::vector<double> steps(n);

  for (int r = 0; r < config.restarts; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      steps[i] = std::max(0.05 * std::abs(result.argmin[i]), 0.1);
      if (r > 0) steps[i] *= (flip(rng) ? -1.0 : 1.0) * scale(rng);
    }
    Simplex simplex(objective, n, result.evaluations);
    simplex.init(result.argmin, result.value, steps);

    double best = simplex.best_value();
    int stalled = 0;
    for (int it = 0; it < config.max_iters_per_restart; ++it) {
      simplex.step(config);
      ++result.iterations;
      if (simplex.best_value() < best) {
        best = simplex.best_value();
        stalled = 0;
      } else if (++stalled >= config.stagnation_reset) {
        break;
      }
    }
    if (simplex.best_value() < result.value) {
      result.value = simplex.best_value();
      result.argmin = simplex.best();
    }
    result.restart_best.push_back(result.value);
  }
  return result;
}

}  // namespace cfr
