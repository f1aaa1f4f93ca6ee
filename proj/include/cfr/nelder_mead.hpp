#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cfr {

struct SimplexConfig {
  int restarts = 4;
  int max_iters_per_restart = 250;
  /// A restart begins after this many consecutive iterations that fail to
  /// improve the best vertex.
  int stagnation_reset = 10;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;

  void validate() const;
};

struct SimplexResult {
  std::vector<double> argmin;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  /// Incumbent value after each restart (non-increasing).
  std::vector<double> restart_best;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimisation with restarts around the incumbent.
///
/// The first simplex uses per-coordinate steps max(0.05*|x_i|, 0.1); later
/// restarts scale each step by a random factor in +-[0.5, 1.5]. NaN objective
/// values are treated as +inf. Throws InputError if the objective is not
/// finite at `start`.
SimplexResult minimize(const Objective& objective, std::span<const double> start,
                       const SimplexConfig& config, std::uint64_t seed);

}  // namespace cfr
