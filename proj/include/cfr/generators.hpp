#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cfr/dataset.hpp"

namespace cfr {

/// y = 1 + sin(x)/x (2 at x = 0) plus N(0, noise_sd^2) on n equally spaced
/// points of [lo, hi]; features are x and x^2.
Dataset make_sinc(std::size_t n = 500, double lo = -10.0, double hi = 10.0,
                  double noise_sd = 0.1, std::uint64_t seed = 0);

struct SparseLinear {
  Dataset data;
  std::vector<double> beta;  // true coefficients, k nonzero
  double intercept = 0.0;
};

/// X ~ U(0, 10), y = X beta + intercept + N(0, noise_sd^2); the k informative
/// coefficients are +-U(1, 3) on randomly chosen columns.
SparseLinear make_sparse_linear(std::size_t n, std::size_t p, std::size_t k_informative,
                                double noise_sd, std::uint64_t seed);

}  // namespace cfr
