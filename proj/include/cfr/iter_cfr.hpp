#pragma once

#include <cstddef>
#include <vector>

#include "cfr/cf_model.hpp"
#include "cfr/dataset.hpp"
#include "cfr/memetic.hpp"

namespace cfr {

struct DepthRecord {
  std::size_t depth = 0;
  double train_mse = 0.0;
  bool accepted = true;
};

struct IterCfrResult {
  ContinuedFractionModel model;
  /// Ordered by depth; a rejected depth, if any, is the last entry.
  std::vector<DepthRecord> history;
};

inline constexpr std::size_t kDefaultMaxDepth = 5;

/// Grows the depth from 0, warm-starting each depth from the previous model,
/// and stops at the first depth whose training MSE is not strictly lower.
/// Depth d runs with seed config.seed + d.
IterCfrResult fit_iter_cfr(const Dataset& data, const MAConfig& config,
                           std::size_t max_depth = kDefaultMaxDepth);

}  // namespace cfr
