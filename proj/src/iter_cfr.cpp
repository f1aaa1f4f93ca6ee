#include "cfr/iter_cfr.hpp"

namespace cfr {

IterCfrResult fit_iter_cfr(const Dataset& data, const MAConfig& config, std::size_t max_depth) {
  IterCfrResult result;
  MAConfig cfg = config;
  result.model = evolve(data, 0, std::nullopt, cfg);
  double previous = mean_squared_error(result.model, data);
  result.history.push_back({0, previous, true});

  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    cfg.seed = config.seed + depth;
    auto candidate = evolve(data, depth, result.model, cfg);
    const double mse = mean_squared_error(candidate, data);
    if (!(mse < previous)) {
      result.history.push_back({depth, mse, false});
      break;
    }
    result.history.push_back({depth, mse, true});
    result.model = std::move(candidate);
    previous = mse;
  }
  return result;
}

}  // namespace cfr
