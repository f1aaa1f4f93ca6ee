#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cfr/cf_model.hpp"
#include "cfr/dataset.hpp"
#include "cfr/nelder_mead.hpp"

namespace cfr {

struct MAConfig {
  int generations = 200;
  double mutation_rate = 0.10;
  /// Complexity surcharge in the fitness (see fitness()).
  double delta = 0.10;
  /// Generations without improvement of the best pocket before the root's
  /// current solution is re-randomised.
  int root_stagnation_reset = 5;
  /// Levels of the ternary population tree; 3 gives 1 + 3 + 9 = 13 agents.
  int tree_depth = 3;
  std::uint64_t seed = 0;
  SimplexConfig local_search{};

  void validate() const;
  std::size_t agent_count() const;
};

/// A scored model.
struct Solution {
  ContinuedFractionModel model;
  double fitness = 0.0;
  double mse = 0.0;
};

/// Pocket holds the agent's best-ever solution, current its working one.
struct Agent {
  Solution pocket;
  Solution current;

  /// Restores pocket.fitness <= current.fitness by swapping; true if swapped.
  bool update_pocket();
};

/// mse * (1 + delta * v) where v is the fraction of features the model uses.
double fitness(const ContinuedFractionModel& model, const Dataset& data, double delta);
double fitness_from_mse(double mse, const ContinuedFractionModel& model, double delta);

struct EvolveTrace {
  /// Best pocket fitness after each generation.
  std::vector<double> best_fitness;
  std::size_t root_resets = 0;
};

/// Memetic search over coefficients and feature masks at a fixed depth.
///
/// Agents live in a complete ternary tree. Every generation each non-root
/// agent's current solution is recombined from its parent's pocket and its
/// own pocket, all currents are mutated and locally refined with Nelder-Mead
/// (serially), pockets are updated and better pockets bubble towards the root.
/// The root's current is re-randomised after `root_stagnation_reset`
/// generations without improvement. Returns the root pocket's model.
///
/// `init`, when given, must not be deeper than `depth`; it is extended with
/// neutral levels and seeds the population.
ContinuedFractionModel evolve(const Dataset& data, std::size_t depth,
                              const std::optional<ContinuedFractionModel>& init,
                              const MAConfig& config, EvolveTrace* trace = nullptr);

}  // namespace cfr
