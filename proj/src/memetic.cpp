#include "cfr/memetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cfr/errors.hpp"

namespace cfr {

void MAConfig::validate() const {
  if (generations < 1) throw InputError("memetic: generations must be >= 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw InputError("memetic: mutation rate must lie in [0, 1]");
  }
  if (!(delta >= 0.0)) throw InputError("memetic: delta must be >= 0");
  if (root_stagnation_reset < 1) throw InputError("memetic: root reset must be >= 1");
  if (tree_depth < 1 || tree_depth > 8) throw InputError("memetic: tree depth must be in 1..8");
  local_search.validate();
}

std::size_t MAConfig::agent_count() const {
  std::size_t n = 0;
  std::size_t level = 1;
  for (int l = 0; l < tree_depth; ++l, level *= 3) n += level;
  return n;
}

bool Agent::update_pocket() {
  if (current.fitness < pocket.fitness) {
    std::swap(current, pocket);
    return true;
  }
  return false;
}

double fitness_from_mse(double mse, const ContinuedFractionModel& model, double delta) {
  if (std::isnan(mse)) return std::numeric_limits<double>::infinity();
  if (delta == 0.0 || model.feature_count() == 0) return mse;
  const double used = static_cast<double>(model.active_features().size()) /
                      static_cast<double>(model.feature_count());
  return mse * (1.0 + delta * used);
}

double fitness(const ContinuedFractionModel& model, const Dataset& data, double delta) {
  if (delta < 0.0) throw InputError("fitness: delta must be >= 0");
  return fitness_from_mse(mean_squared_error(model, data), model, delta);
}

namespace {

class Search {
 public:
  Search(const Dataset& data, std::size_t depth, const MAConfig& config)
      : data_(data), depth_(depth), config_(config), rng_(config.seed) {
    const auto& y = data.targets();
    target_mean_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - target_mean_) * (v - target_mean_);
    target_sd_ = std::sqrt(var / static_cast<double>(y.size()));
    if (!(target_sd_ > 0.0)) target_sd_ = 1.0;
    coeff_scale_.assign(data.cols(), 1.0);
    for (std::size_t j = 0; j < data.cols(); ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < data.rows(); ++i) m = std::max(m, std::abs(data.at(i, j)));
      coeff_scale_[j] = m > 0.0 ? 1.0 / m : 1.0;
    }
  }

  Solution score(ContinuedFractionModel model) const {
    Solution s;
    s.mse = mean_squared_error(model, data_);
    if (std::isnan(s.mse)) s.mse = std::numeric_limits<double>::infinity();
    s.fitness = fitness_from_mse(s.mse, model, config_.delta);
    s.model = std::move(model);
    return s;
  }

  ContinuedFractionModel random_model() {
    const std::size_t p = data_.cols();
    auto model = ContinuedFractionModel::zeros(data_.feature_names(), depth_);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double keep = p == 0 ? 0.0 : std::min(1.0, 3.0 / static_cast<double>(p));
    std::bernoulli_distribution pick(keep);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p; ++j) {
      if (pick(rng_)) active.push_back(j);
    }
    for (std::size_t pos = 0; pos < model.term_count(); ++pos) {
      const bool numerator = pos % 2 == 1;
      double constant = normal(rng_);
      if (pos == 0) constant = target_mean_;
      if (numerator) constant *= target_sd_;
      model.set_constant(pos, constant);
      for (std::size_t j : active) model.set_coefficient(pos, j, normal(rng_) * coeff_scale_[j]);
    }
    return model;
  }

  void mutate(ContinuedFractionModel& model, double rate) {
    std::bernoulli_distribution hit(rate);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t pos = 0; pos < model.term_count(); ++pos) {
      if (!hit(rng_)) continue;
      const auto& active = model.active_features();
      if (model.feature_count() == 0 || coin(rng_)) {
        std::uniform_int_distribution<std::size_t> which(0, active.size());
        const std::size_t k = which(rng_);
        if (k == active.size()) {
          const double c = model.term(pos).constant;
          model.set_constant(pos, c + 0.5 * std::max(std::abs(c), 0.1) * normal(rng_));
        } else {
          const std::size_t j = active[k];
          const double c = model.term(pos).coeffs[j];
          const double base = 0.1 * coeff_scale_[j];
          model.set_coefficient(pos, j, c + 0.5 * std::max(std::abs(c), base) * normal(rng_));
        }
      } else {
        std::uniform_int_distribution<std::size_t> which(0, model.feature_count() - 1);
        const std::size_t j = which(rng_);
        if (model.is_active(j)) {
          model.set_active(j, false);
        } else {
          model.set_coefficient(pos, j, 0.1 * coeff_scale_[j] * normal(rng_));
        }
      }
    }
  }

  ContinuedFractionModel recombine(const ContinuedFractionModel& parent,
                                   const ContinuedFractionModel& child) {
    std::bernoulli_distribution coin(0.5);
    const std::size_t p = child.feature_count();
    std::vector<bool> mask(p, false);
    for (std::size_t j = 0; j < p; ++j) {
      const bool a = parent.is_active(j);
      const bool b = child.is_active(j);
      mask[j] = (a && b) || ((a || b) && coin(rng_));
    }
    std::vector<LinearTerm> g;
    std::vector<LinearTerm> h;
    for (std::size_t pos = 0; pos < child.term_count(); ++pos) {
      LinearTerm t = coin(rng_) ? parent.term(pos) : child.term(pos);
      for (std::size_t j = 0; j < p; ++j) {
        if (!mask[j]) t.coeffs[j] = 0.0;
      }
      (pos % 2 == 0 ? g : h).push_back(std::move(t));
    }
    return ContinuedFractionModel(child.feature_names(), std::move(g), std::move(h),
                                  std::move(mask));
  }

  void local_search(Solution& s) {
    const std::uint64_t seed = rng_();
    if (!std::isfinite(s.fitness)) return;
    ContinuedFractionModel work = s.model;
    const double delta = config_.delta;
    auto objective = [&](std::span<const double> params) {
      work.set_free_parameters(params);
      return fitness_from_mse(mean_squared_error(work, data_), work, delta);
    };
    const auto start = s.model.free_parameters();
    const auto result = minimize(objective, start, config_.local_search, seed);
    if (result.value < s.fitness) {
      s.model.set_free_parameters(result.argmin);
      s = score(std::move(s.model));
    }
  }

 private:
  const Dataset& data_;
  std::size_t depth_;
  const MAConfig& config_;
  std::mt19937_64 rng_;
  double target_mean_ = 0.0;
  double target_sd_ = 1.0;
  std::vector<double> coeff_scale_;

};

}  // namespace

ContinuedFractionModel evolve(const Dataset& data, std::size_t depth,
                              const std::optional<ContinuedFractionModel>& init,
                              const MAConfig& config, EvolveTrace* trace) {
  config.validate();
  if (data.empty()) throw InputError("evolve: empty dataset");
  if (init) {
    if (init->depth() > depth) throw InputError("evolve: initial model is deeper than target");
    if (init->feature_names() != data.feature_names()) {
      throw InputError("evolve: initial model features differ from dataset");
    }
  }

  Search search(data, depth, config);
  const std::size_t n = config.agent_count();
  std::vector<Agent> agents(n);

  for (std::size_t i = 0; i < n; ++i) {
    ContinuedFractionModel m;
    if (init) {
      m = init->extended(depth);
      if (i > 0) search.mutate(m, 1.0);
    } else {
      m = search.random_model();
    }
    agents[i].current = search.score(std::move(m));
    agents[i].pocket = agents[i].current;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : agents) best = std::min(best, a.pocket.fitness);
  int stalled = 0;
  bool reset_root = false;

  for (int gen = 0; gen < config.generations; ++gen) {
    if (gen > 0) {
      for (std::size_t i = 1; i < n; ++i) {
        const std::size_t parent = (i - 1) / 3;
        auto child = search.recombine(agents[parent].pocket.model, agents[i].pocket.model);
        search.mutate(child, config.mutation_rate);
        agents[i].current = search.score(std::move(child));
      }
      if (reset_root) {
        agents[0].current = search.score(search.random_model());
        reset_root = false;
      } else {
        auto root = agents[0].current.model;
        search.mutate(root, config.mutation_rate);
        agents[0].current = search.score(std::move(root));
      }
    }

    for (auto& agent : agents) {
      search.local_search(agent.current);
      agent.update_pocket();
    }

    for (std::size_t i = n; i-- > 1;) {
      const std::size_t parent = (i - 1) / 3;
      if (agents[i].pocket.fitness < agents[parent].pocket.fitness) {
        std::swap(agents[i].pocket, agents[parent].pocket);
        agents[i].update_pocket();
      }
    }

    if (agents[0].pocket.fitness < best) {
      best = agents[0].pocket.fitness;
      stalled = 0;
    } else if (++stalled >= config.root_stagnation_reset) {
      reset_root = true;
      stalled = 0;
      if (trace) ++trace->root_resets;
    }
    if (trace) trace->best_fitness.push_back(agents[0].pocket.fitness);
  }
  return agents[0].pocket.model;
}

}  // namespace cfr
