#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfr/dataset.hpp"

namespace cfr {

/// Denominators closer to zero than this are clamped (keeping sign) and counted.
inline constexpr double kDenominatorGuard = 1e-12;

/// a^T x + alpha
struct LinearTerm {
  std::vector<double> coeffs;
  double constant = 0.0;

  bool operator==(const LinearTerm&) const = default;
};

/// f(x) = g0(x) + h0(x) / (g1(x) + h1(x) / (g2(x) + ...)) truncated at `depth`,
/// with every g_i and h_i linear in the features.
///
/// A feature switched off in the active mask has a zero coefficient in every
/// term; the mutators keep that invariant. Copies are independent values, so a
/// const model can be evaluated from many threads.
class ContinuedFractionModel {
 public:
  ContinuedFractionModel() = default;
  ContinuedFractionModel(std::vector<std::string> feature_names, std::vector<LinearTerm> g_terms,
                         std::vector<LinearTerm> h_terms, std::vector<bool> active_mask);
  /// Mask derived from the nonzero coefficients.
  ContinuedFractionModel(std::vector<std::string> feature_names, std::vector<LinearTerm> g_terms,
                         std::vector<LinearTerm> h_terms);

  /// All-zero model of the given depth with every feature inactive.
  static ContinuedFractionModel zeros(std::vector<std::string> feature_names, std::size_t depth);

  std::size_t depth() const noexcept { return h_.size(); }
  std::size_t feature_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<LinearTerm>& g_terms() const noexcept { return g_; }
  const std::vector<LinearTerm>& h_terms() const noexcept { return h_; }
  const std::vector<bool>& active_mask() const noexcept { return mask_; }
  const std::vector<std::size_t>& active_features() const noexcept { return active_; }
  bool is_active(std::size_t feature) const { return mask_.at(feature); }

  /// Number of terms in nesting order g0, h0, g1, h1, ..., g_depth.
  std::size_t term_count() const noexcept { return g_.size() + h_.size(); }
  /// Term by nesting position: even positions are g terms, odd are h terms.
  const LinearTerm& term(std::size_t position) const;
  void set_constant(std::size_t position, double value);
  /// Setting a coefficient of an inactive feature activates it.
  void set_coefficient(std::size_t position, std::size_t feature, double value);
  /// Deactivating zeroes the feature's coefficient in every term.
  void set_active(std::size_t feature, bool active);

  /// Point evaluation, innermost level first. `undefined` (if given) is
  /// incremented once per clamped denominator.
  double evaluate(std::span<const double> x, std::size_t* undefined = nullptr) const;

  /// The same function expressed at `new_depth` >= depth(): every added level
  /// has g = 1 and h = 0.
  ContinuedFractionModel extended(std::size_t new_depth) const;

  /// Constants and active coefficients of every term, in nesting order; each
  /// term contributes its constant followed by its active coefficients.
  std::vector<double> free_parameters() const;
  std::size_t free_parameter_count() const noexcept;
  void set_free_parameters(std::span<const double> params);

  bool operator==(const ContinuedFractionModel& other) const;

 private:
  void validate_and_index();
  LinearTerm& term_mut(std::size_t position);

  std::vector<std::string> names_;
  std::vector<LinearTerm> g_;
  std::vector<LinearTerm> h_;
  std::vector<bool> mask_;
  std::vector<std::size_t> active_;
};

struct EvalReport {
  std::vector<double> predictions;
  double mse = 0.0;
  std::size_t undefined_count = 0;
};

EvalReport evaluate_dataset(const ContinuedFractionModel& model, const Dataset& data);
/// MSE without materialising predictions.
double mean_squared_error(const ContinuedFractionModel& model, const Dataset& data,
                          std::size_t* undefined = nullptr);

/// JSON model document: depth, feature names, active mask and every term.
std::string model_to_json(const ContinuedFractionModel& model);
ContinuedFractionModel model_from_json(const std::string& document);

/// Human-readable g_i/h_i listing.
std::string model_to_text(const ContinuedFractionModel& model);

}  // namespace cfr
