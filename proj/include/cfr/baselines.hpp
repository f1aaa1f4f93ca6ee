#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cfr/cf_model.hpp"
#include "cfr/dataset.hpp"
#include "cfr/stats.hpp"

namespace cfr {

struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> coeffs;
  double intercept = 0.0;
  /// Set when the design was rank deficient and a 1e-10 ridge was added.
  bool ridge_fallback = false;

  double predict(std::span<const double> x) const;
  /// The same predictor as a depth-0 continued fraction.
  ContinuedFractionModel as_cf_model() const;
};

/// Least squares with intercept via column-pivoting Householder QR.
LinearModel ols_fit(const Dataset& data);

LinearModel lasso_model(const Dataset& data, double lambda);

double mean_squared_error(const LinearModel& model, const Dataset& data);

/// One external prediction, remembering the CSV line it came from.
struct Prediction {
  double value = 0.0;
  std::size_t line = 0;
};

struct RunPredictions {
  std::map<std::string, Prediction> train;
  std::map<std::string, Prediction> test;
};

/// Predictions of one externally trained method, keyed by run id.
struct ImportedPredictions {
  std::string method;
  std::map<int, RunPredictions> runs;
};

/// Parses the prediction CSV `run_id,sample_id,prediction,split` with split in
/// {train, test}. Duplicate (run, sample) keys, empty fields and unknown splits
/// raise SchemaError naming the row.
ImportedPredictions parse_predictions_csv(const std::string& text, const std::string& method);
ImportedPredictions import_predictions(const std::string& path, const std::string& method);
std::string format_predictions_csv(const ImportedPredictions& predictions);

/// Scores imported predictions against the dataset targets. A run with no
/// train rows gets no train MSE. Unknown sample ids raise SchemaError.
std::vector<RunRecord> score_predictions(const ImportedPredictions& predictions,
                                         const Dataset& data);

}  // namespace cfr
