#include "cfr/baselines.hpp"

#include <Eigen/Dense>
#include <sstream>
#include <unordered_map>

#include "cfr/errors.hpp"
#include "cfr/features.hpp"
#include "csv.hpp"

namespace cfr {

double LinearModel::predict(std::span<const double> x) const {
  if (x.size() != coeffs.size()) throw InputError("linear model: feature count mismatch");
  double v = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) v += coeffs[j] * x[j];
  return v;
}

ContinuedFractionModel LinearModel::as_cf_model() const {
  return ContinuedFractionModel(feature_names, {LinearTerm{coeffs, intercept}}, {});
}

LinearModel ols_fit(const Dataset& data) {
  if (data.empty()) throw InputError("ols: empty dataset");
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto p = static_cast<Eigen::Index>(data.cols());
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j + 1) = data.at(i, j);
    y(i) = data.targets()[i];
  }

  LinearModel out;
  out.feature_names = data.feature_names();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd w;
  if (qr.rank() == p + 1) {
    w = qr.solve(y);
  } else {
    // Centre so the ridge leaves the intercept unpenalised.
    const Eigen::RowVectorXd means = a.rightCols(p).colwise().mean();
    const Eigen::MatrixXd xc = a.rightCols(p).rowwise() - means;
    const double y_mean = y.mean();
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += 1e-10;
    const Eigen::VectorXd beta = gram.ldlt().solve(xc.transpose() * (y.array() - y_mean).matrix());
    w.resize(p + 1);
    w(0) = y_mean - means.dot(beta);
    w.tail(p) = beta;
    out.ridge_fallback = true;
  }
  out.intercept = w(0);
  out.coeffs.assign(w.data() + 1, w.data() + w.size());
  return out;
}

LinearModel lasso_model(const Dataset& data, double lambda) {
  const auto fit = lasso_fit(data, lambda);
  LinearModel out;
  out.feature_names = data.feature_names();
  out.coeffs = fit.beta;
  out.intercept = fit.intercept;
  return out;
}

double mean_squared_error(const LinearModel& model, const Dataset& data) {
  if (data.empty()) throw InputError("mse: empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double r = model.predict(data.row(i)) - data.targets()[i];
    sum += r * r;
  }
  return sum / static_cast<double>(data.rows());
}

ImportedPredictions parse_predictions_csv(const std::string& text, const std::string& method) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty()) throw SchemaError("empty prediction file", 1);
  const std::vector<std::string> header = {"run_id", "sample_id", "prediction", "split"};
  if (rows.front().fields != header) {
    throw SchemaError("header must be 'run_id,sample_id,prediction,split'", rows.front().line);
  }
  ImportedPredictions out;
  out.method = method;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 4) throw SchemaError("expected 4 fields", row.line);
    const auto run = detail::parse_integer(row.fields[0], row.line, "run_id");
    const std::string& sample = row.fields[1];
    if (sample.empty()) throw SchemaError("missing sample_id", row.line);
    const double value = detail::parse_real(row.fields[2], row.line, "prediction");
    const std::string& split = row.fields[3];
    if (split != "train" && split != "test") {
      throw SchemaError("unknown split '" + split + "'", row.line);
    }
    auto& run_preds = out.runs[static_cast<int>(run)];
    if (run_preds.train.count(sample) || run_preds.test.count(sample)) {
      throw SchemaError("duplicate prediction for run " + std::to_string(run) + ", sample '" +
                            sample + "'",
                        row.line);
    }
    (split == "train" ? run_preds.train : run_preds.test)[sample] = Prediction{value, row.line};
  }
  return out;
}

ImportedPredictions import_predictions(const std::string& path, const std::string& method) {
  return parse_predictions_csv(detail::read_file(path), method);
}

std::string format_predictions_csv(const ImportedPredictions& predictions) {
  std::ostringstream out;
  out << "run_id,sample_id,prediction,split\n";
  for (const auto& [run, preds] : predictions.runs) {
    for (const auto& [sample, p] : preds.train) {
      out << run << ',' << detail::csv_escape(sample) << ',' << format_double(p.value) << ",train\n";
    }
    for (const auto& [sample, p] : preds.test) {
      out << run << ',' << detail::csv_escape(sample) << ',' << format_double(p.value) << ",test\n";
    }
  }
  return out.str();
}

std::vector<RunRecord> score_predictions(const ImportedPredictions& predictions,
                                         const Dataset& data) {
  std::unordered_map<std::string, double> truth;
  for (std::size_t i = 0; i < data.rows(); ++i) truth[data.sample_ids()[i]] = data.targets()[i];

  auto mse = [&](const std::map<std::string, Prediction>& preds) {
    double sum = 0.0;
    for (const auto& [sample, p] : preds) {
      auto it = truth.find(sample);
      if (it == truth.end()) throw SchemaError("unknown sample '" + sample + "'", p.line);
      const double r = p.value - it->second;
      sum += r * r;
    }
    return sum / static_cast<double>(preds.size());
  };

  std::vector<RunRecord> out;
  for (const auto& [run, preds] : predictions.runs) {
    if (preds.test.empty()) {
      throw InputError("predictions for " + predictions.method + ", run " + std::to_string(run) +
                       " have no test rows");
    }
    RunRecord rec;
    rec.run_id = run;
    rec.method = predictions.method;
    if (!preds.train.empty()) rec.train_mse = mse(preds.train);
    rec.test_mse = mse(preds.test);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace cfr
