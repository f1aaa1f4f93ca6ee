#include "cfr/cf_model.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "cfr/errors.hpp"

namespace cfr {

namespace {

inline double apply(const LinearTerm& t, std::span<const double> x,
                    const std::vector<std::size_t>& active) {
  double v = t.constant;
  for (std::size_t j : active) v += t.coeffs[j] * x[j];
  return v;
}

}  // namespace

ContinuedFractionModel::ContinuedFractionModel(std::vector<std::string> feature_names,
                                               std::vector<LinearTerm> g_terms,
                                               std::vector<LinearTerm> h_terms,
                                               std::vector<bool> active_mask)
    : names_(std::move(feature_names)),
      g_(std::move(g_terms)),
      h_(std::move(h_terms)),
      mask_(std::move(active_mask)) {
  validate_and_index();
}

ContinuedFractionModel::ContinuedFractionModel(std::vector<std::string> feature_names,
                                               std::vector<LinearTerm> g_terms,
                                               std::vector<LinearTerm> h_terms)
    : names_(std::move(feature_names)), g_(std::move(g_terms)), h_(std::move(h_terms)) {
  mask_.assign(names_.size(), false);
  auto mark = [&](const std::vector<LinearTerm>& terms) {
    for (const auto& t : terms) {
      for (std::size_t j = 0; j < t.coeffs.size() && j < mask_.size(); ++j) {
        if (t.coeffs[j] != 0.0) mask_[j] = true;
      }
    }
  };
  mark(g_);
  mark(h_);
  validate_and_index();
}

ContinuedFractionModel ContinuedFractionModel::zeros(std::vector<std::string> feature_names,
                                                     std::size_t depth) {
  const std::size_t p = feature_names.size();
  std::vector<LinearTerm> g(depth + 1, LinearTerm{std::vector<double>(p, 0.0), 0.0});
  std::vector<LinearTerm> h(depth, LinearTerm{std::vector<double>(p, 0.0), 0.0});
  return ContinuedFractionModel(std::move(feature_names), std::move(g), std::move(h),
                                std::vector<bool>(p, false));
}

void ContinuedFractionModel::validate_and_index() {
  if (g_.size() != h_.size() + 1) {
    throw InputError("continued fraction needs exactly one more g term than h terms");
  }
  if (mask_.size() != names_.size()) throw InputError("active mask length != feature count");
  auto check = [&](const std::vector<LinearTerm>& terms) {
    for (const auto& t : terms) {
      if (t.coeffs.size() != names_.size()) {
        throw InputError("term has " + std::to_string(t.coeffs.size()) +
                         " coefficients for " + std::to_string(names_.size()) + " features");
      }
      if (!std::isfinite(t.constant)) throw InputError("non-finite term constant");
      for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
        if (!std::isfinite(t.coeffs[j])) throw InputError("non-finite term coefficient");
        if (!mask_[j] && t.coeffs[j] != 0.0) {
          throw InputError("inactive feature '" + names_[j] + "' has a nonzero coefficient");
        }
      }
    }
  };
  check(g_);
  check(h_);
  active_.clear();
  for (std::size_t j = 0; j < mask_.size(); ++j) {
    if (mask_[j]) active_.push_back(j);
  }
}

const LinearTerm& ContinuedFractionModel::term(std::size_t position) const {
  if (position >= term_count()) throw InputError("term position out of range");
  return position % 2 == 0 ? g_[position / 2] : h_[position / 2];
}

LinearTerm& ContinuedFractionModel::term_mut(std::size_t position) {
  if (position >= term_count()) throw InputError("term position out of range");
  return position % 2 == 0 ? g_[position / 2] : h_[position / 2];
}

void ContinuedFractionModel::set_constant(std::size_t position, double value) {
  term_mut(position).constant = value;
}

void ContinuedFractionModel::set_coefficient(std::size_t position, std::size_t feature,
                                             double value) {
  if (feature >= feature_count()) throw InputError("feature index out of range");
  if (!mask_[feature]) set_active(feature, true);
  term_mut(position).coeffs[feature] = value;
}

void ContinuedFractionModel::set_active(std::size_t feature, bool active) {
  if (feature >= feature_count()) throw InputError("feature index out of range");
  if (mask_[feature] == active) return;
  mask_[feature] = active;
  if (!active) {
    for (auto& t : g_) t.coeffs[feature] = 0.0;
    for (auto& t : h_) t.coeffs[feature] = 0.0;
  }
  active_.clear();
  for (std::size_t j = 0; j < mask_.size(); ++j) {
    if (mask_[j]) active_.push_back(j);
  }
}

double ContinuedFractionModel::evaluate(std::span<const double> x, std::size_t* undefined) const {
  if (x.size() != feature_count()) {
    throw InputError("evaluate: got " + std::to_string(x.size()) + " features, model has " +
                     std::to_string(feature_count()));
  }
  const std::size_t d = depth();
  double value = apply(g_[d], x, active_);
  for (std::size_t k = d; k-- > 0;) {
    double den = value;
    if (std::abs(den) < kDenominatorGuard) {
      den = std::signbit(den) ? -kDenominatorGuard : kDenominatorGuard;
      if (undefined) ++*undefined;
    }
    value = apply(g_[k], x, active_) + apply(h_[k], x, active_) / den;
  }
  return value;
}

ContinuedFractionModel ContinuedFractionModel::extended(std::size_t new_depth) const {
  if (new_depth < depth()) throw InputError("cannot extend to a smaller depth");
  ContinuedFractionModel out = *this;
  const std::vector<double> zero(feature_count(), 0.0);
  while (out.depth() < new_depth) {
    out.h_.push_back(LinearTerm{zero, 0.0});
    out.g_.push_back(LinearTerm{zero, 1.0});
  }
  return out;
}

std::size_t ContinuedFractionModel::free_parameter_count() const noexcept {
  return term_count() * (1 + active_.size());
}

std::vector<double> ContinuedFractionModel::free_parameters() const {
  std::vector<double> out;
  out.reserve(free_parameter_count());
  for (std::size_t pos = 0; pos < term_count(); ++pos) {
    const auto& t = term(pos);
    out.push_back(t.constant);
    for (std::size_t j : active_) out.push_back(t.coeffs[j]);
  }
  return out;
}

void ContinuedFractionModel::set_free_parameters(std::span<const double> params) {
  if (params.size() != free_parameter_count()) {
    throw InputError("free parameter vector has wrong length");
  }
  std::size_t k = 0;
  for (std::size_t pos = 0; pos < term_count(); ++pos) {
    auto& t = term_mut(pos);
    t.constant = params[k++];
    for (std::size_t j : active_) t.coeffs[j] = params[k++];
  }
}

bool ContinuedFractionModel::operator==(const ContinuedFractionModel& other) const {
  return names_ == other.names_ && g_ == other.g_ && h_ == other.h_ && mask_ == other.mask_;
}

EvalReport evaluate_dataset(const ContinuedFractionModel& model, const Dataset& data) {
  if (data.empty()) throw InputError("mse: empty dataset");
  if (data.cols() != model.feature_count()) {
    throw InputError("mse: dataset has " + std::to_string(data.cols()) +
                     " features, model has " + std::to_string(model.feature_count()));
  }
  EvalReport report;
  report.predictions.resize(data.rows());
  double sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double p = model.evaluate(data.row(i), &report.undefined_count);
    report.predictions[i] = p;
    const double r = p - data.targets()[i];
    sum += r * r;
  }
  report.mse = sum / static_cast<double>(data.rows());
  return report;
}

double mean_squared_error(const ContinuedFractionModel& model, const Dataset& data,
                          std::size_t* undefined) {
  if (data.empty()) throw InputError("mse: empty dataset");
  if (data.cols() != model.feature_count()) throw InputError("mse: feature count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double r = model.evaluate(data.row(i), undefined) - data.targets()[i];
    sum += r * r;
  }
  return sum / static_cast<double>(data.rows());
}

namespace {

using nlohmann::json;

json term_json(const LinearTerm& t) {
  return json{{"constant", t.constant}, {"coeffs", t.coeffs}};
}

template <typename T>
T require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("model document: missing field '") + key + "'", 0);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("model document: bad field '") + key + "': " + e.what(), 0);
  }
}

std::vector<LinearTerm> terms_from(const json& arr, const char* key) {
  if (!arr.is_array()) throw ParseError(std::string("model document: '") + key + "' is not a list", 0);
  std::vector<LinearTerm> out;
  for (const auto& t : arr) {
    out.push_back(LinearTerm{require<std::vector<double>>(t, "coeffs"),
                             require<double>(t, "constant")});
  }
  return out;
}

}  // namespace

std::string model_to_json(const ContinuedFractionModel& model) {
  json doc;
  doc["format"] = "cfr-model";
  doc["version"] = 1;
  doc["depth"] = model.depth();
  doc["feature_names"] = model.feature_names();
  doc["active_mask"] = model.active_mask();
  doc["g_terms"] = json::array();
  doc["h_terms"] = json::array();
  for (const auto& t : model.g_terms()) doc["g_terms"].push_back(term_json(t));
  for (const auto& t : model.h_terms()) doc["h_terms"].push_back(term_json(t));
  return doc.dump(2) + "\n";
}

ContinuedFractionModel model_from_json(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model document: ") + e.what(), e.byte);
  }
  if (require<std::string>(doc, "format") != "cfr-model") {
    throw ParseError("model document: unexpected format tag", 0);
  }
  const auto depth = require<std::size_t>(doc, "depth");
  auto names = require<std::vector<std::string>>(doc, "feature_names");
  auto mask = require<std::vector<bool>>(doc, "active_mask");
  auto g = terms_from(require<json>(doc, "g_terms"), "g_terms");
  auto h = terms_from(require<json>(doc, "h_terms"), "h_terms");
  if (h.size() != depth) throw ParseError("model document: depth disagrees with h_terms", 0);
  try {
    return ContinuedFractionModel(std::move(names), std::move(g), std::move(h), std::move(mask));
  } catch (const InputError& e) {
    throw ParseError(std::string("model document: ") + e.what(), 0);
  }
}

std::string model_to_text(const ContinuedFractionModel& model) {
  std::ostringstream out;
  out.precision(6);
  auto line = [&](const char* label, std::size_t i, const LinearTerm& t) {
    out << label << i << "(x) = " << t.constant;
    for (std::size_t j : model.active_features()) {
      const double c = t.coeffs[j];
      if (c == 0.0) continue;
      out << (c < 0 ? " - " : " + ") << std::abs(c) << "*" << model.feature_names()[j];
    }
    out << '\n';
  };
  out << "depth " << model.depth() << '\n';
  for (std::size_t i = 0; i <= model.depth(); ++i) {
    line("g", i, model.g_terms()[i]);
    if (i < model.depth()) line("h", i, model.h_terms()[i]);
  }
  return out.str();
}

}  // namespace cfr
