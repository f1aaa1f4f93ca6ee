#include "cfr/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cfr/errors.hpp"
#include "csv.hpp"

namespace cfr {

Dataset::Dataset(std::vector<std::string> sample_ids, std::vector<std::string> feature_names,
                 std::vector<double> values, std::vector<double> targets)
    : sample_ids_(std::move(sample_ids)),
      feature_names_(std::move(feature_names)),
      values_(std::move(values)),
      targets_(std::move(targets)) {
  if (sample_ids_.size() != targets_.size()) {
    throw InputError("dataset: " + std::to_string(sample_ids_.size()) + " sample ids for " +
                     std::to_string(targets_.size()) + " targets");
  }
  if (values_.size() != targets_.size() * feature_names_.size()) {
    throw InputError("dataset: value count does not match rows x features");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("dataset: non-finite feature value");
  }
  for (double v : targets_) {
    if (!std::isfinite(v)) throw InputError("dataset: non-finite target value");
  }
}

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<double> vals;
  std::vector<double> ys;
  ids.reserve(indices.size());
  vals.reserve(indices.size() * cols());
  ys.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= rows()) throw InputError("dataset subset: row index out of range");
    ids.push_back(sample_ids_[i]);
    auto r = row(i);
    vals.insert(vals.end(), r.begin(), r.end());
    ys.push_back(targets_[i]);
  }
  return Dataset(std::move(ids), feature_names_, std::move(vals), std::move(ys));
}

Dataset Dataset::select_features(std::span<const std::size_t> columns) const {
  std::vector<std::string> names;
  for (std::size_t j : columns) {
    if (j >= cols()) throw InputError("dataset: feature index out of range");
    names.push_back(feature_names_[j]);
  }
  std::vector<double> vals;
  vals.reserve(rows() * columns.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j : columns) vals.push_back(at(i, j));
  }
  return Dataset(sample_ids_, std::move(names), std::move(vals), targets_);
}

std::size_t Dataset::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < feature_names_.size(); ++j) {
    if (feature_names_[j] == name) return j;
  }
  throw InputError("dataset: unknown feature '" + name + "'");
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

Dataset parse_dataset_csv(const std::string& text) {
  auto rows = detail::parse_csv(text);
  if (rows.empty()) throw SchemaError("empty dataset file", 1);
  const auto& header = rows.front().fields;
  if (header.size() < 2 || header[0] != "sample_id" || header[1] != "target") {
    throw SchemaError("header must start with 'sample_id,target'", rows.front().line);
  }
  std::vector<std::string> features(header.begin() + 2, header.end());
  std::vector<std::string> ids;
  std::vector<double> vals;
  std::vector<double> ys;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw SchemaError("expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(row.fields.size()),
                        row.line);
    }
    ids.push_back(row.fields[0]);
    ys.push_back(detail::parse_real(row.fields[1], row.line, "target"));
    for (std::size_t j = 2; j < row.fields.size(); ++j) {
      vals.push_back(detail::parse_real(row.fields[j], row.line, "feature value"));
    }
  }
  return Dataset(std::move(ids), std::move(features), std::move(vals), std::move(ys));
}

Dataset read_dataset_csv(const std::string& path) {
  return parse_dataset_csv(detail::read_file(path));
}

std::string format_dataset_csv(const Dataset& data) {
  std::ostringstream out;
  out << "sample_id,target";
  for (const auto& name : data.feature_names()) out << ',' << detail::csv_escape(name);
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out << detail::csv_escape(data.sample_ids()[i]) << ',' << format_double(data.targets()[i]);
    for (double v : data.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  detail::write_file(path, format_dataset_csv(data));
}

}  // namespace cfr
