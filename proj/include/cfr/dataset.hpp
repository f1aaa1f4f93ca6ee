#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cfr {

/// Samples x features design matrix with named columns and one target per row.
///
/// Values are stored row-major. Construction validates shape and finiteness;
/// the percentage-range invariant of word-frequency data is enforced where such
/// data is produced (see counts_to_percentages), since synthetic sets carry
/// negative features.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> sample_ids, std::vector<std::string> feature_names,
          std::vector<double> values, std::vector<double> targets);

  std::size_t rows() const noexcept { return targets_.size(); }
  std::size_t cols() const noexcept { return feature_names_.size(); }
  bool empty() const noexcept { return targets_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
  std::vector<double> column(std::size_t j) const;

  const std::vector<double>& targets() const noexcept { return targets_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// Rows in the given order (indices may repeat).
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Columns in the given order.
  Dataset select_features(std::span<const std::size_t> columns) const;
  std::size_t feature_index(const std::string& name) const;

 private:
  std::vector<std::string> sample_ids_;
  std::vector<std::string> feature_names_;
  std::vector<double> values_;
  std::vector<double> targets_;
};

/// Feature-matrix CSV: header `sample_id,target,<feature...>`, '.' decimals.
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);
std::string format_dataset_csv(const Dataset& data);
void write_dataset_csv(const Dataset& data, const std::string& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace cfr
