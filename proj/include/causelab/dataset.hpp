#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace causelab {

enum class ColumnType { kReal, kBinary, kCategorical };

// Immutable columnar table of observations. Every column is stored as a
// double vector; binary columns hold only 0/1 and categorical columns hold
// integer codes.
class Dataset {
 public:
  Dataset() = default;
  // Column types are inferred when `types` is empty: all values in {0,1}
  // gives kBinary, integer-valued with at most 16 distinct values gives
  // kCategorical, anything else kReal.
  Dataset(std::vector<std::string> names, std::vector<Eigen::VectorXd> columns,
          std::vector<ColumnType> types = {});

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(std::string_view name) const;
  bool has_column(std::string_view name) const;

  const Eigen::VectorXd& column(int index) const { return columns_.at(static_cast<std::size_t>(index)); }
  const Eigen::VectorXd& column(std::string_view name) const { return column(index_of(name)); }
  ColumnType type(int index) const { return types_.at(static_cast<std::size_t>(index)); }
  ColumnType type(std::string_view name) const { return type(index_of(name)); }

  // Rows x names.size() design matrix; empty `names` gives a rows x 0 matrix.
  Eigen::MatrixXd matrix(const std::vector<std::string>& names) const;
  Dataset select(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> names_;
  std::vector<Eigen::VectorXd> columns_;
  std::vector<ColumnType> types_;
  Eigen::Index rows_ = 0;
};

ColumnType infer_column_type(const Eigen::VectorXd& values);

// Comma-separated, header row required, '.' decimal point, no quoting.
// Reals are written in shortest round-trip form.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace causelab
