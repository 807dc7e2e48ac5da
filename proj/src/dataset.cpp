#include "causelab/dataset.hpp"

#include "causelab/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace causelab {

ColumnType infer_column_type(const Eigen::VectorXd& values) {
  bool binary = true;
  bool integral = true;
  std::set<double> distinct;
  for (double v : values) {
    if (v != 0.0 && v != 1.0) binary = false;
    if (std::floor(v) != v || !std::isfinite(v)) integral = false;
    if (integral && distinct.size() <= 16) distinct.insert(v);
  }
  if (binary) return ColumnType::kBinary;
  if (integral && distinct.size() <= 16) return ColumnType::kCategorical;
  return ColumnType::kReal;
}

Dataset::Dataset(std::vector<std::string> names, std::vector<Eigen::VectorXd> columns,
                 std::vector<ColumnType> types)
    : names_(std::move(names)), columns_(std::move(columns)), types_(std::move(types)) {
  if (names_.size() != columns_.size()) throw InvalidInput("Dataset: name/column count mismatch");
  {
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw InvalidInput("Dataset: duplicate column '" + n + "'");
    }
  }
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const auto& c : columns_) {
    if (c.size() != rows_) throw InvalidInput("Dataset: columns have unequal lengths");
  }
  if (types_.empty()) {
    for (const auto& c : columns_) types_.push_back(infer_column_type(c));
  }
  if (types_.size() != columns_.size()) throw InvalidInput("Dataset: type count mismatch");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    for (double v : columns_[j]) {
      if (!std::isfinite(v)) throw InvalidInput("Dataset: missing or non-finite value in '" + names_[j] + "'");
      if (types_[j] == ColumnType::kBinary && v != 0.0 && v != 1.0) {
        throw InvalidInput("Dataset: binary column '" + names_[j] + "' holds a value outside {0,1}");
      }
    }
  }
}

int Dataset::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidInput("unknown column '" + std::string(name) + "'");
  return static_cast<int>(it - names_.begin());
}

bool Dataset::has_column(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Eigen::MatrixXd Dataset::matrix(const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(rows_, static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = column(names[j]);
  return out;
}

Dataset Dataset::select(const std::vector<std::string>& names) const {
  std::vector<Eigen::VectorXd> cols;
  std::vector<ColumnType> types;
  for (const auto& n : names) {
    cols.push_back(column(n));
    types.push_back(type(n));
  }
  return Dataset(names, std::move(cols), std::move(types));
}

// ---------------------------------------------------------------- CSV

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw InvalidInput("CSV: missing header row");
  std::vector<std::string> names;
  for (auto& f : split_line(trim(line))) names.push_back(trim(f));
  std::vector<std::vector<double>> cols(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != names.size()) {
      throw InvalidInput("CSV line " + std::to_string(line_no) + ": expected " +
                         std::to_string(names.size()) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string f = trim(fields[j]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw InvalidInput("CSV line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                           ": not a number: '" + f + "'");
      }
      cols[j].push_back(v);
    }
  }
  std::vector<Eigen::VectorXd> columns;
  for (auto& c : cols) columns.push_back(Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  return Dataset(std::move(names), std::move(columns));
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.names().size(); ++j) {
    if (j) out << ',';
    out << data.names()[j];
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      const double v = data.column(j)[i];
      if (data.type(j) != ColumnType::kReal) {
        out << static_cast<long long>(v);
      } else {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, res.ptr - buf);
      }
    }
    out << '\n';
  }
}

}  // namespace causelab
