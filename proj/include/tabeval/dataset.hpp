#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tabeval {

/// Raised for malformed input data or inconsistent schemas.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { Numerical, Categorical };

std::string to_string(ColumnKind kind);
/// Accepts "num"/"numerical" and "cat"/"categorical".
ColumnKind parse_column_kind(const std::string& text);

/// A named column holding either finite reals or categorical labels.
class Column {
 public:
  static Column numerical(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::string> labels);

  const std::string& name() const { return name_; }
  ColumnKind kind() const { return kind_; }
  bool is_numerical() const { return kind_ == ColumnKind::Numerical; }
  std::size_t size() const;

  /// Only valid for numerical columns.
  const std::vector<double>& numbers() const;
  /// Only valid for categorical columns.
  const std::vector<std::string>& labels() const;

  /// Returns a column holding the given rows, in the given order.
  Column take(std::span<const std::size_t> rows) const;

  bool operator==(const Column&) const = default;

 private:
  Column() = default;

  std::string name_;
  ColumnKind kind_ = ColumnKind::Numerical;
  std::vector<double> numbers_;
  std::vector<std::string> labels_;
};

/// Immutable column-oriented table. All columns share one length, names are
/// unique, numericals are finite.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t j) const { return columns_.at(j); }
  const Column& column(const std::string& name) const;
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<std::string> names() const;
  std::vector<ColumnKind> kinds() const;

  Table take_rows(std::span<const std::size_t> rows) const;
  Table select(std::span<const std::string> names) const;

  bool operator==(const Table&) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

using KindMap = std::map<std::string, ColumnKind>;

/// Parses CSV text (RFC-4180 quoting, header row required). Columns absent
/// from `declared` are numerical iff every cell parses as a finite real.
Table parse_csv(const std::string& text, const KindMap& declared = {});
Table load_csv(const std::filesystem::path& path, const KindMap& declared = {});
std::string to_csv(const Table& table);

/// Parses a JSON object {"col": "num"|"cat", ...}.
KindMap parse_kind_map(const std::string& json_text);
KindMap load_kind_map(const std::filesystem::path& path);
KindMap kinds_of(const Table& table);

/// Per-column reference ranges and categorical level universes.
struct NormalizationSpec {
  struct Entry {
    std::string name;
    ColumnKind kind = ColumnKind::Numerical;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::string> levels;

    double range() const { return max - min; }
    std::optional<std::size_t> level_index(const std::string& label) const;
  };

  std::vector<Entry> entries;

  /// Min/max from `reference` only; levels in first-appearance order over
  /// `reference` followed by `others`.
  static NormalizationSpec fit(const Table& reference, std::span<const Table* const> others = {});
  /// Min/max and levels over every table.
  static NormalizationSpec fit_pooled(std::span<const Table* const> tables);

  std::size_t size() const { return entries.size(); }
};

/// Dense row-major numeric view of a table: numericals min-max normalized,
/// categoricals replaced by level indices.
struct EncodedTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<ColumnKind> kinds;
  std::vector<std::size_t> n_levels;  // 0 for numerical columns

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::vector<double> column(std::size_t j) const;
  EncodedTable take_rows(std::span<const std::size_t> ids) const;
  EncodedTable drop_column(std::size_t j) const;
};

EncodedTable normalize(const Table& table, const NormalizationSpec& spec);
/// Inverse of normalize. Constant numerical columns map back to their min.
Table denormalize(const EncodedTable& encoded, const NormalizationSpec& spec);

enum class DistanceKind { Gower, Euclidean };

std::string to_string(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& text);

/// Aligned real/synthetic/holdout tables plus evaluation settings. Cheap to
/// copy; the underlying tables and encodings are shared and immutable.
class EvalContext {
 public:
  const Table& real() const { return data_->real; }
  const Table& synthetic() const { return data_->synthetic; }
  const Table* holdout() const { return data_->holdout ? &*data_->holdout : nullptr; }
  bool has_holdout() const { return data_->holdout.has_value(); }
  const std::optional<std::string>& target() const { return data_->target; }

  /// Reference ranges from the real table, levels over every table.
  const NormalizationSpec& spec() const { return data_->spec; }
  const EncodedTable& real_encoded() const { return data_->real_encoded; }
  const EncodedTable& synthetic_encoded() const { return data_->synthetic_encoded; }
  const EncodedTable* holdout_encoded() const {
    return data_->holdout_encoded ? &*data_->holdout_encoded : nullptr;
  }

  std::uint64_t seed = 0;
  DistanceKind distance = DistanceKind::Gower;

 private:
  struct Data {
    Table real;
    Table synthetic;
    std::optional<Table> holdout;
    std::optional<std::string> target;
    NormalizationSpec spec;
    EncodedTable real_encoded;
    EncodedTable synthetic_encoded;
    std::optional<EncodedTable> holdout_encoded;
  };
  std::shared_ptr<const Data> data_;

  friend EvalContext validate_context(const Table&, const Table&, const std::optional<Table>&,
                                      const std::optional<std::string>&, std::uint64_t,
                                      DistanceKind);
};

/// Aligns synthetic and holdout columns to the real table's order and
/// checks names, kinds and the target column.
EvalContext validate_context(const Table& real, const Table& synthetic,
                             const std::optional<Table>& holdout = std::nullopt,
                             const std::optional<std::string>& target = std::nullopt,
                             std::uint64_t seed = 0, DistanceKind distance = DistanceKind::Gower);

}  // namespace tabeval
