#include "tabeval/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace tabeval {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

struct CsvCell {
  std::string text;
  bool quoted = false;
};

// RFC-4180 records. A trailing newline does not start a new record.
std::vector<std::vector<CsvCell>> split_records(const std::string& text) {
  std::vector<std::vector<CsvCell>> records;
  std::vector<CsvCell> record;
  CsvCell cell;
  bool in_quotes = false;
  bool any = false;
  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.text.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      cell.quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(cell));
      cell = {};
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.text.empty()) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
      }
      record = {};
      cell = {};
      any = false;
    } else {
      cell.text.push_back(c);
      any = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (any || !cell.text.empty()) {
    record.push_back(std::move(cell));
    records.push_back(std::move(record));
  }
  return records;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(ColumnKind kind) {
  return kind == ColumnKind::Numerical ? "num" : "cat";
}

ColumnKind parse_column_kind(const std::string& text) {
  if (text == "num" || text == "numerical") return ColumnKind::Numerical;
  if (text == "cat" || text == "categorical") return ColumnKind::Categorical;
  throw DataError("unknown column kind '" + text + "' (expected \"num\" or \"cat\")");
}

Column Column::numerical(std::string name, std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("column '" + name + "' contains a non-finite value");
  }
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::Numerical;
  c.numbers_ = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> labels) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::Categorical;
  c.labels_ = std::move(labels);
  return c;
}

std::size_t Column::size() const {
  return is_numerical() ? numbers_.size() : labels_.size();
}

const std::vector<double>& Column::numbers() const {
  if (!is_numerical()) throw DataError("column '" + name_ + "' is categorical");
  return numbers_;
}

const std::vector<std::string>& Column::labels() const {
  if (is_numerical()) throw DataError("column '" + name_ + "' is numerical");
  return labels_;
}

Column Column::take(std::span<const std::size_t> rows) const {
  Column c;
  c.name_ = name_;
  c.kind_ = kind_;
  if (is_numerical()) {
    c.numbers_.reserve(rows.size());
    for (auto r : rows) c.numbers_.push_back(numbers_.at(r));
  } else {
    c.labels_.reserve(rows.size());
    for (auto r : rows) c.labels_.push_back(labels_.at(r));
  }
  return c;
}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name()).second) throw DataError("duplicate column name '" + c.name() + "'");
  }
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const auto& c : columns_) {
    if (c.size() != n_rows_) {
      throw DataError("column '" + c.name() + "' has " + std::to_string(c.size()) +
                      " rows, expected " + std::to_string(n_rows_));
    }
  }
}

const Column& Table::column(const std::string& name) const {
  auto j = index_of(name);
  if (!j) throw DataError("no column named '" + name + "'");
  return columns_[*j];
}

std::optional<std::size_t> Table::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name() == name) return j;
  }
  return std::nullopt;
}

std::vector<std::string> Table::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

std::vector<ColumnKind> Table::kinds() const {
  std::vector<ColumnKind> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.kind());
  return out;
}

Table Table::take_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.push_back(c.take(rows));
  return Table(std::move(cols));
}

Table Table::select(std::span<const std::string> names) const {
  std::vector<Column> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(column(n));
  return Table(std::move(cols));
}

Table parse_csv(const std::string& text, const KindMap& declared) {
  auto records = split_records(text);
  if (records.empty()) throw DataError("CSV has no header row");
  const auto& header = records.front();
  const std::size_t width = header.size();
  for (const auto& [name, kind] : declared) {
    bool found = std::any_of(header.begin(), header.end(),
                             [&](const CsvCell& h) { return h.text == name; });
    if (!found) throw DataError("declared kind for unknown column '" + name + "'");
  }
  std::vector<std::vector<std::string>> cells(width);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw DataError("ragged row " + std::to_string(r + 1) + ": " + std::to_string(rec.size()) +
                      " fields, expected " + std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (!rec[j].quoted && trim(rec[j].text).empty()) {
        throw DataError("missing value in row " + std::to_string(r + 1) + ", column '" +
                        header[j].text + "'");
      }
      cells[j].push_back(rec[j].text);
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t j = 0; j < width; ++j) {
    const std::string& name = header[j].text;
    std::vector<double> parsed;
    parsed.reserve(cells[j].size());
    bool all_real = true;
    for (const auto& cell : cells[j]) {
      auto v = parse_real(cell);
      if (!v) {
        all_real = false;
        break;
      }
      parsed.push_back(*v);
    }
    auto it = declared.find(name);
    ColumnKind kind = it != declared.end()
                          ? it->second
                          : (all_real ? ColumnKind::Numerical : ColumnKind::Categorical);
    if (kind == ColumnKind::Numerical) {
      if (!all_real) {
        throw DataError("column '" + name + "' declared numerical but holds unparseable values");
      }
      columns.push_back(Column::numerical(name, std::move(parsed)));
    } else {
      columns.push_back(Column::categorical(name, std::move(cells[j])));
    }
  }
  return Table(std::move(columns));
}

Table load_csv(const std::filesystem::path& path, const KindMap& declared) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), declared);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    if (j) out.push_back(',');
    out += quote_csv(table.column(j).name());
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
      if (j) out.push_back(',');
      const auto& c = table.column(j);
      out += c.is_numerical() ? format_real(c.numbers()[i]) : quote_csv(c.labels()[i]);
    }
    out.push_back('\n');
  }
  return out;
}

KindMap parse_kind_map(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed kinds JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("kinds JSON must be an object");
  KindMap out;
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_string()) throw DataError("kind for '" + name + "' must be a string");
    out[name] = parse_column_kind(value.get<std::string>());
  }
  return out;
}

KindMap load_kind_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kind_map(buf.str());
}

KindMap kinds_of(const Table& table) {
  KindMap out;
  for (const auto& c : table.columns()) out[c.name()] = c.kind();
  return out;
}

std::optional<std::size_t> NormalizationSpec::Entry::level_index(const std::string& label) const {
  auto it = std::find(levels.begin(), levels.end(), label);
  if (it == levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels.begin());
}

namespace {

void append_levels(std::vector<std::string>& levels, std::unordered_set<std::string>& seen,
                   const Column& column) {
  for (const auto& l : column.labels()) {
    if (seen.insert(l).second) levels.push_back(l);
  }
}

}  // namespace

NormalizationSpec NormalizationSpec::fit(const Table& reference,
                                         std::span<const Table* const> others) {
  NormalizationSpec spec;
  for (const auto& col : reference.columns()) {
    Entry e;
    e.name = col.name();
    e.kind = col.kind();
    if (col.is_numerical()) {
      const auto& v = col.numbers();
      if (!v.empty()) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        e.min = *lo;
        e.max = *hi;
      }
    } else {
      std::unordered_set<std::string> seen;
      append_levels(e.levels, seen, col);
      for (const Table* t : others) {
        if (t) append_levels(e.levels, seen, t->column(col.name()));
      }
    }
    spec.entries.push_back(std::move(e));
  }
  return spec;
}

NormalizationSpec NormalizationSpec::fit_pooled(std::span<const Table* const> tables) {
  if (tables.empty() || !tables.front()) throw DataError("fit_pooled needs at least one table");
  NormalizationSpec spec = fit(*tables.front(), tables.subspan(1));
  for (auto& e : spec.entries) {
    if (e.kind != ColumnKind::Numerical) continue;
    for (const Table* t : tables.subspan(1)) {
      if (!t) continue;
      for (double v : t->column(e.name).numbers()) {
        e.min = std::min(e.min, v);
        e.max = std::max(e.max, v);
      }
    }
  }
  return spec;
}

std::vector<double> EncodedTable::column(std::size_t j) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
  return out;
}

EncodedTable EncodedTable::take_rows(std::span<const std::size_t> ids) const {
  EncodedTable out;
  out.rows = ids.size();
  out.cols = cols;
  out.kinds = kinds;
  out.n_levels = n_levels;
  out.values.reserve(ids.size() * cols);
  for (auto i : ids) {
    auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
  }
  return out;
}

EncodedTable EncodedTable::drop_column(std::size_t j) const {
  EncodedTable out;
  out.rows = rows;
  out.cols = cols - 1;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c == j) continue;
    out.kinds.push_back(kinds[c]);
    out.n_levels.push_back(n_levels[c]);
  }
  out.values.reserve(rows * out.cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c != j) out.values.push_back(at(i, c));
    }
  }
  return out;
}

EncodedTable normalize(const Table& table, const NormalizationSpec& spec) {
  if (spec.size() != table.n_cols()) throw DataError("normalization spec does not cover the table");
  EncodedTable out;
  out.rows = table.n_rows();
  out.cols = table.n_cols();
  out.values.assign(out.rows * out.cols, 0.0);
  for (std::size_t j = 0; j < out.cols; ++j) {
    const auto& e = spec.entries[j];
    const auto& col = table.column(j);
    if (col.name() != e.name || col.kind() != e.kind) {
      throw DataError("normalization spec mismatch at column '" + col.name() + "'");
    }
    out.kinds.push_back(e.kind);
    if (e.kind == ColumnKind::Numerical) {
      out.n_levels.push_back(0);
      const double range = e.range();
      const auto& v = col.numbers();
      for (std::size_t i = 0; i < out.rows; ++i) {
        out.values[i * out.cols + j] = range > 0.0 ? (v[i] - e.min) / range : 0.0;
      }
    } else {
      out.n_levels.push_back(e.levels.size());
      std::unordered_map<std::string, std::size_t> index;
      for (std::size_t l = 0; l < e.levels.size(); ++l) index.emplace(e.levels[l], l);
      const auto& v = col.labels();
      for (std::size_t i = 0; i < out.rows; ++i) {
        auto it = index.find(v[i]);
        if (it == index.end()) {
          throw DataError("unknown level '" + v[i] + "' in column '" + e.name + "'");
        }
        out.values[i * out.cols + j] = static_cast<double>(it->second);
      }
    }
  }
  return out;
}

Table denormalize(const EncodedTable& encoded, const NormalizationSpec& spec) {
  if (spec.size() != encoded.cols) throw DataError("normalization spec does not cover the table");
  std::vector<Column> cols;
  for (std::size_t j = 0; j < encoded.cols; ++j) {
    const auto& e = spec.entries[j];
    if (e.kind == ColumnKind::Numerical) {
      std::vector<double> v(encoded.rows);
      for (std::size_t i = 0; i < encoded.rows; ++i) v[i] = e.min + encoded.at(i, j) * e.range();
      cols.push_back(Column::numerical(e.name, std::move(v)));
    } else {
      std::vector<std::string> v(encoded.rows);
      for (std::size_t i = 0; i < encoded.rows; ++i) {
        v[i] = e.levels.at(static_cast<std::size_t>(encoded.at(i, j)));
      }
      cols.push_back(Column::categorical(e.name, std::move(v)));
    }
  }
  return Table(std::move(cols));
}

std::string to_string(DistanceKind kind) {
  return kind == DistanceKind::Gower ? "gower" : "euclidean";
}

DistanceKind parse_distance_kind(const std::string& text) {
  if (text == "gower") return DistanceKind::Gower;
  if (text == "euclidean") return DistanceKind::Euclidean;
  throw DataError("unknown distance '" + text + "' (expected gower or euclidean)");
}

namespace {

Table align_to(const Table& reference, const Table& other, const std::string& role) {
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& name : reference.names()) {
    if (!other.index_of(name)) missing.push_back(name);
  }
  for (const auto& name : other.names()) {
    if (!reference.index_of(name)) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = role + " columns do not match the real data;";
    if (!missing.empty()) {
      msg += " missing:";
      for (const auto& m : missing) msg += " " + m;
    }
    if (!extra.empty()) {
      msg += (missing.empty() ? " " : ";") + std::string(" unexpected:");
      for (const auto& x : extra) msg += " " + x;
    }
    throw DataError(msg);
  }
  for (const auto& col : reference.columns()) {
    const auto& o = other.column(col.name());
    if (o.kind() != col.kind()) {
      throw DataError(role + " column '" + col.name() + "' is " + to_string(o.kind()) +
                      " but real column is " + to_string(col.kind()));
    }
  }
  auto names = reference.names();
  return other.select(names);
}

}  // namespace

EvalContext validate_context(const Table& real, const Table& synthetic,
                             const std::optional<Table>& holdout,
                             const std::optional<std::string>& target, std::uint64_t seed,
                             DistanceKind distance) {
  if (real.n_cols() == 0 || real.n_rows() == 0) throw DataError("real data is empty");
  auto data = std::make_shared<EvalContext::Data>();
  data->real = real;
  data->synthetic = align_to(real, synthetic, "synthetic");
  if (data->synthetic.n_rows() == 0) throw DataError("synthetic data is empty");
  if (holdout) data->holdout = align_to(real, *holdout, "holdout");
  if (target) {
    auto j = real.index_of(*target);
    if (!j) throw DataError("target column '" + *target + "' does not exist");
    if (real.column(*j).is_numerical()) throw DataError("target must be categorical");
    data->target = target;
  }
  std::vector<const Table*> others{&data->synthetic};
  if (data->holdout) others.push_back(&*data->holdout);
  data->spec = NormalizationSpec::fit(data->real, others);
  data->real_encoded = normalize(data->real, data->spec);
  data->synthetic_encoded = normalize(data->synthetic, data->spec);
  if (data->holdout) data->holdout_encoded = normalize(*data->holdout, data->spec);

  EvalContext ctx;
  ctx.data_ = std::move(data);
  ctx.seed = seed;
  ctx.distance = distance;
  return ctx;
}

}  // namespace tabeval
