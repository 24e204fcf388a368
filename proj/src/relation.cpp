#include "depdisc/relation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "depdisc/rng.hpp"

namespace depdisc {

namespace {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-style CSV: comma separated, double quotes around fields that contain
// commas, quotes or newlines, doubled quotes as escapes.
RawTable parse_csv(const std::string& text, const std::string& origin) {
  RawTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) {
        throw InputError(origin + ": row " + std::to_string(table.rows.size() + 1) +
                         " has " + std::to_string(record.size()) + " fields, header has " +
                         std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(record));
    }
    record.clear();
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field_started = true;
        field.push_back(c);
        break;
    }
  }
  if (in_quotes) throw InputError(origin + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw InputError(origin + ": missing header row");
  return table;
}

bool parse_number(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out, std::chars_format::general);
  if (ec != std::errc{} || ptr != end) return false;
  return std::isfinite(out);
}

Column encode_column(const std::vector<std::vector<std::string>>& rows, size_t col,
                     ColumnKind kind, bool null_unequal) {
  Column column;
  column.kind = kind;
  const uint32_t n = static_cast<uint32_t>(rows.size());
  column.codes.resize(n);

  std::vector<uint32_t> null_rows;
  // Distinct non-null raw values in dictionary order, each with the rows
  // holding it.
  struct Entry {
    std::string text;
    double value = 0;
    std::vector<uint32_t> rows;
  };
  std::map<std::string, size_t> by_text;
  std::map<double, size_t> by_value;
  std::vector<Entry> entries;

  for (uint32_t row = 0; row < n; ++row) {
    const std::string& cell = rows[row][col];
    if (cell.empty()) {
      null_rows.push_back(row);
      continue;
    }
    size_t idx;
    if (kind == ColumnKind::numeric) {
      double value = 0;
      parse_number(cell, value);
      auto it = by_value.find(value);
      if (it == by_value.end()) {
        idx = entries.size();
        by_value.emplace(value, idx);
        entries.push_back({render_numeric(value), value, {}});
      } else {
        idx = it->second;
      }
    } else {
      auto it = by_text.find(cell);
      if (it == by_text.end()) {
        idx = entries.size();
        by_text.emplace(cell, idx);
        entries.push_back({cell, 0, {}});
      } else {
        idx = it->second;
      }
    }
    entries[idx].rows.push_back(row);
  }

  // Dictionary order: nulls first, then raw-value order.
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (kind == ColumnKind::numeric) {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return entries[a].value < entries[b].value;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return entries[a].text < entries[b].text;
    });
  }

  column.has_null = !null_rows.empty();
  column.null_code_count =
      column.has_null ? (null_unequal ? static_cast<uint32_t>(null_rows.size()) : 1) : 0;

  for (uint32_t i = 0; i < column.null_code_count; ++i) {
    column.dict_text.emplace_back();
    if (kind == ColumnKind::numeric) column.dict_values.push_back(0);
  }
  if (null_unequal) {
    for (uint32_t i = 0; i < null_rows.size(); ++i) column.codes[null_rows[i]] = i;
  } else {
    for (uint32_t row : null_rows) column.codes[row] = 0;
  }

  for (size_t rank = 0; rank < order.size(); ++rank) {
    const Entry& e = entries[order[rank]];
    uint32_t code = column.null_code_count + static_cast<uint32_t>(rank);
    column.dict_text.push_back(e.text);
    if (kind == ColumnKind::numeric) column.dict_values.push_back(e.value);
    for (uint32_t row : e.rows) column.codes[row] = code;
  }
  return column;
}

Relation build_relation(const RawTable& table, const LoadOptions& options,
                        const std::string& origin) {
  if (table.header.size() > AttributeSet::kMaxWidth) {
    throw InputError(origin + ": more than " +
                     std::to_string(AttributeSet::kMaxWidth) + " columns");
  }
  std::vector<Column> columns;
  columns.reserve(table.header.size());
  for (size_t col = 0; col < table.header.size(); ++col) {
    ColumnKind kind = ColumnKind::categorical;
    bool any_value = false;
    bool all_numeric = true;
    for (const auto& row : table.rows) {
      const std::string& cell = row[col];
      if (cell.empty()) continue;
      any_value = true;
      double ignored;
      if (!parse_number(cell, ignored)) {
        all_numeric = false;
        break;
      }
    }
    if (any_value && all_numeric) kind = ColumnKind::numeric;
    if (auto it = options.type_hints.find(table.header[col]);
        it != options.type_hints.end()) {
      kind = it->second;
      if (kind == ColumnKind::numeric && !(any_value && all_numeric)) {
        throw InputError(origin + ": column '" + table.header[col] +
                         "' hinted numeric but holds non-numeric cells");
      }
    }
    columns.push_back(encode_column(table.rows, col, kind, options.null_unequal));
  }
  return Relation(table.header, std::move(columns),
                  static_cast<uint32_t>(table.rows.size()));
}

}  // namespace

Relation::Relation(std::vector<std::string> names, std::vector<Column> columns,
                   uint32_t row_count)
    : names_(std::move(names)), columns_(std::move(columns)), row_count_(row_count) {}

uint32_t Relation::attribute_index(const std::string& name) const {
  for (uint32_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw InputError("unknown attribute: " + name);
}

std::string render_numeric(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Relation load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_relation(parse_csv(buf.str(), path), options, path);
}

Relation load_csv_text(const std::string& text, const LoadOptions& options,
                       const std::string& origin) {
  return build_relation(parse_csv(text, origin), options, origin);
}

Relation relation_from_rows(std::vector<std::string> names,
                            const std::vector<std::vector<std::string>>& rows,
                            const LoadOptions& options) {
  RawTable table;
  table.header = std::move(names);
  for (const auto& row : rows) {
    if (row.size() != table.header.size())
      throw InputError("relation_from_rows: ragged row");
    table.rows.push_back(row);
  }
  return build_relation(table, options, "<rows>");
}

std::pair<RowView, RowView> project_pair(const Relation& r, uint32_t i, uint32_t j) {
  if (i == j) throw ContractError("project_pair: identical row ids");
  if (i >= r.row_count() || j >= r.row_count())
    throw ContractError("project_pair: row id out of range");
  return {RowView{&r, i}, RowView{&r, j}};
}

std::vector<Relation> horizontal_split(const Relation& r, uint32_t parts,
                                       uint64_t seed) {
  if (parts == 0) throw ContractError("horizontal_split: parts must be positive");
  Rng rng(seed);
  std::vector<uint32_t> perm = rng.permutation(r.row_count());

  const uint32_t n = r.row_count();
  const uint32_t base = parts ? n / parts : 0;
  const uint32_t extra = parts ? n % parts : 0;

  std::vector<Relation> out;
  out.reserve(parts);
  uint32_t offset = 0;
  for (uint32_t p = 0; p < parts; ++p) {
    uint32_t size = base + (p < extra ? 1 : 0);
    std::vector<Column> columns;
    columns.reserve(r.column_count());
    for (uint32_t c = 0; c < r.column_count(); ++c) {
      const Column& src = r.column(c);
      Column col = src;  // keeps the parent dictionary
      col.codes.clear();
      col.codes.reserve(size);
      for (uint32_t i = 0; i < size; ++i)
        col.codes.push_back(src.codes[perm[offset + i]]);
      columns.push_back(std::move(col));
    }
    out.emplace_back(r.attribute_names(), std::move(columns), size);
    offset += size;
  }
  return out;
}

}  // namespace depdisc
