#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depdisc/bitset.hpp"
#include "depdisc/error.hpp"

namespace depdisc {

enum class ColumnKind : uint8_t { categorical, numeric };

/// One dictionary-encoded column. Codes are order-preserving: for non-null
/// cells, raw_i < raw_j iff code_i < code_j (numeric order for numeric
/// columns, byte order for categorical ones). Empty cells map to a null
/// entry that always sits at code 0, ordered before every real value.
struct Column {
  ColumnKind kind = ColumnKind::categorical;
  std::vector<uint32_t> codes;

  /// Dictionary, indexed by code. Entry 0 is the null sentinel when
  /// has_null is set. Numeric columns keep parsed values alongside a
  /// canonical text rendering.
  std::vector<std::string> dict_text;
  std::vector<double> dict_values;  // numeric kind only, parallel to dict_text
  bool has_null = false;

  /// With --null-unequal every empty cell received its own code; the first
  /// null_code_count codes are all null sentinels in that mode.
  uint32_t null_code_count = 0;

  uint32_t dictionary_size() const { return static_cast<uint32_t>(dict_text.size()); }
  bool code_is_null(uint32_t code) const { return code < null_code_count; }
  /// Raw value for a code; null decodes to the empty string.
  const std::string& decode(uint32_t code) const { return dict_text.at(code); }
};

struct LoadOptions {
  /// Per-column kind overrides, keyed by column name.
  std::map<std::string, ColumnKind> type_hints;
  /// When set, each empty cell is its own value (null != null).
  bool null_unequal = false;
};

/// Dictionary-encoded table. Rows are identified by their 0-based position.
class Relation {
 public:
  Relation() = default;
  Relation(std::vector<std::string> names, std::vector<Column> columns,
           uint32_t row_count);

  uint32_t row_count() const { return row_count_; }
  uint32_t column_count() const { return static_cast<uint32_t>(columns_.size()); }

  const std::vector<std::string>& attribute_names() const { return names_; }
  const std::string& attribute_name(uint32_t i) const { return names_.at(i); }
  /// Index of a named column; throws InputError when absent.
  uint32_t attribute_index(const std::string& name) const;

  const Column& column(uint32_t i) const { return columns_.at(i); }
  uint32_t code(uint32_t row, uint32_t attribute) const {
    return columns_[attribute].codes[row];
  }

  /// All attribute indices as a set.
  AttributeSet all_attributes() const {
    return AttributeSet::full(column_count());
  }

 private:
  std::vector<std::string> names_;
  std::vector<Column> columns_;
  uint32_t row_count_ = 0;
};

/// Constant-time view over one row, for pairwise comparisons.
struct RowView {
  const Relation* relation = nullptr;
  uint32_t row = 0;

  uint32_t code(uint32_t attribute) const { return relation->code(row, attribute); }
};

/// Parses a header-ful CSV file (RFC-style quoting) into a Relation.
/// A column is numeric when every non-empty cell parses as a finite decimal
/// number and no hint overrides it; columns with no non-empty cells stay
/// categorical. Ragged rows raise InputError with the offending row number.
Relation load_csv(const std::string& path, const LoadOptions& options = {});

/// Same parser over an in-memory buffer; `origin` names the source in errors.
Relation load_csv_text(const std::string& text, const LoadOptions& options = {},
                       const std::string& origin = "<memory>");

/// Views over two distinct rows. Throws ContractError on i == j or
/// out-of-range ids.
std::pair<RowView, RowView> project_pair(const Relation& r, uint32_t i, uint32_t j);

/// Splits rows into `parts` near-equal pieces (sizes differ by at most one)
/// after a seeded pseudo-random permutation. Parts keep the parent's
/// dictionaries, so codes remain comparable across parts.
std::vector<Relation> horizontal_split(const Relation& r, uint32_t parts,
                                       uint64_t seed);

/// Builds a Relation directly from raw string cells (tests, generators).
Relation relation_from_rows(std::vector<std::string> names,
                            const std::vector<std::vector<std::string>>& rows,
                            const LoadOptions& options = {});

/// Canonical text form of a numeric cell (shortest round-trip rendering).
std::string render_numeric(double value);

}  // namespace depdisc
