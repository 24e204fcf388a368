#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depdisc/relation.hpp"

namespace depdisc {
namespace datagen {

/// One generated column: `cardinality` distinct values, drawn uniformly at
/// skew 0 and zipf-like otherwise. Numeric columns render their value index
/// as a decimal; null_rate empties a cell.
struct ColumnSpec {
  std::string name;
  uint32_t cardinality = 2;
  double skew = 0.0;
  bool numeric = false;
  double null_rate = 0.0;
};

Relation random_relation(uint32_t rows, const std::vector<ColumnSpec>& specs,
                         uint64_t seed);

/// Seeded test corpora. Small indices cover degenerate row counts; the rest
/// vary size, width, cardinality, skew, types, and nulls.
Relation corpus_relation(uint32_t index);     // n <= 150, m <= 6
Relation od_corpus_relation(uint32_t index);  // n <= 80, m <= 5, numeric
Relation dc_corpus_relation(uint32_t index);  // n <= 40, m <= 3

/// 5000 x 8, independent columns with cardinalities 2..50. No early keys
/// and no low-level dependencies, so a level-wise search goes deep.
Relation deep_lattice_relation();

/// 500 x 20 with cardinalities 2..8: large overlapping blocks, so blocked
/// pair generation compares far more pairs than the all-pairs count.
Relation wide_blocks_relation();

/// Sales-line shaped table, 16 columns. Planted structure:
///   - OKEY/LINE: 4 lines per order; the pair is a key.
///   - R1..R6: residues of the row counter modulo distinct primes larger
///     than sqrt(rows), so every pair among them (and with OKEY or the
///     PKEYs) is a key. That caps how deep any lattice search can go.
///   - ITEM -> CODE (bijective), ITEM -> GRP (coarsening): exact FDs.
///   - KEY0 -> VAL0 and KEY1 -> VAL1: each would be an FD except for a
///     single planted violating row pair, so they hold on most row subsets
///     but not the whole table.
Relation order_lines_relation(uint32_t rows);

void write_csv(const Relation& r, const std::string& path);

}  // namespace datagen
}  // namespace depdisc
