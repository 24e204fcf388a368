#pragma once

#include <cstdint>
#include <vector>

#include "depdisc/bitset.hpp"

namespace depdisc {

/// Rows sharing one value combination, ascending by row id.
struct EquivalenceClass {
  std::vector<uint32_t> rows;

  uint32_t size() const { return static_cast<uint32_t>(rows.size()); }
  /// Intra-class unordered pair count s(s-1)/2.
  uint64_t pair_weight() const {
    uint64_t s = rows.size();
    return s * (s - 1) / 2;
  }
};

/// Stripped partition pi_X: classes of size >= 2 ordered by smallest row id,
/// singletons dropped but counted. class_count is |pi_X| including the
/// stripped singletons.
struct Partition {
  AttributeSet attribute_set;
  std::vector<EquivalenceClass> classes;
  uint32_t stripped_singletons = 0;
  uint64_t class_count = 0;

  uint32_t stored_rows() const {
    uint32_t total = 0;
    for (const auto& c : classes) total += c.size();
    return total;
  }
};

/// Classes of pi_X ordered by the X value vector (ascending, lexicographic by
/// attribute index), singletons included. This is the carrier for
/// order-compatibility checks, where singleton classes still constrain their
/// neighbours.
struct OrderedClasses {
  AttributeSet attribute_set;
  std::vector<std::vector<uint32_t>> classes;

  uint32_t total_rows() const {
    uint32_t total = 0;
    for (const auto& c : classes) total += static_cast<uint32_t>(c.size());
    return total;
  }
};

}  // namespace depdisc
