#pragma once

#include <cstdint>

#include "depdisc/partition.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {
namespace wire {

/// Canonical serialized sizes, used by every ledger charge: 4-byte codes,
/// 4-byte row ids, 4-byte length prefixes, 8-byte attribute sets and counts.

constexpr uint64_t kLengthPrefix = 4;
constexpr uint64_t kRowId = 4;
constexpr uint64_t kCode = 4;
constexpr uint64_t kAttributeSet = 8;
constexpr uint64_t kCount = 8;

/// Row shipped with its id and all m codes.
constexpr uint64_t row_bytes(uint32_t m) { return kRowId + kCode * m; }

/// A list of `count` row ids.
constexpr uint64_t row_id_list_bytes(uint64_t count) {
  return kLengthPrefix + kRowId * count;
}

/// A list of `count` full rows.
constexpr uint64_t row_list_bytes(uint64_t count, uint32_t m) {
  return kLengthPrefix + row_bytes(m) * count;
}

/// One column: length prefix plus n codes.
constexpr uint64_t column_bytes(uint64_t n) { return kLengthPrefix + kCode * n; }

/// Whole relation broadcast payload: row ids implicit, codes only.
constexpr uint64_t relation_bytes(uint64_t n, uint32_t m) {
  return kCount + kCode * n * m;
}

/// Stripped partition: attribute set, class count, per-class row id list,
/// stripped-singleton count.
inline uint64_t partition_bytes(const Partition& p) {
  uint64_t total = kAttributeSet + kLengthPrefix + kCount;
  for (const auto& c : p.classes) total += row_id_list_bytes(c.size());
  return total;
}

/// Value-ordered classes (singletons included) for order checks.
inline uint64_t ordered_classes_bytes(const OrderedClasses& c) {
  uint64_t total = kAttributeSet + kLengthPrefix;
  for (const auto& cls : c.classes) total += row_id_list_bytes(cls.size());
  return total;
}

/// Evidence bitset over a `width`-predicate space.
constexpr uint64_t evidence_bytes(uint32_t width) {
  return kLengthPrefix + 4ull * ((width + 31) / 32);
}

/// (attribute set, count) pair, the LDP2 lattice currency.
constexpr uint64_t node_count_bytes() { return kAttributeSet + kCount; }

}  // namespace wire
}  // namespace depdisc
