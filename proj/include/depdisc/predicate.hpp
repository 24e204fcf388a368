#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "depdisc/bitset.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {

/// Comparison operators in canonical order: =, !=, <, <=, >, >=.
enum class PredOp : uint8_t { eq, ne, lt, le, gt, ge };

const char* pred_op_symbol(PredOp op);

/// Single-attribute comparison between the two tuples of an ordered pair:
/// t0.A op t1.A.
struct Predicate {
  uint32_t attribute = 0;
  PredOp op = PredOp::eq;

  auto operator<=>(const Predicate&) const = default;
};

enum class SpaceMode : uint8_t {
  /// One "values differ" predicate per attribute.
  fd_inequality,
  /// {=, !=} per categorical attribute, {=, !=, <, <=, >, >=} per numeric one.
  dc_full,
};

/// Enumerated predicate space over a schema. Predicates are ordered by
/// (attribute index, operator), which fixes every bit position.
class PredicateSpace {
 public:
  static PredicateSpace make(SpaceMode mode, const Relation& r);

  SpaceMode mode() const { return mode_; }
  uint32_t size() const { return static_cast<uint32_t>(predicates_.size()); }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  const Predicate& predicate(uint32_t position) const { return predicates_.at(position); }

  /// Bit position of a predicate; throws ContractError when the predicate is
  /// not part of the space.
  uint32_t position(const Predicate& p) const;

  Bitset empty_set() const { return Bitset(size()); }

 private:
  SpaceMode mode_ = SpaceMode::fd_inequality;
  std::vector<Predicate> predicates_;
  std::vector<uint32_t> attribute_base_;  // first position per attribute
  std::vector<bool> attribute_numeric_;
};

/// Bitset over a predicate space: the predicates one ordered tuple pair
/// satisfies (dc_full) or the attributes on which a pair differs
/// (fd_inequality).
using EvidenceSet = Bitset;

/// Truth of `t_i.A op t_j.A` under the null rules: null equals null (unless
/// the column was loaded null-unequal, where distinct null codes never match)
/// and nulls never satisfy an order predicate.
bool predicate_satisfied(const Column& column, uint32_t code_i, uint32_t code_j,
                         PredOp op);

}  // namespace depdisc
