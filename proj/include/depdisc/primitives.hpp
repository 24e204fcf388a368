#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "depdisc/dependency.hpp"
#include "depdisc/partition.hpp"
#include "depdisc/predicate.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {

/// Stripped partition of r under X. X must be non-empty. Classes come out
/// ordered by smallest row id with rows ascending, so any two code paths
/// produce identical partitions.
Partition gen_eq_class(AttributeSet x, const Relation& r);

/// Classes of pi_X including singletons, ordered by X value vector.
OrderedClasses ordered_eq_classes(AttributeSet x, const Relation& r);

/// Probe-table intersection: pi_X ^ pi_Y = pi_(X u Y) without touching the
/// base relation. row_count is the n the partitions were built from.
Partition intersect_partitions(const Partition& px, const Partition& py,
                               uint32_t row_count);

enum class RefinementMode : uint8_t { count_based, order_based };

/// Inputs for one refinement check. count_based carries partition sizes
/// only; order_based carries the LHS classes in value order plus the RHS
/// column.
struct RefinementInput {
  RefinementMode mode = RefinementMode::count_based;

  // count_based: |pi_X| and |pi_(X u {A})|
  uint64_t left_count = 0;
  uint64_t combined_count = 0;

  // order_based
  const OrderedClasses* left_classes = nullptr;
  const Column* rhs_column = nullptr;
  OdDirection direction = OdDirection::asc;
};

/// count_based: X -> A holds iff |pi_X| == |pi_(X u {A})|.
/// order_based: X ~> A holds iff every pair increasing strictly in X is
/// non-decreasing (asc) or non-increasing (desc) in A; equal X values
/// impose no constraint. Nulls order before every real value.
bool check_refinement(const RefinementInput& input);

/// X is a unique column combination iff |pi_X| == n.
bool is_ucc(const Partition& p, uint32_t row_count);

/// Evidence for the ordered pair (i, j): in fd_inequality mode the
/// attributes whose values differ, in dc_full mode every satisfied
/// predicate. i != j required.
EvidenceSet gen_ev_set(uint32_t i, uint32_t j, const Relation& r,
                       const PredicateSpace& space);

/// Mirrors dc_full evidence of (i, j) into evidence of (j, i).
EvidenceSet mirror_evidence(const EvidenceSet& ev, const PredicateSpace& space);

/// Nested-loop join of two item sequences under a predicate.
template <typename T, typename Pred>
std::vector<std::pair<T, T>> local_join(std::span<const T> s1, std::span<const T> s2,
                                        Pred&& pred) {
  std::vector<std::pair<T, T>> out;
  for (const T& a : s1)
    for (const T& b : s2)
      if (pred(a, b)) out.emplace_back(a, b);
  return out;
}

/// Self-join emitting each unordered pair once (positions a < b).
template <typename T, typename Pred>
std::vector<std::pair<T, T>> local_self_join(std::span<const T> s, Pred&& pred) {
  std::vector<std::pair<T, T>> out;
  for (size_t a = 0; a < s.size(); ++a)
    for (size_t b = a + 1; b < s.size(); ++b)
      if (pred(s[a], s[b])) out.emplace_back(s[a], s[b]);
  return out;
}

/// Pairs of rows whose positions in the class differ by exactly `window`.
std::vector<std::pair<uint32_t, uint32_t>> window_pairs(
    const std::vector<uint32_t>& class_rows, uint32_t window);

/// All inclusion-minimal hitting sets of `sets` over a universe of
/// `universe_width` elements. DFS branches on elements of the first
/// uncovered set in descending coverage frequency (ties by index) after the
/// input sets are sorted ascending by cardinality. An input set that is
/// empty admits no cover (empty result); an empty input list has exactly
/// the empty cover. Results come out canonically sorted.
std::vector<Bitset> minimal_covers(const std::vector<Bitset>& sets,
                                   uint32_t universe_width);

/// Minimal FDs from fd_inequality evidence over m attributes: for each RHS
/// A, the minimal hitting sets of the A-containing evidence sets with A
/// removed. No evidence mentioning A means A never differs, which yields
/// the empty-LHS dependency (rendered "TRUE -> A").
std::vector<Dependency> fds_from_evidence(const std::vector<EvidenceSet>& evidence,
                                          uint32_t m);

/// Minimal valid denial constraints from dc_full evidence: minimal hitting
/// sets of the complement sets. Trivially-valid DCs (predicate sets no
/// tuple pair can satisfy, such as t0.A < t1.A & t0.A > t1.A) are filtered
/// unless keep_trivial is set. With no evidence at all (fewer than two
/// rows) every single-predicate DC holds vacuously and all of them are
/// returned.
std::vector<Dependency> dcs_from_evidence(const std::vector<EvidenceSet>& evidence,
                                          const PredicateSpace& space,
                                          bool keep_trivial = false);

/// True when some conceivable tuple pair satisfies every predicate in the
/// set simultaneously (per-attribute comparison outcomes are compatible).
bool predicate_set_satisfiable(const Bitset& predicate_set,
                               const PredicateSpace& space);

}  // namespace depdisc
