#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "depdisc/bitset.hpp"
#include "depdisc/dependency.hpp"
#include "depdisc/partition.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {

/// Prefix tree over attribute sets with per-node rhs bits. Paths follow
/// ascending attribute indices. Stores minimal dependencies: insert refuses
/// anything with a stored generalization and evicts stored specializations.
/// Unique column combinations reuse the tree with rhs bit 0 as a marker.
class FDTree {
 public:
  explicit FDTree(uint32_t width) : width_(width) {}

  uint32_t width() const { return width_; }
  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Some stored lhs' -> rhs with lhs' a subset of lhs (lhs itself counts).
  bool contains_generalization(AttributeSet lhs, uint32_t rhs) const;
  bool contains(AttributeSet lhs, uint32_t rhs) const;

  /// False when a generalization is already stored. Otherwise removes every
  /// dominated specialization, stores the dependency, and returns true.
  bool insert(AttributeSet lhs, uint32_t rhs);
  /// Removes an exact entry if present.
  void remove(AttributeSet lhs, uint32_t rhs);

  /// Entries with the given lhs width, ascending by lhs.
  std::vector<std::pair<AttributeSet, AttributeSet>> level(uint32_t lhs_width) const;
  /// All entries, ascending by lhs.
  std::vector<std::pair<AttributeSet, AttributeSet>> all() const;
  void for_each(const std::function<void(AttributeSet, uint32_t)>& fn) const;

 private:
  struct Node {
    AttributeSet rhs;
    std::map<uint32_t, Node> children;
  };

  bool contains_gen(const Node& node, AttributeSet lhs, uint32_t rhs) const;
  void remove_specializations(Node& node, AttributeSet remaining, uint32_t rhs);

  Node root_;
  uint32_t width_ = 0;
  size_t size_ = 0;
};

/// One lattice node during a level-wise search. The search itself decides
/// which of the optional payloads it materializes.
struct LatticeNode {
  AttributeSet set;
  uint64_t class_count = 0;
  bool is_key = false;
  AttributeSet rhs_candidates;
  std::optional<Partition> partition;
  std::optional<OrderedClasses> ordered;
};

/// One level of the search lattice: all live nodes of a fixed cardinality,
/// ascending by set.
struct LatticeLevel {
  uint32_t width = 0;
  std::vector<LatticeNode> nodes;

  const LatticeNode* find(AttributeSet set) const;
  LatticeNode* find(AttributeSet set);
};

/// Driver-side record of everything discovered so far, driving minimality
/// filters and node pruning. `discovered` holds minimal FDs (or ascending
/// ODs); `discovered_desc` holds descending ODs and is unused otherwise.
struct PruneState {
  DepKind kind = DepKind::fd;
  FDTree discovered;
  FDTree discovered_desc;
  std::vector<AttributeSet> keys;

  PruneState(DepKind kind, uint32_t width)
      : kind(kind), discovered(width), discovered_desc(width) {}
};

/// The ground level: a single empty-set node with one class when the
/// relation has rows. The empty set is a key exactly when n <= 1.
LatticeLevel zero_level(uint32_t row_count);

/// One node per attribute with its class count; partitions and ordered
/// classes materialize on request.
LatticeLevel first_level(const Relation& r, bool keep_partitions,
                         bool keep_ordered = false);

/// One order-compatibility test: does prev's node `lhs` order attribute
/// `rhs` in `direction`?
struct OrderCheck {
  AttributeSet lhs;
  uint32_t rhs = 0;
  OdDirection direction = OdDirection::asc;
};

/// Batch verdict function for a level's order checks. Plans back this with
/// a metered cluster stage; tests use local_order_checker.
using OrderChecker =
    std::function<std::vector<char>(const std::vector<OrderCheck>&)>;

/// Checks straight off the relation, reusing prev's ordered classes when a
/// node carries them.
OrderChecker local_order_checker(const Relation& r, const LatticeLevel& prev);

/// Runs a level's refinement tests against prev's counts (fd/ucc: count
/// equality; od: order checks through `checker`), marks keys, emits key
/// dependencies, and updates the prune state. Returned dependencies are in
/// emission order, refinement results before key emissions. Width-0 levels
/// run key handling only.
std::vector<Dependency> compute_dependencies(LatticeLevel& level,
                                             const LatticeLevel& prev,
                                             PruneState& prune,
                                             uint32_t row_count,
                                             const OrderChecker& checker = {});

/// Nodes that survive pruning: keys prune in fd and ucc mode; fd mode also
/// drops nodes with no rhs candidates left.
std::vector<AttributeSet> live_sets(const LatticeLevel& level,
                                    const PruneState& prune);

/// Candidate sets one level up from the still-live nodes.
std::vector<AttributeSet> generate_next(const LatticeLevel& level,
                                        const PruneState& prune);

/// rhs attributes of Z still worth testing: A in Z with no stored
/// generalization of (Z minus A) -> A.
AttributeSet refinement_candidates(AttributeSet z, const FDTree& discovered);

/// rhs attributes outside X not already implied by a stored generalization,
/// used when a key node emits X -> A for every A it determines trivially.
AttributeSet emission_candidates(AttributeSet x, uint32_t width,
                                 const FDTree& discovered);

/// Candidates one level up from the surviving nodes: sets whose every
/// immediate subset is present. Prefix join, ascending output.
std::vector<AttributeSet> generate_next_level(const std::vector<AttributeSet>& level);

}  // namespace depdisc
