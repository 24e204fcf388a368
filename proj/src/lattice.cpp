#include "depdisc/lattice.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "depdisc/error.hpp"
#include "depdisc/primitives.hpp"

namespace depdisc {

bool FDTree::contains_gen(const Node& node, AttributeSet lhs, uint32_t rhs) const {
  if (node.rhs.test(rhs)) return true;
  for (const auto& [attr, child] : node.children) {
    if (!lhs.test(attr)) continue;
    AttributeSet rest = lhs.minus(AttributeSet::full(attr + 1));
    if (contains_gen(child, rest, rhs)) return true;
  }
  return false;
}

bool FDTree::contains_generalization(AttributeSet lhs, uint32_t rhs) const {
  if (rhs >= width_) throw ContractError("rhs attribute out of range");
  return contains_gen(root_, lhs, rhs);
}

bool FDTree::contains(AttributeSet lhs, uint32_t rhs) const {
  const Node* node = &root_;
  for (uint32_t a : lhs.to_indices()) {
    auto it = node->children.find(a);
    if (it == node->children.end()) return false;
    node = &it->second;
  }
  return node->rhs.test(rhs);
}

void FDTree::remove_specializations(Node& node, AttributeSet remaining, uint32_t rhs) {
  if (remaining.empty() && node.rhs.test(rhs)) {
    node.rhs.reset(rhs);
    --size_;
  }
  for (auto it = node.children.begin(); it != node.children.end();) {
    remove_specializations(it->second, remaining.without(it->first), rhs);
    if (it->second.rhs.empty() && it->second.children.empty())
      it = node.children.erase(it);
    else
      ++it;
  }
}

bool FDTree::insert(AttributeSet lhs, uint32_t rhs) {
  if (contains_generalization(lhs, rhs)) return false;
  remove_specializations(root_, lhs, rhs);
  Node* node = &root_;
  for (uint32_t a : lhs.to_indices()) node = &node->children[a];
  node->rhs.set(rhs);
  ++size_;
  return true;
}

void FDTree::remove(AttributeSet lhs, uint32_t rhs) {
  std::vector<std::pair<Node*, uint32_t>> path;
  Node* node = &root_;
  for (uint32_t a : lhs.to_indices()) {
    auto it = node->children.find(a);
    if (it == node->children.end()) return;
    path.emplace_back(node, a);
    node = &it->second;
  }
  if (!node->rhs.test(rhs)) return;
  node->rhs.reset(rhs);
  --size_;
  while (!path.empty() && node->rhs.empty() && node->children.empty()) {
    auto [parent, attr] = path.back();
    path.pop_back();
    parent->children.erase(attr);
    node = parent;
  }
}

void FDTree::for_each(const std::function<void(AttributeSet, uint32_t)>& fn) const {
  for (const auto& [lhs, rhs] : all())
    rhs.for_each([&](uint32_t a) { fn(lhs, a); });
}

std::vector<std::pair<AttributeSet, AttributeSet>> FDTree::all() const {
  std::vector<std::pair<AttributeSet, AttributeSet>> out;
  std::function<void(const Node&, AttributeSet)> walk = [&](const Node& node,
                                                            AttributeSet path) {
    if (!node.rhs.empty()) out.emplace_back(path, node.rhs);
    for (const auto& [attr, child] : node.children) walk(child, path.with(attr));
  };
  walk(root_, AttributeSet{});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<AttributeSet, AttributeSet>> FDTree::level(
    uint32_t lhs_width) const {
  std::vector<std::pair<AttributeSet, AttributeSet>> out;
  for (auto& entry : all())
    if (entry.first.count() == lhs_width) out.push_back(entry);
  return out;
}

AttributeSet refinement_candidates(AttributeSet z, const FDTree& discovered) {
  AttributeSet out;
  z.for_each([&](uint32_t a) {
    if (!discovered.contains_generalization(z.without(a), a)) out.set(a);
  });
  return out;
}

AttributeSet emission_candidates(AttributeSet x, uint32_t width,
                                 const FDTree& discovered) {
  AttributeSet out;
  for (uint32_t a = 0; a < width; ++a) {
    if (x.test(a)) continue;
    if (!discovered.contains_generalization(x, a)) out.set(a);
  }
  return out;
}

std::vector<AttributeSet> generate_next_level(const std::vector<AttributeSet>& level) {
  std::unordered_set<AttributeSet, AttributeSetHash> present(level.begin(),
                                                             level.end());
  std::map<AttributeSet, std::vector<uint32_t>> groups;
  for (AttributeSet s : level) {
    if (s.empty()) continue;
    uint32_t top = s.highest();
    groups[s.without(top)].push_back(top);
  }
  std::vector<AttributeSet> next;
  for (auto& [prefix, tops] : groups) {
    std::sort(tops.begin(), tops.end());
    for (size_t i = 0; i < tops.size(); ++i) {
      for (size_t j = i + 1; j < tops.size(); ++j) {
        AttributeSet candidate = prefix.with(tops[i]).with(tops[j]);
        bool ok = true;
        candidate.for_each([&](uint32_t c) {
          if (!present.count(candidate.without(c))) ok = false;
        });
        if (ok) next.push_back(candidate);
      }
    }
  }
  std::sort(next.begin(), next.end());
  return next;
}

const LatticeNode* LatticeLevel::find(AttributeSet set) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), set,
      [](const LatticeNode& n, AttributeSet s) { return n.set < s; });
  if (it == nodes.end() || it->set != set) return nullptr;
  return &*it;
}

LatticeNode* LatticeLevel::find(AttributeSet set) {
  return const_cast<LatticeNode*>(std::as_const(*this).find(set));
}

LatticeLevel zero_level(uint32_t row_count) {
  LatticeLevel level;
  level.width = 0;
  LatticeNode node;
  node.class_count = row_count == 0 ? 0 : 1;
  level.nodes.push_back(std::move(node));
  return level;
}

LatticeLevel first_level(const Relation& r, bool keep_partitions,
                         bool keep_ordered) {
  LatticeLevel level;
  level.width = 1;
  for (uint32_t a = 0; a < r.column_count(); ++a) {
    LatticeNode node;
    node.set = AttributeSet::single(a);
    Partition p = gen_eq_class(node.set, r);
    node.class_count = p.class_count;
    if (keep_partitions) node.partition = std::move(p);
    if (keep_ordered) node.ordered = ordered_eq_classes(node.set, r);
    level.nodes.push_back(std::move(node));
  }
  return level;
}

OrderChecker local_order_checker(const Relation& r, const LatticeLevel& prev) {
  return [&r, &prev](const std::vector<OrderCheck>& checks) {
    std::vector<char> verdicts(checks.size(), 0);
    for (size_t i = 0; i < checks.size(); ++i) {
      const OrderCheck& c = checks[i];
      const LatticeNode* parent = prev.find(c.lhs);
      OrderedClasses local;
      const OrderedClasses* classes;
      if (parent && parent->ordered) {
        classes = &*parent->ordered;
      } else {
        local = ordered_eq_classes(c.lhs, r);
        classes = &local;
      }
      RefinementInput input;
      input.mode = RefinementMode::order_based;
      input.left_classes = classes;
      input.rhs_column = &r.column(c.rhs);
      input.direction = c.direction;
      verdicts[i] = check_refinement(input) ? 1 : 0;
    }
    return verdicts;
  };
}

std::vector<Dependency> compute_dependencies(LatticeLevel& level,
                                             const LatticeLevel& prev,
                                             PruneState& prune,
                                             uint32_t row_count,
                                             const OrderChecker& checker) {
  std::vector<Dependency> out;

  if (prune.kind == DepKind::od) {
    std::vector<OrderCheck> checks;
    for (LatticeNode& node : level.nodes) {
      node.rhs_candidates = AttributeSet{};
      node.is_key = node.class_count == row_count;
      if (level.width < 2) continue;
      node.set.for_each([&](uint32_t a) {
        AttributeSet lhs = node.set.without(a);
        bool asc = !prune.discovered.contains_generalization(lhs, a);
        bool desc = !prune.discovered_desc.contains_generalization(lhs, a);
        if (asc || desc) node.rhs_candidates.set(a);
        if (asc) checks.push_back({lhs, a, OdDirection::asc});
        if (desc) checks.push_back({lhs, a, OdDirection::desc});
      });
    }
    if (!checks.empty()) {
      if (!checker) throw ContractError("order checks need a checker");
      std::vector<char> verdicts = checker(checks);
      if (verdicts.size() != checks.size())
        throw ContractError("order checker returned a short verdict list");
      for (size_t i = 0; i < checks.size(); ++i) {
        if (!verdicts[i]) continue;
        const OrderCheck& c = checks[i];
        (c.direction == OdDirection::asc ? prune.discovered
                                         : prune.discovered_desc)
            .insert(c.lhs, c.rhs);
        out.push_back(Dependency::make_od(c.lhs, c.rhs, c.direction));
      }
    }
    return out;
  }

  if (prune.kind == DepKind::fd) {
    for (LatticeNode& node : level.nodes) {
      node.rhs_candidates = refinement_candidates(node.set, prune.discovered);
      node.rhs_candidates.for_each([&](uint32_t a) {
        AttributeSet lhs = node.set.without(a);
        const LatticeNode* parent = prev.find(lhs);
        if (!parent) throw ContractError("previous level is missing a parent set");
        if (parent->class_count == node.class_count) {
          prune.discovered.insert(lhs, a);
          out.push_back(Dependency::make_fd(lhs, a));
        }
      });
    }
  }

  for (LatticeNode& node : level.nodes) {
    node.is_key = node.class_count == row_count;
    if (!node.is_key) continue;
    prune.keys.push_back(node.set);
    if (prune.kind == DepKind::ucc) {
      if (!node.set.empty()) out.push_back(Dependency::make_ucc(node.set));
    } else {
      AttributeSet extras = emission_candidates(
          node.set, prune.discovered.width(), prune.discovered);
      extras.for_each([&](uint32_t a) {
        prune.discovered.insert(node.set, a);
        out.push_back(Dependency::make_fd(node.set, a));
      });
    }
  }
  return out;
}

std::vector<AttributeSet> live_sets(const LatticeLevel& level,
                                    const PruneState& prune) {
  std::vector<AttributeSet> alive;
  for (const LatticeNode& node : level.nodes) {
    if (prune.kind != DepKind::od && node.is_key) continue;
    if (prune.kind == DepKind::fd &&
        refinement_candidates(node.set, prune.discovered).empty())
      continue;
    alive.push_back(node.set);
  }
  return alive;
}

std::vector<AttributeSet> generate_next(const LatticeLevel& level,
                                        const PruneState& prune) {
  return generate_next_level(live_sets(level, prune));
}

}  // namespace depdisc
