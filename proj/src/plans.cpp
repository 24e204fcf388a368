#include "depdisc/plans.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "depdisc/error.hpp"
#include "depdisc/lattice.hpp"
#include "depdisc/primitives.hpp"
#include "depdisc/rng.hpp"
#include "depdisc/wire.hpp"

namespace depdisc {

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "tane") return Algorithm::tane;
  if (s == "fastfds") return Algorithm::fastfds;
  if (s == "hyfd") return Algorithm::hyfd;
  if (s == "datadriven") return Algorithm::datadriven;
  throw InputError("unknown algorithm: " + s);
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tane: return "tane";
    case Algorithm::fastfds: return "fastfds";
    case Algorithm::hyfd: return "hyfd";
    case Algorithm::datadriven: return "datadriven";
  }
  return "?";
}

void validate_plan(const PlanConfig& config) {
  if (config.ldp != 1 && config.ldp != 2)
    throw InputError("ldp must be 1 or 2");
  switch (config.algo) {
    case Algorithm::tane:
      if (config.dep == DepKind::dc)
        throw InputError("denial constraints need the datadriven plan");
      break;
    case Algorithm::fastfds:
      if (config.dep != DepKind::fd)
        throw InputError("fastfds discovers fds; use datadriven for dcs");
      break;
    case Algorithm::hyfd:
      if (config.dep != DepKind::fd && config.dep != DepKind::ucc)
        throw InputError("hyfd discovers fds and uccs");
      break;
    case Algorithm::datadriven:
      if (config.dep != DepKind::dc)
        throw InputError("the datadriven plan discovers denial constraints");
      break;
  }
}

PhaseCostEstimate estimate_phase_costs(uint64_t n, uint32_t m, uint32_t k,
                                       uint64_t candidates,
                                       uint64_t residual_bytes, double lambda) {
  if (k == 0) throw ContractError("zero workers");
  PhaseCostEstimate est;
  double group = static_cast<double>(n) / k;
  est.data_driven =
      2.0 * static_cast<double>(n) * m / k + lambda * m * group * group;
  est.schema_driven = static_cast<double>(residual_bytes) +
                      lambda * static_cast<double>(candidates) * n;
  return est;
}

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return b ? (a + b - 1) / b : 0; }

void append(std::vector<Dependency>& into, std::vector<Dependency>&& more) {
  for (auto& d : more) into.push_back(std::move(d));
}

/// Distinct evidence sets in first-seen order.
struct EvidenceStore {
  std::vector<EvidenceSet> sets;
  std::unordered_set<Bitset, BitsetHash> seen;

  bool add(const EvidenceSet& ev) {
    if (!seen.insert(ev).second) return false;
    sets.push_back(ev);
    return true;
  }
  uint64_t size() const { return sets.size(); }
};

/// What one worker ships after comparing its pairs: locally distinct
/// evidence, in discovery order.
struct LocalEvidence {
  std::vector<EvidenceSet> distinct;
  uint64_t pairs = 0;
  std::unordered_set<Bitset, BitsetHash> seen;

  void note(const EvidenceSet& ev) {
    if (seen.insert(ev).second) distinct.push_back(ev);
  }
};

/// Shared plan scaffolding: the metered cluster plus result bookkeeping.
struct Runner {
  const Relation& r;
  const PlanConfig& cfg;
  Cluster cluster;
  DiscoveryResult out;
  uint32_t n, m, k;
  bool sm;

  Runner(const Relation& rel, const PlanConfig& config)
      : r(rel),
        cfg(config),
        cluster(config.cluster),
        n(rel.row_count()),
        m(rel.column_count()),
        k(config.cluster.workers),
        sm(config.cluster.memory_budget > 0) {}

  uint64_t budget() const { return cfg.cluster.memory_budget; }

  void trace(std::string phase, uint64_t rounds) {
    out.phase_trace.push_back({std::move(phase), rounds});
  }

  DiscoveryResult finish(std::vector<Dependency> deps) {
    sort_canonical(deps, r.attribute_names());
    out.dependencies = std::move(deps);
    out.ledger = cluster.ledger();
    return std::move(out);
  }
};

template <typename R>
std::vector<std::function<R(WorkerCtx&)>> idle_tasks(uint32_t k) {
  return std::vector<std::function<R(WorkerCtx&)>>(
      k, [](WorkerCtx&) { return R{}; });
}

/// Smallest chunk count >= floor_l whose per-chunk payload of `items`
/// entries of `per_item` bytes fits half the budget. Zero budget keeps
/// floor_l; an item that cannot fit alone is refused.
uint32_t streaming_chunks(uint32_t items, uint64_t per_item, uint32_t floor_l,
                          uint64_t budget) {
  if (budget == 0 || items == 0) return floor_l;
  uint64_t half = budget / 2;
  if (half <= wire::kLengthPrefix || per_item > half - wire::kLengthPrefix)
    throw LimitError("memory budget below a single streamed item");
  uint64_t max_items = (half - wire::kLengthPrefix) / per_item;
  uint32_t l = static_cast<uint32_t>(
      std::max<uint64_t>(floor_l, ceil_div(items, max_items)));
  return std::min(l, items);
}

/// Refines left's value-ordered classes by right's. The two sides share all
/// attributes but their last, so the result equals ordered_eq_classes of
/// the union.
OrderedClasses refine_ordered(const OrderedClasses& left,
                              const OrderedClasses& right, uint32_t n) {
  std::vector<uint32_t> ordinal(n, 0);
  for (uint32_t ci = 0; ci < right.classes.size(); ++ci)
    for (uint32_t row : right.classes[ci]) ordinal[row] = ci;
  OrderedClasses out;
  out.attribute_set = left.attribute_set.united(right.attribute_set);
  for (const auto& cls : left.classes) {
    std::map<uint32_t, std::vector<uint32_t>> buckets;
    for (uint32_t row : cls) buckets[ordinal[row]].push_back(row);
    for (auto& [o, rows] : buckets) out.classes.push_back(std::move(rows));
  }
  return out;
}

uint64_t hash_row_codes(const Relation& r, const std::vector<uint32_t>& attrs,
                        uint32_t row) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint32_t a : attrs) {
    h ^= r.code(row, a) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// ordered_eq_classes by hash exchange: rows hash on their X codes to k
/// reducers, reducers emit classes keyed by code vector, the driver merges
/// them back into value order. Identical to the local computation.
OrderedClasses distributed_ordered_classes(AttributeSet x, const Relation& r,
                                           Cluster& cluster,
                                           const std::string& name) {
  uint32_t k = cluster.workers();
  uint32_t n = r.row_count();
  std::vector<uint32_t> attrs = x.to_indices();

  Stage stage(cluster, name);
  std::vector<uint32_t> sources = scatter_round_robin(n, k);
  std::vector<uint32_t> reducer_of(n);
  for (uint32_t row = 0; row < n; ++row) {
    reducer_of[row] = static_cast<uint32_t>(hash_row_codes(r, attrs, row) % k);
    stage.add_work(sources[row], 1);
    stage.charge(reducer_of[row], wire::kRowId + wire::kCode * attrs.size());
  }

  using Groups = std::map<std::vector<uint32_t>, std::vector<uint32_t>>;
  std::vector<std::function<Groups(WorkerCtx&)>> tasks;
  tasks.reserve(k);
  for (uint32_t w = 0; w < k; ++w) {
    tasks.push_back([&, w](WorkerCtx& ctx) {
      Groups groups;
      std::vector<uint32_t> key(attrs.size());
      for (uint32_t row = 0; row < n; ++row) {
        if (reducer_of[row] != w) continue;
        ctx.add_work(1);
        for (size_t i = 0; i < attrs.size(); ++i)
          key[i] = r.code(row, attrs[i]);
        groups[key].push_back(row);
      }
      return groups;
    });
  }
  auto per_worker = stage.run(tasks);
  Groups merged;
  for (uint32_t w = 0; w < k; ++w) {
    for (auto& [key, rows] : per_worker[w]) {
      stage.charge(w, wire::kCode * attrs.size() +
                          wire::row_id_list_bytes(rows.size()));
      merged[key] = std::move(rows);
    }
  }
  stage.finish();

  OrderedClasses out;
  out.attribute_set = x;
  for (auto& [key, rows] : merged) out.classes.push_back(std::move(rows));
  return out;
}

// ---------------------------------------------------------------------------
// Level-wise lattice plans.

struct TaneLevelInfo {
  LatticeLevel level;
  std::map<AttributeSet, uint32_t> owner;
};

/// Level 1. LDP1 ships each column to a round-robin owner that builds and
/// keeps the class payload; under a budget the classes arrive by hash
/// exchange and gather at the owner. LDP2 recomputes counts from the
/// broadcast relation and ships only (set, count) pairs; its order variant
/// tracks bare sets and needs no stage at all.
TaneLevelInfo tane_first_level(Runner& ctx, const BroadcastHandle& rel,
                               bool ldp1, bool od) {
  TaneLevelInfo info;
  info.level.width = 1;
  uint32_t n = ctx.n, m = ctx.m, k = ctx.k;

  if (!ldp1 && od) {
    for (uint32_t a = 0; a < m; ++a) {
      LatticeNode node;
      node.set = AttributeSet::single(a);
      info.level.nodes.push_back(std::move(node));
    }
    return info;
  }

  if (ldp1 && ctx.sm) {
    for (uint32_t a = 0; a < m; ++a) {
      LatticeNode node;
      node.set = AttributeSet::single(a);
      if (od) {
        node.ordered = distributed_ordered_classes(node.set, ctx.r,
                                                   ctx.cluster, "level-1");
      } else {
        node.partition =
            distributed_group_by(node.set, ctx.r, ctx.cluster, "level-1");
      }
      info.owner[node.set] = a % k;
      info.level.nodes.push_back(std::move(node));
    }
    Stage gather(ctx.cluster, "level-1-gather");
    for (LatticeNode& node : info.level.nodes) {
      uint32_t a = node.set.highest();
      if (od) {
        node.class_count = node.ordered->classes.size();
        gather.charge(a % k, wire::ordered_classes_bytes(*node.ordered));
      } else {
        node.class_count = node.partition->class_count;
        gather.charge(a % k, wire::partition_bytes(*node.partition));
      }
    }
    gather.finish();
    return info;
  }

  struct ColumnResult {
    std::vector<std::pair<uint32_t, LatticeNode>> nodes;
  };
  Stage stage(ctx.cluster, "level-1");
  std::vector<std::vector<uint32_t>> assigned(k);
  for (uint32_t a = 0; a < m; ++a) {
    uint32_t w = a % k;
    assigned[w].push_back(a);
    if (ldp1) {
      stage.charge(w, wire::column_bytes(n));
    } else {
      stage.charge_broadcast(rel, w);
    }
    stage.add_work(w, n);
    stage.charge(w, wire::node_count_bytes());
    info.owner[AttributeSet::single(a)] = w;
  }
  auto tasks = idle_tasks<ColumnResult>(k);
  for (uint32_t w = 0; w < k; ++w) {
    tasks[w] = [&ctx, &assigned, ldp1, od, w](WorkerCtx&) {
      ColumnResult res;
      for (uint32_t a : assigned[w]) {
        LatticeNode node;
        node.set = AttributeSet::single(a);
        if (od) {
          node.ordered = ordered_eq_classes(node.set, ctx.r);
          node.class_count = node.ordered->classes.size();
        } else {
          Partition p = gen_eq_class(node.set, ctx.r);
          node.class_count = p.class_count;
          if (ldp1) node.partition = std::move(p);
        }
        res.nodes.emplace_back(a, std::move(node));
      }
      return res;
    };
  }
  auto results = stage.run(tasks);
  stage.finish();
  std::map<uint32_t, LatticeNode> by_attr;
  for (auto& res : results)
    for (auto& [a, node] : res.nodes) by_attr[a] = std::move(node);
  for (auto& [a, node] : by_attr) info.level.nodes.push_back(std::move(node));
  return info;
}

/// Levels above 1. LDP1 chunks the live parents, ships chunk pairs to the
/// triangle workers (round-robin streamed chunks under a budget) and
/// intersects there; LDP2 recomputes each candidate's count from the
/// broadcast relation; LDP2 order tracking stays driver-side.
TaneLevelInfo tane_next_level(Runner& ctx, const TaneLevelInfo& parents,
                              const std::vector<AttributeSet>& live,
                              const std::vector<AttributeSet>& candidates,
                              uint32_t width, const BroadcastHandle& rel,
                              bool ldp1, bool od) {
  TaneLevelInfo info;
  info.level.width = width;
  if (candidates.empty()) return info;
  uint32_t n = ctx.n, k = ctx.k;
  std::string name = "level-" + std::to_string(width);

  if (!ldp1) {
    if (od) {
      for (AttributeSet set : candidates) {
        LatticeNode node;
        node.set = set;
        info.level.nodes.push_back(std::move(node));
      }
      return info;
    }
    Stage stage(ctx.cluster, name);
    struct CountResult {
      std::vector<std::pair<AttributeSet, uint64_t>> counts;
    };
    std::vector<std::vector<AttributeSet>> assigned(k);
    for (size_t i = 0; i < candidates.size(); ++i) {
      uint32_t w = static_cast<uint32_t>(i % k);
      assigned[w].push_back(candidates[i]);
      stage.charge_broadcast(rel, w);
      stage.add_work(w, uint64_t{n} * width);
      stage.charge(w, wire::node_count_bytes());
    }
    auto tasks = idle_tasks<CountResult>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &assigned, w](WorkerCtx&) {
        CountResult res;
        for (AttributeSet set : assigned[w])
          res.counts.emplace_back(set, gen_eq_class(set, ctx.r).class_count);
        return res;
      };
    }
    auto results = stage.run(tasks);
    stage.finish();
    std::map<AttributeSet, uint64_t> counts;
    for (auto& res : results)
      for (auto& [set, count] : res.counts) counts[set] = count;
    for (AttributeSet set : candidates) {
      LatticeNode node;
      node.set = set;
      node.class_count = counts.at(set);
      info.level.nodes.push_back(std::move(node));
    }
    return info;
  }

  std::map<AttributeSet, uint32_t> parent_pos;
  for (uint32_t i = 0; i < live.size(); ++i) parent_pos[live[i]] = i;
  auto payload_bytes = [&](AttributeSet set) {
    const LatticeNode* node = parents.level.find(set);
    if (!node) throw ContractError("live parent missing from previous level");
    return od ? wire::ordered_classes_bytes(*node->ordered)
              : wire::partition_bytes(*node->partition);
  };

  TriangleLayout layout = TriangleLayout::make(k);
  uint32_t l = layout.l;
  if (ctx.sm) {
    uint64_t max_item = 0;
    for (AttributeSet set : live)
      max_item = std::max(max_item, payload_bytes(set));
    l = streaming_chunks(static_cast<uint32_t>(live.size()), max_item, l,
                         ctx.budget());
  }
  auto ranges = chunk_ranges(static_cast<uint32_t>(live.size()), l);
  std::vector<uint64_t> chunk_bytes(l, 0);
  std::vector<uint32_t> chunk_of(live.size(), 0);
  for (uint32_t c = 0; c < l; ++c)
    for (uint32_t i = ranges[c].first; i < ranges[c].second; ++i) {
      chunk_of[i] = c;
      chunk_bytes[c] += payload_bytes(live[i]);
    }

  std::map<std::pair<uint32_t, uint32_t>, uint32_t> pair_worker;
  for (uint32_t w = 0; w < layout.assignments.size(); ++w)
    pair_worker[layout.assignments[w]] = w;

  struct CandidateJob {
    AttributeSet set;
    AttributeSet left, right;
  };
  std::map<std::pair<uint32_t, uint32_t>, std::vector<CandidateJob>> by_pair;
  for (AttributeSet set : candidates) {
    AttributeSet left = set.without(set.highest());
    AttributeSet right = set.without(left.highest());
    uint32_t cl = chunk_of[parent_pos.at(left)] + 1;
    uint32_t cr = chunk_of[parent_pos.at(right)] + 1;
    auto key = std::minmax(cl, cr);
    by_pair[{key.first, key.second}].push_back({set, left, right});
  }

  Stage stage(ctx.cluster, name);
  BroadcastHandle alive = ctx.cluster.broadcast(
      "alive-" + std::to_string(width), wire::kAttributeSet * live.size());
  std::vector<std::vector<CandidateJob>> jobs(k);
  uint32_t next_rr = 0;
  for (auto& [pq, list] : by_pair) {
    uint32_t w;
    auto it = pair_worker.find(pq);
    if (!ctx.sm && it != pair_worker.end()) {
      w = it->second;
    } else {
      w = next_rr++ % k;
    }
    stage.charge_broadcast(alive, w);
    stage.charge(w, wire::kLengthPrefix + chunk_bytes[pq.first - 1]);
    if (pq.second != pq.first)
      stage.charge(w, wire::kLengthPrefix + chunk_bytes[pq.second - 1]);
    for (const CandidateJob& job : list) {
      const LatticeNode* left = parents.level.find(job.left);
      const LatticeNode* right = parents.level.find(job.right);
      uint64_t cost = od ? uint64_t{left->ordered->total_rows()} +
                               right->ordered->total_rows()
                         : uint64_t{left->partition->stored_rows()} +
                               right->partition->stored_rows();
      stage.add_work(w, cost);
      stage.charge(w, wire::node_count_bytes());
      jobs[w].push_back(job);
    }
  }
  struct NodeResult {
    std::vector<LatticeNode> nodes;
  };
  auto tasks = idle_tasks<NodeResult>(k);
  for (uint32_t w = 0; w < k; ++w) {
    tasks[w] = [&ctx, &parents, &jobs, od, n, w](WorkerCtx&) {
      NodeResult res;
      for (const CandidateJob& job : jobs[w]) {
        const LatticeNode* left = parents.level.find(job.left);
        const LatticeNode* right = parents.level.find(job.right);
        LatticeNode node;
        node.set = job.set;
        if (od) {
          node.ordered = refine_ordered(*left->ordered, *right->ordered, n);
          node.class_count = node.ordered->classes.size();
        } else {
          node.partition =
              intersect_partitions(*left->partition, *right->partition, n);
          node.class_count = node.partition->class_count;
        }
        res.nodes.push_back(std::move(node));
      }
      return res;
    };
  }
  auto results = stage.run(tasks);
  stage.finish();
  for (uint32_t w = 0; w < k; ++w)
    for (auto& node : results[w].nodes) {
      info.owner[node.set] = w;
      info.level.nodes.push_back(std::move(node));
    }
  std::sort(info.level.nodes.begin(), info.level.nodes.end(),
            [](const LatticeNode& a, const LatticeNode& b) {
              return a.set < b.set;
            });
  return info;
}

/// Stage-backed order checks. LDP1 verifies at the worker holding the LHS
/// classes and broadcasts the RHS column there. LDP2 recomputes the classes
/// from the broadcast relation, or hash exchanges them once per LHS under a
/// budget.
OrderChecker staged_order_checker(Runner& ctx, const TaneLevelInfo& parents,
                                  const BroadcastHandle& rel, bool ldp1,
                                  uint32_t width, uint64_t& check_count) {
  return [&ctx, &parents, rel, ldp1, width,
          &check_count](const std::vector<OrderCheck>& checks) {
    uint32_t k = ctx.k, n = ctx.n;
    check_count += checks.size();
    std::string name = "od-checks-" + std::to_string(width);
    std::map<AttributeSet, OrderedClasses> shipped;
    if (!ldp1 && ctx.sm) {
      for (const OrderCheck& c : checks)
        if (!shipped.count(c.lhs))
          shipped.emplace(c.lhs, distributed_ordered_classes(
                                     c.lhs, ctx.r, ctx.cluster, name));
    }
    Stage stage(ctx.cluster, name);
    std::vector<std::vector<uint32_t>> assigned(k);
    for (uint32_t i = 0; i < checks.size(); ++i) {
      const OrderCheck& c = checks[i];
      uint32_t w;
      if (ldp1) {
        auto it = parents.owner.find(c.lhs);
        if (it == parents.owner.end())
          throw ContractError("order check against an unmaterialized node");
        w = it->second;
        stage.add_work(w, n);
      } else if (ctx.sm) {
        w = i % k;
        stage.charge(w, wire::ordered_classes_bytes(shipped.at(c.lhs)));
        stage.add_work(w, n);
      } else {
        w = i % k;
        stage.charge_broadcast(rel, w);
        stage.add_work(w, 2 * uint64_t{n});
      }
      if (ldp1 || ctx.sm)
        stage.charge_broadcast(
            ctx.cluster.broadcast("col-" + std::to_string(c.rhs),
                                  wire::column_bytes(n)),
            w);
      assigned[w].push_back(i);
    }
    struct Verdicts {
      std::vector<std::pair<uint32_t, char>> flags;
    };
    auto tasks = idle_tasks<Verdicts>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &parents, &checks, &assigned, &shipped, ldp1,
                  w](WorkerCtx&) {
        Verdicts v;
        for (uint32_t idx : assigned[w]) {
          const OrderCheck& c = checks[idx];
          OrderedClasses local;
          const OrderedClasses* classes = nullptr;
          if (ldp1) {
            classes = &*parents.level.find(c.lhs)->ordered;
          } else if (ctx.sm) {
            classes = &shipped.at(c.lhs);
          } else {
            local = ordered_eq_classes(c.lhs, ctx.r);
            classes = &local;
          }
          RefinementInput input;
          input.mode = RefinementMode::order_based;
          input.left_classes = classes;
          input.rhs_column = &ctx.r.column(c.rhs);
          input.direction = c.direction;
          v.flags.emplace_back(idx, check_refinement(input) ? 1 : 0);
        }
        return v;
      };
    }
    auto results = stage.run(tasks);
    stage.finish();
    std::vector<char> verdicts(checks.size(), 0);
    for (auto& res : results)
      for (auto& [idx, flag] : res.flags) verdicts[idx] = flag;
    return verdicts;
  };
}

}  // namespace

DiscoveryResult run_tane(const Relation& r, const PlanConfig& cfg) {
  Runner ctx(r, cfg);
  const bool ldp1 = cfg.ldp == 1;
  const bool od = cfg.dep == DepKind::od;
  uint32_t n = ctx.n, m = ctx.m;

  PruneState prune(cfg.dep, m);
  std::vector<Dependency> deps;
  uint64_t total_nodes = 0;
  uint64_t order_checks = 0;
  BroadcastHandle rel =
      ctx.cluster.broadcast("relation", wire::relation_bytes(n, m));

  TaneLevelInfo prev;
  prev.level = zero_level(n);
  if (cfg.dep == DepKind::fd) {
    append(deps, compute_dependencies(prev.level, prev.level, prune, n));
    if (prev.level.nodes[0].is_key) {
      ctx.trace("level-0", 1);
      ctx.out.counts["levels"] = 0;
      ctx.out.counts["nodes"] = 1;
      return ctx.finish(std::move(deps));
    }
  }

  TaneLevelInfo current = tane_first_level(ctx, rel, ldp1, od);
  uint32_t width = 1;
  uint64_t levels = 0;
  while (true) {
    uint64_t checks_before = order_checks;
    if (od) {
      OrderChecker checker =
          staged_order_checker(ctx, prev, rel, ldp1, width, order_checks);
      append(deps, compute_dependencies(current.level, prev.level, prune, n,
                                        checker));
    } else {
      append(deps, compute_dependencies(current.level, prev.level, prune, n));
    }
    ++levels;
    total_nodes += current.level.nodes.size();
    ctx.trace("level-" + std::to_string(width), current.level.nodes.size());

    if (width == m) break;
    if (od && width >= 2 && order_checks == checks_before) break;
    std::vector<AttributeSet> live = live_sets(current.level, prune);
    std::vector<AttributeSet> candidates = generate_next_level(live);
    if (candidates.empty()) break;
    TaneLevelInfo next = tane_next_level(ctx, current, live, candidates,
                                         width + 1, rel, ldp1, od);
    prev = std::move(current);
    current = std::move(next);
    ++width;
  }

  ctx.out.counts["levels"] = levels;
  ctx.out.counts["nodes"] = total_nodes;
  if (od) ctx.out.counts["order_checks"] = order_checks;
  return ctx.finish(std::move(deps));
}

// ---------------------------------------------------------------------------
// Evidence-first plans.

namespace {

/// Marks unordered row pairs, to detect pairs no block comparison covered.
struct PairCoverage {
  uint64_t n;
  std::vector<uint64_t> words;
  uint64_t marked = 0;

  explicit PairCoverage(uint64_t rows)
      : n(rows), words(rows < 2 ? 0 : (rows * (rows - 1) / 2 + 63) / 64, 0) {}

  uint64_t total() const { return n < 2 ? 0 : n * (n - 1) / 2; }

  void mark(uint64_t i, uint64_t j) {
    uint64_t idx = i * n - i * (i + 1) / 2 + (j - i - 1);
    uint64_t& w = words[idx >> 6];
    uint64_t bit = uint64_t{1} << (idx & 63);
    if (!(w & bit)) {
      w |= bit;
      ++marked;
    }
  }
};

struct CompareSlice {
  std::pair<uint32_t, uint32_t> left, right;
  bool diagonal = false;
};

/// Splits one block-compare task into slices whose two shipped row lists
/// each fit half the budget: a sub-triangle for diagonal tasks, a grid for
/// cross tasks.
std::vector<CompareSlice> split_task_for_budget(const BlockCompareTask& task,
                                                uint32_t m, uint64_t budget) {
  auto subranges = [&](std::pair<uint32_t, uint32_t> range) {
    uint32_t len = range.second - range.first;
    uint32_t parts =
        std::max(1u, streaming_chunks(len, wire::row_bytes(m), 1, budget));
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (auto [b, e] : chunk_ranges(len, parts))
      out.emplace_back(range.first + b, range.first + e);
    return out;
  };
  std::vector<CompareSlice> slices;
  if (task.diagonal) {
    auto subs = subranges(task.left_range);
    for (size_t i = 0; i < subs.size(); ++i) {
      slices.push_back({subs[i], subs[i], true});
      for (size_t j = i + 1; j < subs.size(); ++j)
        slices.push_back({subs[i], subs[j], false});
    }
  } else {
    auto lefts = subranges(task.left_range);
    auto rights = subranges(task.right_range);
    for (auto& a : lefts)
      for (auto& b : rights) slices.push_back({a, b, false});
  }
  return slices;
}

}  // namespace

DiscoveryResult run_fastfds(const Relation& r, const PlanConfig& cfg) {
  Runner ctx(r, cfg);
  uint32_t n = ctx.n, m = ctx.m, k = ctx.k;
  const bool dc = cfg.dep == DepKind::dc;
  PredicateSpace space = PredicateSpace::make(
      dc ? SpaceMode::dc_full : SpaceMode::fd_inequality, r);
  EvidenceStore store;
  uint64_t pair_comparisons = 0;

  const bool all_pairs = dc || cfg.ldp == 2;
  if (all_pairs) {
    TriangleLayout layout = TriangleLayout::make(k);
    uint32_t l = std::max(
        1u, ctx.sm
                ? streaming_chunks(n, wire::row_bytes(m), layout.l, ctx.budget())
                : layout.l);
    std::vector<Chunk> chunks = make_chunks(n, l, wire::row_bytes(m));
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> pair_worker;
    for (uint32_t w = 0; w < layout.assignments.size(); ++w)
      pair_worker[layout.assignments[w]] = w;

    Stage stage(ctx.cluster, "evidence");
    struct PairTask {
      Chunk left, right;
    };
    std::vector<std::vector<PairTask>> jobs(k);
    uint32_t rr = 0;
    uint64_t tasks_issued = 0;
    for (uint32_t p = 1; p <= l; ++p) {
      for (uint32_t q = p; q <= l; ++q) {
        auto it = pair_worker.find({p, q});
        uint32_t w = (!ctx.sm && it != pair_worker.end()) ? it->second
                                                          : rr++ % k;
        stage.charge(w, chunks[p - 1].byte_size);
        if (q != p) stage.charge(w, chunks[q - 1].byte_size);
        uint64_t lp = chunks[p - 1].range.second - chunks[p - 1].range.first;
        uint64_t lq = chunks[q - 1].range.second - chunks[q - 1].range.first;
        stage.add_work(w, p == q ? lp * (lp - 1) / 2 : lp * lq);
        jobs[w].push_back({chunks[p - 1], chunks[q - 1]});
        ++tasks_issued;
      }
    }
    auto tasks = idle_tasks<LocalEvidence>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &jobs, &space, dc, w](WorkerCtx&) {
        LocalEvidence local;
        for (const PairTask& t : jobs[w]) {
          bool diag = t.left.id == t.right.id;
          for (uint32_t i = t.left.range.first; i < t.left.range.second; ++i) {
            uint32_t jb = diag ? i + 1 : t.right.range.first;
            for (uint32_t j = jb; j < t.right.range.second; ++j) {
              EvidenceSet ev = gen_ev_set(i, j, ctx.r, space);
              local.note(ev);
              if (dc) local.note(mirror_evidence(ev, space));
              ++local.pairs;
            }
          }
        }
        return local;
      };
    }
    auto results = stage.run(tasks);
    for (uint32_t w = 0; w < k; ++w) {
      pair_comparisons += results[w].pairs;
      for (const EvidenceSet& ev : results[w].distinct) {
        stage.charge(w, wire::evidence_bytes(space.size()));
        store.add(ev);
      }
    }
    stage.finish();
    ctx.trace("evidence", tasks_issued);
  } else {
    std::vector<Partition> partitions;
    if (ctx.sm) {
      for (uint32_t a = 0; a < m; ++a)
        partitions.push_back(distributed_group_by(
            AttributeSet::single(a), ctx.r, ctx.cluster, "blocking"));
    } else {
      Stage stage(ctx.cluster, "blocking");
      std::vector<std::vector<uint32_t>> assigned(k);
      for (uint32_t a = 0; a < m; ++a) {
        uint32_t w = a % k;
        stage.charge(w, wire::column_bytes(n));
        stage.add_work(w, n);
        assigned[w].push_back(a);
      }
      struct Parts {
        std::vector<std::pair<uint32_t, Partition>> parts;
      };
      auto tasks = idle_tasks<Parts>(k);
      for (uint32_t w = 0; w < k; ++w) {
        tasks[w] = [&ctx, &assigned, w](WorkerCtx&) {
          Parts res;
          for (uint32_t a : assigned[w])
            res.parts.emplace_back(
                a, gen_eq_class(AttributeSet::single(a), ctx.r));
          return res;
        };
      }
      auto results = stage.run(tasks);
      std::map<uint32_t, Partition> by_attr;
      for (auto& res : results)
        for (auto& [a, p] : res.parts) by_attr[a] = std::move(p);
      for (auto& [a, p] : by_attr) {
        stage.charge(a % k, wire::partition_bytes(p));
        partitions.push_back(std::move(p));
      }
      stage.finish();
    }

    std::vector<const EquivalenceClass*> blocks;
    for (const Partition& p : partitions)
      for (const EquivalenceClass& c : p.classes) blocks.push_back(&c);
    auto plan = block_distribute(blocks, k);

    Stage stage(ctx.cluster, "evidence");
    std::vector<std::vector<std::pair<uint32_t, CompareSlice>>> worker_slices(k);
    for (uint32_t w = 0; w < k; ++w) {
      std::set<std::pair<uint32_t, std::pair<uint32_t, uint32_t>>> charged;
      for (const BlockCompareTask& task : plan[w]) {
        std::vector<CompareSlice> slices =
            ctx.sm ? split_task_for_budget(task, m, ctx.budget())
                   : std::vector<CompareSlice>{
                         {task.left_range, task.right_range, task.diagonal}};
        for (const CompareSlice& slice : slices) {
          auto charge_range = [&](std::pair<uint32_t, uint32_t> range) {
            uint64_t bytes =
                wire::row_list_bytes(range.second - range.first, m);
            if (ctx.sm || charged.insert({task.block, range}).second)
              stage.charge(w, bytes);
          };
          charge_range(slice.left);
          if (!slice.diagonal) charge_range(slice.right);
          uint64_t len_l = slice.left.second - slice.left.first;
          uint64_t len_r = slice.right.second - slice.right.first;
          stage.add_work(
              w, slice.diagonal ? len_l * (len_l - 1) / 2 : len_l * len_r);
          worker_slices[w].push_back({task.block, slice});
        }
      }
    }
    auto tasks = idle_tasks<LocalEvidence>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &space, &blocks, &worker_slices, w](WorkerCtx&) {
        LocalEvidence local;
        for (auto& [block, slice] : worker_slices[w]) {
          const std::vector<uint32_t>& rows = blocks[block]->rows;
          auto compare = [&](uint32_t pi, uint32_t pj) {
            uint32_t i = rows[pi], j = rows[pj];
            if (i > j) std::swap(i, j);
            local.note(gen_ev_set(i, j, ctx.r, space));
            ++local.pairs;
          };
          if (slice.diagonal) {
            for (uint32_t a = slice.left.first; a < slice.left.second; ++a)
              for (uint32_t b = a + 1; b < slice.left.second; ++b)
                compare(a, b);
          } else {
            for (uint32_t a = slice.left.first; a < slice.left.second; ++a)
              for (uint32_t b = slice.right.first; b < slice.right.second; ++b)
                compare(a, b);
          }
        }
        return local;
      };
    }
    auto results = stage.run(tasks);
    for (uint32_t w = 0; w < k; ++w) {
      pair_comparisons += results[w].pairs;
      for (const EvidenceSet& ev : results[w].distinct) {
        stage.charge(w, wire::evidence_bytes(space.size()));
        store.add(ev);
      }
    }
    stage.finish();

    // A pair no block covered differs on every attribute, so its exact
    // evidence set is the full one.
    if (n >= 2) {
      PairCoverage coverage(n);
      for (uint32_t w = 0; w < k; ++w)
        for (auto& [block, slice] : worker_slices[w]) {
          const std::vector<uint32_t>& rows = blocks[block]->rows;
          auto mark = [&](uint32_t pa, uint32_t pb) {
            uint32_t i = rows[pa], j = rows[pb];
            if (i > j) std::swap(i, j);
            coverage.mark(i, j);
          };
          if (slice.diagonal) {
            for (uint32_t a = slice.left.first; a < slice.left.second; ++a)
              for (uint32_t b = a + 1; b < slice.left.second; ++b) mark(a, b);
          } else {
            for (uint32_t a = slice.left.first; a < slice.left.second; ++a)
              for (uint32_t b = slice.right.first; b < slice.right.second; ++b)
                mark(a, b);
          }
        }
      if (coverage.marked < coverage.total()) {
        Bitset full(space.size());
        for (uint32_t i = 0; i < space.size(); ++i) full.set(i);
        store.add(full);
        ctx.out.counts["full_evidence_injected"] = 1;
      }
    }
    ctx.trace("blocking", blocks.size());
    ctx.trace("evidence", pair_comparisons);
  }

  std::vector<Dependency> deps =
      dc ? dcs_from_evidence(store.sets, space, cfg.keep_trivial)
         : fds_from_evidence(store.sets, m);
  ctx.trace("covers", dc ? 1 : m);
  ctx.out.counts["pair_comparisons"] = pair_comparisons;
  ctx.out.counts["evidence_sets"] = store.size();
  return ctx.finish(std::move(deps));
}

// ---------------------------------------------------------------------------
// Hybrid plan.

namespace {

AttributeSet attrs_of(const Bitset& ev) {
  AttributeSet out;
  ev.for_each([&](uint32_t a) { out.set(a); });
  return out;
}

/// Removes every candidate the difference set violates and reinserts all
/// non-dominated extensions. Returns the number of tree modifications.
/// Re-applying known evidence is a no-op.
uint64_t apply_evidence(FDTree& tree, const Bitset& ev, DepKind dep) {
  AttributeSet diff = attrs_of(ev);
  std::vector<std::pair<AttributeSet, uint32_t>> violated;
  for (auto& [lhs, bits] : tree.all()) {
    if (lhs.intersects(diff)) continue;
    AttributeSet rhs_bits = bits;
    AttributeSet lhs_copy = lhs;
    rhs_bits.for_each([&](uint32_t rhs) {
      if (dep == DepKind::fd && !diff.test(rhs)) return;
      violated.emplace_back(lhs_copy, rhs);
    });
  }
  uint64_t mods = 0;
  for (auto& [lhs, rhs] : violated) {
    tree.remove(lhs, rhs);
    ++mods;
    AttributeSet lhs_copy = lhs;
    uint32_t rhs_copy = rhs;
    diff.for_each([&](uint32_t b) {
      if (lhs_copy.test(b)) return;
      if (dep == DepKind::fd && b == rhs_copy) return;
      if (tree.insert(lhs_copy.with(b), dep == DepKind::fd ? rhs_copy : 0))
        ++mods;
    });
  }
  return mods;
}

}  // namespace

DiscoveryResult run_hyfd(const Relation& r, const PlanConfig& cfg) {
  Runner ctx(r, cfg);
  uint32_t n = ctx.n, m = ctx.m, k = ctx.k;
  const bool fd = cfg.dep == DepKind::fd;
  const bool ldp1 = cfg.ldp == 1;
  PredicateSpace space = PredicateSpace::make(SpaceMode::fd_inequality, r);
  BroadcastHandle rel =
      ctx.cluster.broadcast("relation", wire::relation_bytes(n, m));

  FDTree tree(m);
  for (uint32_t a = 0; a < m; ++a) {
    if (fd)
      tree.insert(AttributeSet{}, a);
    else
      tree.insert(AttributeSet::single(a), 0);
  }

  EvidenceStore store;
  uint64_t pair_comparisons = 0;
  uint64_t sampling_rounds = 0;
  uint64_t validations = 0;
  uint64_t violations = 0;
  uint64_t group_pairs_used = 0;
  std::set<uint32_t> rel_cached;

  // Focused sampling state: per-attribute partitions and comparison windows.
  std::vector<Partition> attr_partitions;
  std::vector<uint32_t> windows(m, 1);
  std::vector<uint64_t> last_mods(m, 0);
  std::vector<char> sampled(m, 0);
  std::set<std::tuple<uint32_t, uint32_t, uint32_t>> charged_classes;

  // Group-pair sampling state.
  uint32_t groups = std::max<uint32_t>(1, std::min(k, std::max(n, 1u)));
  std::vector<std::vector<uint32_t>> group_rows;
  std::vector<std::pair<uint32_t, uint32_t>> pair_queue;
  size_t pair_next = 0;

  if (ldp1 && n > 0) {
    if (ctx.sm) {
      for (uint32_t a = 0; a < m; ++a)
        attr_partitions.push_back(distributed_group_by(
            AttributeSet::single(a), ctx.r, ctx.cluster, "sampling-init"));
    } else {
      Stage stage(ctx.cluster, "sampling-init");
      std::vector<std::vector<uint32_t>> assigned(k);
      for (uint32_t a = 0; a < m; ++a) {
        uint32_t w = a % k;
        stage.charge(w, wire::column_bytes(n));
        stage.add_work(w, n);
        assigned[w].push_back(a);
      }
      struct Parts {
        std::vector<std::pair<uint32_t, Partition>> parts;
      };
      auto tasks = idle_tasks<Parts>(k);
      for (uint32_t w = 0; w < k; ++w) {
        tasks[w] = [&ctx, &assigned, w](WorkerCtx&) {
          Parts res;
          for (uint32_t a : assigned[w])
            res.parts.emplace_back(
                a, gen_eq_class(AttributeSet::single(a), ctx.r));
          return res;
        };
      }
      auto results = stage.run(tasks);
      stage.finish();
      std::map<uint32_t, Partition> by_attr;
      for (auto& res : results)
        for (auto& [a, p] : res.parts) by_attr[a] = std::move(p);
      for (auto& [a, p] : by_attr) attr_partitions.push_back(std::move(p));
    }
  } else if (!ldp1 && n > 0) {
    Rng rng(cfg.sampling_seed);
    std::vector<uint32_t> perm = rng.permutation(n);
    group_rows.resize(groups);
    auto ranges = chunk_ranges(n, groups);
    for (uint32_t g = 0; g < groups; ++g) {
      for (uint32_t i = ranges[g].first; i < ranges[g].second; ++i)
        group_rows[g].push_back(perm[i]);
      std::sort(group_rows[g].begin(), group_rows[g].end());
    }
    for (uint32_t p = 0; p < groups; ++p)
      for (uint32_t q = p; q < groups; ++q) pair_queue.emplace_back(p, q);
    rng.shuffle(pair_queue);
  }

  auto attr_can_progress = [&](uint32_t a) {
    for (const EquivalenceClass& c : attr_partitions[a].classes)
      if (c.size() > windows[a]) return true;
    return false;
  };
  auto ldp1_can_progress = [&]() {
    if (attr_partitions.empty()) return false;
    for (uint32_t a = 0; a < m; ++a)
      if (attr_can_progress(a)) return true;
    return false;
  };

  struct RoundResult {
    std::vector<EvidenceSet> distinct;
    uint64_t pairs = 0;
    uint32_t attr = 0;
  };

  // One focused round: pick the most promising attribute still able to
  // yield pairs, compare rows at its current window offset.
  auto sample_round_ldp1 = [&]() {
    uint32_t best = 0;
    uint64_t best_score = 0;
    bool any = false;
    for (uint32_t a = 0; a < m; ++a) {
      if (!attr_can_progress(a)) continue;
      uint64_t score =
          sampled[a] ? last_mods[a] : std::numeric_limits<uint64_t>::max();
      if (!any || score > best_score) {
        best = a;
        best_score = score;
        any = true;
      }
    }
    uint32_t a = best;
    uint32_t w_size = windows[a];
    Stage stage(ctx.cluster, "sampling-" + std::to_string(sampling_rounds));
    std::vector<const EquivalenceClass*> classes;
    for (const EquivalenceClass& c : attr_partitions[a].classes)
      classes.push_back(&c);
    auto assignment = grouped_class_assignment(classes, k);
    for (uint32_t w = 0; w < k; ++w) {
      for (uint32_t ci : assignment[w]) {
        const EquivalenceClass& c = *classes[ci];
        if (c.size() <= w_size) continue;
        if (ctx.sm || charged_classes.insert({a, ci, w}).second)
          stage.charge(w, wire::row_list_bytes(c.size(), m));
        stage.add_work(w, c.size() - w_size);
      }
    }
    auto tasks = idle_tasks<LocalEvidence>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &space, &classes, &assignment, w, w_size](WorkerCtx&) {
        LocalEvidence local;
        for (uint32_t ci : assignment[w]) {
          for (auto& [i, j] : window_pairs(classes[ci]->rows, w_size)) {
            local.note(gen_ev_set(i, j, ctx.r, space));
            ++local.pairs;
          }
        }
        return local;
      };
    }
    auto results = stage.run(tasks);
    RoundResult round;
    round.attr = a;
    std::unordered_set<Bitset, BitsetHash> merged;
    for (uint32_t w = 0; w < k; ++w) {
      round.pairs += results[w].pairs;
      for (const EvidenceSet& ev : results[w].distinct) {
        stage.charge(w, wire::evidence_bytes(space.size()));
        if (merged.insert(ev).second) round.distinct.push_back(ev);
      }
    }
    stage.finish();
    windows[a] += 1;
    sampled[a] = 1;
    return round;
  };

  // One group-pair round: the next min(k, remaining) queued pairs, one per
  // worker.
  auto sample_round_ldp2 = [&]() {
    Stage stage(ctx.cluster, "sampling-" + std::to_string(sampling_rounds));
    std::vector<std::pair<uint32_t, uint32_t>> taken;
    while (taken.size() < k && pair_next < pair_queue.size())
      taken.push_back(pair_queue[pair_next++]);
    group_pairs_used += taken.size();
    for (uint32_t t = 0; t < taken.size(); ++t) {
      auto [p, q] = taken[t];
      uint64_t pb = wire::row_list_bytes(group_rows[p].size(), m);
      uint64_t qb = wire::row_list_bytes(group_rows[q].size(), m);
      if (ctx.sm) {
        stage.charge(t, pb);
        if (q != p) stage.charge(t, qb);
      } else {
        stage.charge_broadcast(
            ctx.cluster.broadcast("hyfd-group-" + std::to_string(p), pb), t);
        if (q != p)
          stage.charge_broadcast(
              ctx.cluster.broadcast("hyfd-group-" + std::to_string(q), qb), t);
      }
      uint64_t lp = group_rows[p].size(), lq = group_rows[q].size();
      stage.add_work(t, p == q ? lp * (lp - 1) / 2 : lp * lq);
    }
    auto tasks = idle_tasks<LocalEvidence>(k);
    for (uint32_t t = 0; t < taken.size(); ++t) {
      tasks[t] = [&ctx, &space, &group_rows, &taken, t](WorkerCtx&) {
        LocalEvidence local;
        auto [p, q] = taken[t];
        auto note = [&](uint32_t i, uint32_t j) {
          local.note(gen_ev_set(i, j, ctx.r, space));
          ++local.pairs;
        };
        if (p == q) {
          const auto& rows = group_rows[p];
          for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = i + 1; j < rows.size(); ++j)
              note(rows[i], rows[j]);
        } else {
          for (uint32_t i : group_rows[p])
            for (uint32_t j : group_rows[q])
              note(std::min(i, j), std::max(i, j));
        }
        return local;
      };
    }
    auto results = stage.run(tasks);
    RoundResult round;
    std::unordered_set<Bitset, BitsetHash> merged;
    for (uint32_t t = 0; t < taken.size(); ++t) {
      round.pairs += results[t].pairs;
      for (const EvidenceSet& ev : results[t].distinct) {
        stage.charge(t, wire::evidence_bytes(space.size()));
        if (merged.insert(ev).second) round.distinct.push_back(ev);
      }
    }
    stage.finish();
    return round;
  };

  std::map<AttributeSet, uint64_t> count_memo;
  count_memo[AttributeSet{}] = n == 0 ? 0 : 1;

  auto materialize_counts = [&](const std::vector<AttributeSet>& sets,
                                const std::string& name) {
    std::vector<AttributeSet> fresh;
    for (AttributeSet s : sets)
      if (!count_memo.count(s)) {
        fresh.push_back(s);
        count_memo[s] = 0;
      }
    if (fresh.empty()) return;
    if (ctx.sm) {
      for (AttributeSet s : fresh)
        count_memo[s] =
            distributed_group_by(s, ctx.r, ctx.cluster, name).class_count;
      return;
    }
    Stage stage(ctx.cluster, name);
    std::vector<std::vector<AttributeSet>> assigned(k);
    for (size_t i = 0; i < fresh.size(); ++i) {
      uint32_t w = static_cast<uint32_t>(i % k);
      stage.charge_broadcast(rel, w);
      rel_cached.insert(w);
      stage.add_work(w, uint64_t{n} * std::max<uint32_t>(1, fresh[i].count()));
      stage.charge(w, wire::node_count_bytes());
      assigned[w].push_back(fresh[i]);
    }
    struct Counts {
      std::vector<std::pair<AttributeSet, uint64_t>> counts;
    };
    auto tasks = idle_tasks<Counts>(k);
    for (uint32_t w = 0; w < k; ++w) {
      tasks[w] = [&ctx, &assigned, w](WorkerCtx&) {
        Counts res;
        for (AttributeSet s : assigned[w])
          res.counts.emplace_back(s, gen_eq_class(s, ctx.r).class_count);
        return res;
      };
    }
    auto results = stage.run(tasks);
    stage.finish();
    for (auto& res : results)
      for (auto& [s, c] : res.counts) count_memo[s] = c;
  };

  // Canonical violating pair for an invalid candidate: within the first
  // class (by smallest row id) that breaks it, the smallest offender.
  auto violating_pair = [&](AttributeSet lhs, uint32_t rhs,
                            const std::string& name) {
    Stage stage(ctx.cluster, name);
    uint32_t w = static_cast<uint32_t>(violations % k);
    stage.charge_broadcast(rel, w);
    if (!ctx.sm) rel_cached.insert(w);
    stage.add_work(w, n);
    stage.charge(w, 2 * wire::row_bytes(m));
    auto tasks = idle_tasks<std::pair<uint32_t, uint32_t>>(k);
    tasks[w] = [&ctx, fd, lhs, rhs,
                n](WorkerCtx&) -> std::pair<uint32_t, uint32_t> {
      if (lhs.empty()) {
        uint32_t c0 = ctx.r.code(0, rhs);
        for (uint32_t row = 1; row < n; ++row)
          if (ctx.r.code(row, rhs) != c0) return {0, row};
        return {0, 0};
      }
      Partition p = gen_eq_class(lhs, ctx.r);
      for (const EquivalenceClass& c : p.classes) {
        if (!fd) return {c.rows[0], c.rows[1]};
        uint32_t c0 = ctx.r.code(c.rows[0], rhs);
        for (size_t i = 1; i < c.rows.size(); ++i)
          if (ctx.r.code(c.rows[i], rhs) != c0) return {c.rows[0], c.rows[i]};
      }
      return {0, 0};
    };
    auto results = stage.run(tasks);
    stage.finish();
    return results[w];
  };

  auto max_width = [&]() {
    uint32_t widest = 0;
    for (auto& [lhs, bits] : tree.all())
      widest = std::max(widest, lhs.count());
    return widest;
  };

  bool data_phase = ldp1 && n >= 2;
  if (!ldp1 && n >= 2) {
    uint64_t residual =
        ctx.sm ? ceil_div(uint64_t{2} * m * n * wire::row_bytes(m), k)
               : wire::relation_bytes(n, m);
    PhaseCostEstimate est =
        estimate_phase_costs(n, m, k, m, residual, cfg.policy.lambda);
    data_phase =
        est.data_driven < est.schema_driven && pair_next < pair_queue.size();
  }

  uint32_t w_level = fd ? 0 : 1;
  while (true) {
    if (data_phase) {
      uint64_t stint_rounds = 0;
      while (true) {
        if (ldp1 && !ldp1_can_progress()) break;
        if (!ldp1 && pair_next >= pair_queue.size()) break;
        RoundResult round = ldp1 ? sample_round_ldp1() : sample_round_ldp2();
        ++sampling_rounds;
        ++stint_rounds;
        pair_comparisons += round.pairs;
        uint64_t applied = 0, changed = 0, mods_total = 0;
        for (const EvidenceSet& ev : round.distinct) {
          if (!store.add(ev)) continue;
          ++applied;
          uint64_t mods = apply_evidence(tree, ev, cfg.dep);
          mods_total += mods;
          if (mods > 0) ++changed;
        }
        if (ldp1) last_mods[round.attr] = mods_total;
        if (!ldp1) {
          uint64_t cands = 0;
          for (auto& [lhs, bits] : tree.all())
            if (lhs.count() >= w_level) cands += fd ? bits.count() : 1;
          cands = std::max<uint64_t>(cands, 1);
          uint64_t residual =
              ctx.sm ? ceil_div(2 * cands * n * wire::row_bytes(m), k)
                     : (rel_cached.size() < k ? wire::relation_bytes(n, m) : 0);
          PhaseCostEstimate est = estimate_phase_costs(n, m, k, cands, residual,
                                                       cfg.policy.lambda);
          if (est.schema_driven <= est.data_driven) break;
          continue;
        }
        if (applied == 0 ||
            static_cast<double>(changed) / static_cast<double>(applied) <
                cfg.policy.epsilon)
          break;
      }
      ctx.trace("data-driven", stint_rounds);
      data_phase = false;
      continue;
    }

    if (n == 0) break;  // zero rows: every candidate holds vacuously
    if (w_level > max_width()) break;
    auto entries = tree.level(w_level);
    if (entries.empty()) {
      ++w_level;
      continue;
    }
    uint64_t checks = 0;
    std::vector<AttributeSet> needed;
    for (auto& [lhs, bits] : entries) {
      needed.push_back(lhs);
      if (fd) {
        AttributeSet lhs_copy = lhs;
        AttributeSet rhs_bits = bits;
        rhs_bits.for_each([&](uint32_t a) {
          needed.push_back(lhs_copy.with(a));
          ++checks;
        });
      } else {
        ++checks;
      }
    }

    if (ldp1 && n >= 2 &&
        static_cast<double>(checks) >
            cfg.policy.validation_budget * static_cast<double>(n) &&
        ldp1_can_progress()) {
      data_phase = true;
      continue;
    }

    materialize_counts(needed, "validate-" + std::to_string(w_level));
    validations += checks;

    std::vector<std::pair<AttributeSet, uint32_t>> invalid;
    for (auto& [lhs, bits] : entries) {
      if (fd) {
        AttributeSet lhs_copy = lhs;
        AttributeSet rhs_bits = bits;
        rhs_bits.for_each([&](uint32_t a) {
          if (count_memo.at(lhs_copy) != count_memo.at(lhs_copy.with(a)))
            invalid.emplace_back(lhs_copy, a);
        });
      } else if (count_memo.at(lhs) != n) {
        invalid.emplace_back(lhs, 0);
      }
    }
    ctx.trace("schema-driven", 1);
    for (auto& [lhs, rhs] : invalid) {
      if (!tree.contains(lhs, rhs)) continue;
      auto [i, j] =
          violating_pair(lhs, rhs, "violation-" + std::to_string(violations));
      ++violations;
      EvidenceSet ev = gen_ev_set(i, j, ctx.r, space);
      store.add(ev);
      apply_evidence(tree, ev, cfg.dep);
    }
    ++w_level;

    if (!ldp1 && w_level <= max_width() && pair_next < pair_queue.size()) {
      uint64_t cands = 0;
      for (auto& [lhs, bits] : tree.level(w_level))
        cands += fd ? bits.count() : 1;
      if (cands > 0) {
        uint64_t residual =
            ctx.sm ? ceil_div(2 * cands * n * wire::row_bytes(m), k)
                   : (rel_cached.size() < k ? wire::relation_bytes(n, m) : 0);
        PhaseCostEstimate est = estimate_phase_costs(n, m, k, cands, residual,
                                                     cfg.policy.lambda);
        if (est.data_driven < est.schema_driven) data_phase = true;
      }
    }
  }

  std::vector<Dependency> deps;
  for (auto& [lhs, bits] : tree.all()) {
    if (fd) {
      AttributeSet lhs_copy = lhs;
      AttributeSet rhs_bits = bits;
      rhs_bits.for_each(
          [&](uint32_t a) { deps.push_back(Dependency::make_fd(lhs_copy, a)); });
    } else {
      deps.push_back(Dependency::make_ucc(lhs));
    }
  }
  ctx.out.counts["pair_comparisons"] = pair_comparisons;
  ctx.out.counts["evidence_sets"] = store.size();
  ctx.out.counts["sampling_rounds"] = sampling_rounds;
  ctx.out.counts["validations"] = validations;
  ctx.out.counts["violations"] = violations;
  if (!ldp1) ctx.out.counts["group_pairs"] = group_pairs_used;
  ctx.out.counts["fully_validated"] = 1;
  if (ctx.out.phase_trace.empty()) ctx.trace("schema-driven", 0);
  return ctx.finish(std::move(deps));
}

// ---------------------------------------------------------------------------

PrecisionRun run_naive_intersection(const Relation& r, uint32_t parts,
                                    const PlanConfig& config) {
  if (parts < 2) throw InputError("naive intersection needs at least 2 parts");
  if (config.dep != DepKind::fd)
    throw InputError("naive intersection is defined for fds");
  PlanConfig local = config;
  local.cluster.workers = 1;

  std::vector<Relation> pieces =
      horizontal_split(r, parts, config.sampling_seed);
  std::vector<Dependency> naive;
  for (uint32_t p = 0; p < pieces.size(); ++p) {
    DiscoveryResult res = run_discovery(pieces[p], local);
    if (p == 0) {
      naive = std::move(res.dependencies);
      continue;
    }
    std::unordered_set<std::string> here;
    for (const Dependency& d : res.dependencies)
      here.insert(d.render(r.attribute_names()));
    std::vector<Dependency> kept;
    for (Dependency& d : naive)
      if (here.count(d.render(r.attribute_names())))
        kept.push_back(std::move(d));
    naive = std::move(kept);
  }

  PrecisionRun run;
  run.parts = parts;
  std::map<AttributeSet, uint64_t> memo;
  memo[AttributeSet{}] = r.row_count() == 0 ? 0 : 1;
  auto count_of = [&](AttributeSet s) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    uint64_t c = gen_eq_class(s, r).class_count;
    memo[s] = c;
    return c;
  };
  for (const Dependency& d : naive)
    if (count_of(d.lhs) == count_of(d.lhs.with(d.rhs))) ++run.valid_count;
  run.precision = naive.empty() ? 1.0
                                : static_cast<double>(run.valid_count) /
                                      static_cast<double>(naive.size());
  run.naive = std::move(naive);
  return run;
}

DiscoveryResult run_discovery(const Relation& r, const PlanConfig& config) {
  validate_plan(config);
  if (r.column_count() > 64)
    throw LimitError("schemas wider than 64 attributes are not supported");
  switch (config.algo) {
    case Algorithm::tane: return run_tane(r, config);
    case Algorithm::fastfds: return run_fastfds(r, config);
    case Algorithm::hyfd: return run_hyfd(r, config);
    case Algorithm::datadriven: return run_fastfds(r, config);
  }
  throw ContractError("unhandled algorithm");
}

}  // namespace depdisc
