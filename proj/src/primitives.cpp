#include "depdisc/primitives.hpp"

#include <algorithm>
#include <unordered_map>

namespace depdisc {

namespace {

struct CodeKeyHash {
  size_t operator()(const std::vector<uint32_t>& key) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint32_t c : key) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace

Partition gen_eq_class(AttributeSet x, const Relation& r) {
  if (x.empty()) throw ContractError("gen_eq_class: empty attribute set");
  const auto attrs = x.to_indices();

  Partition p;
  p.attribute_set = x;

  std::unordered_map<std::vector<uint32_t>, uint32_t, CodeKeyHash> first_seen;
  std::vector<std::vector<uint32_t>> groups;  // ordered by first occurrence
  std::vector<uint32_t> key(attrs.size());
  for (uint32_t row = 0; row < r.row_count(); ++row) {
    for (size_t i = 0; i < attrs.size(); ++i) key[i] = r.code(row, attrs[i]);
    auto [it, inserted] = first_seen.try_emplace(key, static_cast<uint32_t>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(row);
  }

  p.class_count = groups.size();
  for (auto& g : groups) {
    if (g.size() >= 2)
      p.classes.push_back({std::move(g)});
    else
      ++p.stripped_singletons;
  }
  return p;
}

OrderedClasses ordered_eq_classes(AttributeSet x, const Relation& r) {
  if (x.empty()) throw ContractError("ordered_eq_classes: empty attribute set");
  const auto attrs = x.to_indices();

  std::vector<uint32_t> rows(r.row_count());
  for (uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::sort(rows.begin(), rows.end(), [&](uint32_t a, uint32_t b) {
    for (uint32_t attr : attrs) {
      uint32_t ca = r.code(a, attr);
      uint32_t cb = r.code(b, attr);
      if (ca != cb) return ca < cb;
    }
    return a < b;
  });

  OrderedClasses out;
  out.attribute_set = x;
  auto same = [&](uint32_t a, uint32_t b) {
    for (uint32_t attr : attrs)
      if (r.code(a, attr) != r.code(b, attr)) return false;
    return true;
  };
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || !same(rows[i - 1], rows[i])) out.classes.emplace_back();
    out.classes.back().push_back(rows[i]);
  }
  return out;
}

Partition intersect_partitions(const Partition& px, const Partition& py,
                               uint32_t row_count) {
  // Probe table: which stored class of px each row belongs to.
  constexpr uint32_t kNone = ~uint32_t{0};
  std::vector<uint32_t> probe(row_count, kNone);
  for (uint32_t c = 0; c < px.classes.size(); ++c)
    for (uint32_t row : px.classes[c].rows) probe[row] = c;

  Partition out;
  out.attribute_set = px.attribute_set.united(py.attribute_set);

  std::vector<EquivalenceClass> result;
  std::unordered_map<uint64_t, size_t> bucket_index;
  for (const auto& cls : py.classes) {
    bucket_index.clear();
    for (uint32_t row : cls.rows) {
      uint32_t left = probe[row];
      if (left == kNone) continue;  // singleton in px, singleton in the meet
      uint64_t key = (uint64_t{left} << 32);
      auto [it, inserted] = bucket_index.try_emplace(key, result.size());
      if (inserted) result.emplace_back();
      result[it->second].rows.push_back(row);
    }
  }

  uint32_t stored_rows = 0;
  std::erase_if(result, [](const EquivalenceClass& c) { return c.rows.size() < 2; });
  for (const auto& c : result) stored_rows += c.size();
  std::sort(result.begin(), result.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) {
              return a.rows.front() < b.rows.front();
            });
  out.classes = std::move(result);
  out.stripped_singletons = row_count - stored_rows;
  out.class_count = out.classes.size() + out.stripped_singletons;
  return out;
}

bool check_refinement(const RefinementInput& input) {
  if (input.mode == RefinementMode::count_based)
    return input.left_count == input.combined_count;

  if (!input.left_classes || !input.rhs_column)
    throw ContractError("order_based refinement needs classes and a column");

  const Column& col = *input.rhs_column;
  bool have_prev = false;
  uint32_t prev_extreme = 0;  // max so far (asc) or min so far (desc)
  for (const auto& cls : input.left_classes->classes) {
    uint32_t lo = col.codes[cls.front()];
    uint32_t hi = lo;
    for (uint32_t row : cls) {
      uint32_t c = col.codes[row];
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (input.direction == OdDirection::asc) {
      if (have_prev && prev_extreme > lo) return false;
      prev_extreme = have_prev ? std::max(prev_extreme, hi) : hi;
    } else {
      if (have_prev && prev_extreme < hi) return false;
      prev_extreme = have_prev ? std::min(prev_extreme, lo) : lo;
    }
    have_prev = true;
  }
  return true;
}

bool is_ucc(const Partition& p, uint32_t row_count) {
  return p.class_count == row_count;
}

EvidenceSet gen_ev_set(uint32_t i, uint32_t j, const Relation& r,
                       const PredicateSpace& space) {
  auto [ti, tj] = project_pair(r, i, j);
  EvidenceSet ev = space.empty_set();
  const auto& predicates = space.predicates();
  for (uint32_t pos = 0; pos < predicates.size(); ++pos) {
    const Predicate& p = predicates[pos];
    const Column& col = r.column(p.attribute);
    if (space.mode() == SpaceMode::fd_inequality) {
      if (ti.code(p.attribute) != tj.code(p.attribute)) ev.set(pos);
    } else if (predicate_satisfied(col, ti.code(p.attribute), tj.code(p.attribute),
                                   p.op)) {
      ev.set(pos);
    }
  }
  return ev;
}

EvidenceSet mirror_evidence(const EvidenceSet& ev, const PredicateSpace& space) {
  if (space.mode() == SpaceMode::fd_inequality) return ev;
  EvidenceSet out = space.empty_set();
  ev.for_each([&](uint32_t pos) {
    Predicate p = space.predicate(pos);
    switch (p.op) {
      case PredOp::lt: p.op = PredOp::gt; break;
      case PredOp::le: p.op = PredOp::ge; break;
      case PredOp::gt: p.op = PredOp::lt; break;
      case PredOp::ge: p.op = PredOp::le; break;
      default: break;
    }
    out.set(space.position(p));
  });
  return out;
}

std::vector<std::pair<uint32_t, uint32_t>> window_pairs(
    const std::vector<uint32_t>& class_rows, uint32_t window) {
  // A join of the position sequence with itself under j - i == window.
  std::vector<size_t> positions(class_rows.size());
  for (size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  auto joined = local_self_join(std::span<const size_t>(positions),
                                [&](size_t a, size_t b) { return b - a == window; });
  std::vector<std::pair<uint32_t, uint32_t>> out;
  out.reserve(joined.size());
  for (auto [a, b] : joined) out.emplace_back(class_rows[a], class_rows[b]);
  return out;
}

namespace {

struct CoverSearch {
  const std::vector<Bitset>* sets = nullptr;
  std::vector<uint32_t> element_order;   // descending coverage frequency
  std::vector<uint32_t> order_rank;      // element -> rank in element_order
  std::vector<Bitset> results;
  uint32_t universe = 0;

  bool covers_all(const Bitset& candidate) const {
    for (const Bitset& s : *sets)
      if (!candidate.intersects(s)) return false;
    return true;
  }

  bool is_minimal(const Bitset& cover) const {
    bool minimal = true;
    cover.for_each([&](uint32_t e) {
      if (!minimal) return;
      Bitset reduced = cover;
      reduced.reset(e);
      if (covers_all(reduced)) minimal = false;
    });
    return minimal;
  }

  void dfs(std::vector<uint32_t>& uncovered, Bitset& path, Bitset& excluded) {
    if (uncovered.empty()) {
      if (is_minimal(path)) results.push_back(path);
      return;
    }
    const Bitset& target = (*sets)[uncovered.front()];
    std::vector<uint32_t> branch = target.to_indices();
    std::sort(branch.begin(), branch.end(),
              [&](uint32_t a, uint32_t b) { return order_rank[a] < order_rank[b]; });
    std::vector<uint32_t> newly_excluded;
    for (uint32_t e : branch) {
      if (excluded.test(e)) continue;
      std::vector<uint32_t> remaining;
      remaining.reserve(uncovered.size());
      for (uint32_t si : uncovered)
        if (!(*sets)[si].test(e)) remaining.push_back(si);
      path.set(e);
      dfs(remaining, path, excluded);
      path.reset(e);
      excluded.set(e);  // later siblings may not reuse e
      newly_excluded.push_back(e);
    }
    for (uint32_t e : newly_excluded) excluded.reset(e);
  }
};

}  // namespace

std::vector<Bitset> minimal_covers(const std::vector<Bitset>& sets,
                                   uint32_t universe_width) {
  if (sets.empty()) return {Bitset(universe_width)};
  for (const Bitset& s : sets)
    if (s.none()) return {};

  std::vector<Bitset> sorted = sets;
  std::sort(sorted.begin(), sorted.end(), [](const Bitset& a, const Bitset& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return a < b;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  CoverSearch search;
  search.sets = &sorted;
  search.universe = universe_width;

  std::vector<uint64_t> freq(universe_width, 0);
  for (const Bitset& s : sorted) s.for_each([&](uint32_t e) { ++freq[e]; });
  search.element_order.resize(universe_width);
  for (uint32_t e = 0; e < universe_width; ++e) search.element_order[e] = e;
  std::sort(search.element_order.begin(), search.element_order.end(),
            [&](uint32_t a, uint32_t b) {
              if (freq[a] != freq[b]) return freq[a] > freq[b];
              return a < b;
            });
  search.order_rank.resize(universe_width);
  for (uint32_t rank = 0; rank < universe_width; ++rank)
    search.order_rank[search.element_order[rank]] = rank;

  std::vector<uint32_t> uncovered(sorted.size());
  for (uint32_t i = 0; i < sorted.size(); ++i) uncovered[i] = i;
  Bitset path(universe_width);
  Bitset excluded(universe_width);
  search.dfs(uncovered, path, excluded);

  std::sort(search.results.begin(), search.results.end(),
            [](const Bitset& a, const Bitset& b) {
              if (a.count() != b.count()) return a.count() < b.count();
              return a < b;
            });
  return search.results;
}

std::vector<Dependency> fds_from_evidence(const std::vector<EvidenceSet>& evidence,
                                          uint32_t m) {
  std::vector<Dependency> out;
  for (uint32_t rhs = 0; rhs < m; ++rhs) {
    std::vector<Bitset> reduced;
    for (const EvidenceSet& ev : evidence) {
      if (!ev.test(rhs)) continue;
      Bitset s = ev;
      s.reset(rhs);
      reduced.push_back(std::move(s));
    }
    for (const Bitset& cover : minimal_covers(reduced, m)) {
      AttributeSet lhs;
      cover.for_each([&](uint32_t e) { lhs.set(e); });
      out.push_back(Dependency::make_fd(lhs, rhs));
    }
  }
  return out;
}

bool predicate_set_satisfiable(const Bitset& predicate_set,
                               const PredicateSpace& space) {
  // Comparison outcomes per attribute: bit 0 "<", bit 1 "=", bit 2 ">".
  std::unordered_map<uint32_t, uint8_t> allowed;
  bool satisfiable = true;
  predicate_set.for_each([&](uint32_t pos) {
    if (!satisfiable) return;
    const Predicate& p = space.predicate(pos);
    uint8_t mask = 0;
    switch (p.op) {
      case PredOp::eq: mask = 0b010; break;
      case PredOp::ne: mask = 0b101; break;
      case PredOp::lt: mask = 0b001; break;
      case PredOp::le: mask = 0b011; break;
      case PredOp::gt: mask = 0b100; break;
      case PredOp::ge: mask = 0b110; break;
    }
    auto [it, inserted] = allowed.try_emplace(p.attribute, mask);
    if (!inserted) it->second &= mask;
    if (it->second == 0) satisfiable = false;
  });
  return satisfiable;
}

std::vector<Dependency> dcs_from_evidence(const std::vector<EvidenceSet>& evidence,
                                          const PredicateSpace& space,
                                          bool keep_trivial) {
  std::vector<Dependency> out;
  auto emit = [&](const Bitset& predicate_set) {
    if (!keep_trivial && !predicate_set_satisfiable(predicate_set, space)) return;
    std::vector<Predicate> predicates;
    predicate_set.for_each(
        [&](uint32_t pos) { predicates.push_back(space.predicate(pos)); });
    out.push_back(Dependency::make_dc(std::move(predicates)));
  };

  if (evidence.empty()) {
    // No tuple pairs: every single-predicate constraint holds vacuously.
    for (uint32_t pos = 0; pos < space.size(); ++pos) {
      Bitset single(space.size());
      single.set(pos);
      emit(single);
    }
    return out;
  }

  std::vector<Bitset> complements;
  complements.reserve(evidence.size());
  for (const EvidenceSet& ev : evidence) complements.push_back(ev.complement());
  for (const Bitset& cover : minimal_covers(complements, space.size())) emit(cover);
  return out;
}

}  // namespace depdisc
