#include "depdisc/oracle.hpp"

#include <algorithm>

#include "depdisc/error.hpp"
#include "depdisc/predicate.hpp"
#include "depdisc/primitives.hpp"

namespace depdisc {
namespace oracle {

namespace {

void check_limits(const Relation& r, const OracleLimits& limits) {
  if (r.row_count() > limits.max_rows)
    throw LimitError("oracle: relation exceeds max_rows=" +
                     std::to_string(limits.max_rows));
  if (r.column_count() > limits.max_cols)
    throw LimitError("oracle: relation exceeds max_cols=" +
                     std::to_string(limits.max_cols));
}

bool rows_agree(const Relation& r, uint32_t i, uint32_t j, AttributeSet x) {
  bool agree = true;
  x.for_each([&](uint32_t a) {
    if (r.code(i, a) != r.code(j, a)) agree = false;
  });
  return agree;
}

/// Every subset of `pool` in ascending-cardinality order, smallest first.
std::vector<AttributeSet> subsets_by_size(AttributeSet pool, bool include_empty) {
  std::vector<AttributeSet> out;
  const auto indices = pool.to_indices();
  const uint32_t p = static_cast<uint32_t>(indices.size());
  for (uint64_t mask = include_empty ? 0 : 1; mask < (uint64_t{1} << p); ++mask) {
    AttributeSet s;
    for (uint32_t b = 0; b < p; ++b)
      if ((mask >> b) & 1) s.set(indices[b]);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](AttributeSet a, AttributeSet b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return a < b;
  });
  return out;
}

bool fd_holds(const Relation& r, AttributeSet lhs, uint32_t rhs) {
  for (uint32_t i = 0; i < r.row_count(); ++i)
    for (uint32_t j = i + 1; j < r.row_count(); ++j)
      if (rows_agree(r, i, j, lhs) && r.code(i, rhs) != r.code(j, rhs)) return false;
  return true;
}

bool ucc_holds(const Relation& r, AttributeSet columns) {
  for (uint32_t i = 0; i < r.row_count(); ++i)
    for (uint32_t j = i + 1; j < r.row_count(); ++j)
      if (rows_agree(r, i, j, columns)) return false;
  return true;
}

// X ~> A by definition: every pair strictly increasing in X (lexicographic
// by attribute index over codes) must be non-decreasing (asc) or
// non-increasing (desc) in A.
bool od_holds(const Relation& r, AttributeSet lhs, uint32_t rhs, OdDirection dir) {
  const auto attrs = lhs.to_indices();
  for (uint32_t i = 0; i < r.row_count(); ++i) {
    for (uint32_t j = 0; j < r.row_count(); ++j) {
      if (i == j) continue;
      int cmp = 0;
      for (uint32_t a : attrs) {
        uint32_t ci = r.code(i, a);
        uint32_t cj = r.code(j, a);
        if (ci != cj) {
          cmp = ci < cj ? -1 : 1;
          break;
        }
      }
      if (cmp != -1) continue;  // only strict X increases constrain
      uint32_t ai = r.code(i, rhs);
      uint32_t aj = r.code(j, rhs);
      if (dir == OdDirection::asc ? ai > aj : ai < aj) return false;
    }
  }
  return true;
}

bool dc_holds(const Relation& r, const std::vector<Predicate>& predicates) {
  for (uint32_t i = 0; i < r.row_count(); ++i) {
    for (uint32_t j = 0; j < r.row_count(); ++j) {
      if (i == j) continue;
      bool all = true;
      for (const Predicate& p : predicates) {
        if (!predicate_satisfied(r.column(p.attribute), r.code(i, p.attribute),
                                 r.code(j, p.attribute), p.op)) {
          all = false;
          break;
        }
      }
      if (all) return false;  // the pair satisfies everything the DC forbids
    }
  }
  return true;
}

}  // namespace

bool holds(const Dependency& d, const Relation& r) {
  switch (d.kind) {
    case DepKind::fd: return fd_holds(r, d.lhs, d.rhs);
    case DepKind::ucc: return ucc_holds(r, d.columns);
    case DepKind::od: return od_holds(r, d.lhs, d.rhs, d.direction);
    case DepKind::dc: return dc_holds(r, d.predicates);
  }
  throw ContractError("holds: unknown dependency kind");
}

std::vector<Dependency> brute_fds(const Relation& r, const OracleLimits& limits) {
  check_limits(r, limits);
  std::vector<Dependency> out;
  const uint32_t m = r.column_count();
  for (uint32_t rhs = 0; rhs < m; ++rhs) {
    std::vector<AttributeSet> minimal;
    for (AttributeSet lhs : subsets_by_size(r.all_attributes().without(rhs), true)) {
      bool dominated = false;
      for (AttributeSet seen : minimal)
        if (seen.is_subset_of(lhs)) {
          dominated = true;
          break;
        }
      if (dominated) continue;
      if (fd_holds(r, lhs, rhs)) {
        minimal.push_back(lhs);
        out.push_back(Dependency::make_fd(lhs, rhs));
      }
    }
  }
  sort_canonical(out, r.attribute_names());
  return out;
}

std::vector<Dependency> brute_uccs(const Relation& r, const OracleLimits& limits) {
  check_limits(r, limits);
  std::vector<Dependency> out;
  std::vector<AttributeSet> minimal;
  for (AttributeSet columns : subsets_by_size(r.all_attributes(), false)) {
    bool dominated = false;
    for (AttributeSet seen : minimal)
      if (seen.is_subset_of(columns)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    if (ucc_holds(r, columns)) {
      minimal.push_back(columns);
      out.push_back(Dependency::make_ucc(columns));
    }
  }
  sort_canonical(out, r.attribute_names());
  return out;
}

std::vector<Dependency> brute_ods(const Relation& r, const OracleLimits& limits) {
  check_limits(r, limits);
  std::vector<Dependency> out;
  const uint32_t m = r.column_count();
  for (uint32_t rhs = 0; rhs < m; ++rhs) {
    for (OdDirection dir : {OdDirection::asc, OdDirection::desc}) {
      std::vector<AttributeSet> minimal;
      for (AttributeSet lhs : subsets_by_size(r.all_attributes().without(rhs), false)) {
        bool dominated = false;
        for (AttributeSet seen : minimal)
          if (seen.is_subset_of(lhs)) {
            dominated = true;
            break;
          }
        if (dominated) continue;
        if (od_holds(r, lhs, rhs, dir)) {
          minimal.push_back(lhs);
          out.push_back(Dependency::make_od(lhs, rhs, dir));
        }
      }
    }
  }
  sort_canonical(out, r.attribute_names());
  return out;
}

std::vector<Dependency> brute_dcs(const Relation& r, const OracleLimits& limits,
                                  bool keep_trivial) {
  check_limits(r, limits);
  PredicateSpace space = PredicateSpace::make(SpaceMode::dc_full, r);
  // All predicate subsets up to the cap, ascending by size.
  std::vector<std::vector<uint32_t>> subsets;
  std::vector<uint32_t> current;
  auto enumerate = [&](auto&& self, uint32_t start, uint32_t remaining) -> void {
    if (!current.empty()) subsets.push_back(current);
    if (remaining == 0) return;
    for (uint32_t pos = start; pos < space.size(); ++pos) {
      current.push_back(pos);
      self(self, pos + 1, remaining - 1);
      current.pop_back();
    }
  };
  enumerate(enumerate, 0, limits.max_dc_predicates);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });

  std::vector<Dependency> out;
  std::vector<std::vector<uint32_t>> minimal;
  for (const auto& subset : subsets) {
    bool dominated = false;
    for (const auto& seen : minimal)
      if (std::includes(subset.begin(), subset.end(), seen.begin(), seen.end())) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    std::vector<Predicate> predicates;
    for (uint32_t pos : subset) predicates.push_back(space.predicate(pos));
    if (dc_holds(r, predicates)) {
      minimal.push_back(subset);
      if (keep_trivial || [&] {
            Bitset bits(space.size());
            for (uint32_t pos : subset) bits.set(pos);
            return predicate_set_satisfiable(bits, space);
          }()) {
        out.push_back(Dependency::make_dc(std::move(predicates)));
      }
    }
  }
  sort_canonical(out, r.attribute_names());
  return out;
}

double precision(const std::vector<Dependency>& found, const Relation& r) {
  if (found.empty()) return 1.0;
  size_t valid = 0;
  for (const Dependency& d : found)
    if (holds(d, r)) ++valid;
  return static_cast<double>(valid) / static_cast<double>(found.size());
}

}  // namespace oracle
}  // namespace depdisc
