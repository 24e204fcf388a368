#pragma once

#include <cstdint>
#include <vector>

#include "depdisc/dependency.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {
namespace oracle {

/// Size caps for the exhaustive checkers. Exceeding a cap raises LimitError;
/// the caps exist because everything here is deliberately quadratic or worse.
struct OracleLimits {
  uint32_t max_rows = 500;
  uint32_t max_cols = 8;
  uint32_t max_dc_predicates = 3;
};

/// Validity of a single dependency by direct definition: pair scans for
/// fd/ucc/dc, a full quadratic order check for od. No partitions, no
/// evidence machinery.
bool holds(const Dependency& d, const Relation& r);

/// All minimal FDs by subset enumeration, smallest LHS first. Includes the
/// empty LHS (constant columns), rendered "TRUE -> A".
std::vector<Dependency> brute_fds(const Relation& r, const OracleLimits& limits = {});

/// All minimal unique column combinations (non-empty).
std::vector<Dependency> brute_uccs(const Relation& r, const OracleLimits& limits = {});

/// All minimal order dependencies X ~> A, non-empty LHS, both directions.
std::vector<Dependency> brute_ods(const Relation& r, const OracleLimits& limits = {});

/// All minimal valid denial constraints with at most max_dc_predicates
/// predicates. Trivially-valid predicate sets are dropped unless
/// keep_trivial is set.
std::vector<Dependency> brute_dcs(const Relation& r, const OracleLimits& limits = {},
                                  bool keep_trivial = false);

/// Fraction of `found` that holds on r; 1.0 when `found` is empty.
double precision(const std::vector<Dependency>& found, const Relation& r);

}  // namespace oracle
}  // namespace depdisc
