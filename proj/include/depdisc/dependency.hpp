#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "depdisc/bitset.hpp"
#include "depdisc/predicate.hpp"

namespace depdisc {

enum class DepKind : uint8_t { fd, ucc, od, dc };

enum class OdDirection : uint8_t { asc, desc };

DepKind dep_kind_from_string(const std::string& s);
const char* dep_kind_name(DepKind kind);

/// One discovered dependency. Canonical renderings:
///   FD   "B,C -> A"            lhs names ascending by column index;
///                              constant columns render as "TRUE -> A"
///   UCC  "UNIQUE(AC,PH)"       names ascending by column index
///   OD   "SAL ~> STX [desc]"
///   DC   "!( t0.ST == t1.ST & t0.SAL < t1.SAL )"
///                              predicates ascending by (attribute, operator)
struct Dependency {
  DepKind kind = DepKind::fd;

  AttributeSet lhs;                    // fd, od
  uint32_t rhs = 0;                    // fd, od
  OdDirection direction = OdDirection::asc;  // od
  AttributeSet columns;                // ucc
  std::vector<Predicate> predicates;   // dc, canonically sorted

  static Dependency make_fd(AttributeSet lhs, uint32_t rhs);
  static Dependency make_ucc(AttributeSet columns);
  static Dependency make_od(AttributeSet lhs, uint32_t rhs, OdDirection direction);
  static Dependency make_dc(std::vector<Predicate> predicates);

  std::string render(const std::vector<std::string>& names) const;

  bool operator==(const Dependency& o) const = default;
};

/// Parses a canonical rendering back into a Dependency. Inverse of render
/// for every value render produces.
Dependency parse_dependency(const std::string& text,
                            const std::vector<std::string>& names);

/// Sorts into canonical (rendered-string) order.
void sort_canonical(std::vector<Dependency>& deps,
                    const std::vector<std::string>& names);

}  // namespace depdisc
