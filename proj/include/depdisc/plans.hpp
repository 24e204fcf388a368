#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depdisc/cluster.hpp"
#include "depdisc/dependency.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {

enum class Algorithm : uint8_t { tane, fastfds, hyfd, datadriven };

/// Parses "tane" | "fastfds" | "hyfd" | "datadriven"; InputError otherwise.
Algorithm algorithm_from_string(const std::string& s);
const char* algorithm_name(Algorithm a);

/// Knobs of the hybrid plan's phase switching.
struct SwitchPolicy {
  /// Data-driven sampling stops when the fraction of freshly applied
  /// evidence sets that still change the candidate tree drops below this.
  double epsilon = 0.01;
  /// Schema-driven validation of a level yields back to sampling when the
  /// level holds more than validation_budget * n candidate checks.
  double validation_budget = 1.0;
  /// Work-unit weight when comparing phase costs against bytes.
  double lambda = 1.0;
};

struct PlanConfig {
  DepKind dep = DepKind::fd;
  Algorithm algo = Algorithm::tane;
  uint32_t ldp = 1;
  ClusterConfig cluster;
  uint64_t sampling_seed = 0;
  SwitchPolicy policy;
  /// Keep denial constraints whose predicate set no tuple pair can satisfy.
  bool keep_trivial = false;
};

/// Rejects unsupported combinations: dc pairs only with datadriven (and the
/// reverse), od runs only on tane, ldp must be 1 or 2.
void validate_plan(const PlanConfig& config);

struct PhaseTraceEntry {
  std::string phase;
  uint64_t rounds = 0;
};

struct DiscoveryResult {
  std::vector<Dependency> dependencies;  // canonically sorted
  CostLedger ledger;
  std::vector<PhaseTraceEntry> phase_trace;
  std::map<std::string, uint64_t> counts;
};

/// Dispatches to the algorithm's runner after validate_plan.
DiscoveryResult run_discovery(const Relation& r, const PlanConfig& config);

/// Level-wise lattice search (fd, ucc, od). LDP1 ships equivalence classes
/// between workers and intersects; LDP2 ships only (set, count) pairs and
/// recomputes classes from a broadcast relation.
DiscoveryResult run_tane(const Relation& r, const PlanConfig& config);

/// Evidence-first search (fd, dc). LDP1 compares within per-attribute
/// blocks; LDP2 compares all pairs via the triangle layout. Denial
/// constraints always take the all-pairs route.
DiscoveryResult run_fastfds(const Relation& r, const PlanConfig& config);

/// Hybrid sampling + validation (fd, ucc).
DiscoveryResult run_hyfd(const Relation& r, const PlanConfig& config);

/// Per-worker cost of one more round of each hybrid phase, in bytes plus
/// lambda-weighted work units: data-driven = 2nm/k + lambda * m * (n/k)^2;
/// schema-driven = residual broadcast bytes + lambda * candidates * n.
struct PhaseCostEstimate {
  double data_driven = 0;
  double schema_driven = 0;
};

PhaseCostEstimate estimate_phase_costs(uint64_t n, uint32_t m, uint32_t k,
                                       uint64_t candidates,
                                       uint64_t residual_bytes, double lambda);

struct PrecisionRun {
  uint32_t parts = 0;
  std::vector<Dependency> naive;  // intersection of per-part results
  uint64_t valid_count = 0;       // members that hold on the full relation
  double precision = 1.0;
};

/// Splits r into near-equal parts, discovers FDs per part with a
/// single-worker copy of `config`, intersects the results literally, then
/// checks each survivor against the full relation with partition counts.
PrecisionRun run_naive_intersection(const Relation& r, uint32_t parts,
                                    const PlanConfig& config);

}  // namespace depdisc
