#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "depdisc/plans.hpp"

namespace depdisc {

using ordered_json = nlohmann::ordered_json;

/// Canonical renderings, one per line, trailing newline. Identical runs
/// produce identical bytes.
std::string dependencies_text(const std::vector<Dependency>& deps,
                              const std::vector<std::string>& names);

/// Ledger serialization. wall_ms is the only timing-dependent field, so it
/// stays out unless asked for.
ordered_json ledger_json(const CostLedger& ledger, bool with_wall);

/// Full result document: config echo, canonical dependency strings, counts,
/// phase trace, and the ledger without timing.
ordered_json result_json(const DiscoveryResult& result, const PlanConfig& config,
                         const std::vector<std::string>& names);

/// Timing-inclusive ledger document for a --metrics sink.
ordered_json metrics_json(const DiscoveryResult& result);

}  // namespace depdisc
