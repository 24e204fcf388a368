#include "depdisc/serialize.hpp"

namespace depdisc {

std::string dependencies_text(const std::vector<Dependency>& deps,
                              const std::vector<std::string>& names) {
  std::string out;
  for (const Dependency& d : deps) {
    out += d.render(names);
    out += '\n';
  }
  return out;
}

ordered_json ledger_json(const CostLedger& ledger, bool with_wall) {
  ordered_json stages = ordered_json::array();
  for (const StageStats& s : ledger.stages()) {
    ordered_json stage;
    stage["name"] = s.name;
    stage["workers"] = s.k;
    stage["x_bytes"] = s.x_bytes();
    stage["y_units"] = s.y_units();
    stage["total_bytes"] = s.total_bytes();
    stage["total_units"] = s.total_units();
    if (with_wall) stage["wall_ms"] = s.wall_ms;
    stages.push_back(std::move(stage));
  }
  ordered_json out;
  out["total_bytes"] = ledger.total_bytes();
  out["total_units"] = ledger.total_units();
  out["max_stage_x"] = ledger.max_stage_x();
  out["stages"] = std::move(stages);
  return out;
}

ordered_json result_json(const DiscoveryResult& result, const PlanConfig& config,
                         const std::vector<std::string>& names) {
  ordered_json cfg;
  cfg["dep"] = dep_kind_name(config.dep);
  cfg["algo"] = algorithm_name(config.algo);
  cfg["ldp"] = config.ldp;
  cfg["workers"] = config.cluster.workers;
  cfg["memory_budget"] = config.cluster.memory_budget;
  cfg["seed"] = config.sampling_seed;

  ordered_json deps = ordered_json::array();
  for (const Dependency& d : result.dependencies) deps.push_back(d.render(names));

  ordered_json trace = ordered_json::array();
  for (const PhaseTraceEntry& e : result.phase_trace) {
    ordered_json entry;
    entry["phase"] = e.phase;
    entry["rounds"] = e.rounds;
    trace.push_back(std::move(entry));
  }

  ordered_json out;
  out["config"] = std::move(cfg);
  out["dependencies"] = std::move(deps);
  out["counts"] = ordered_json(result.counts);
  out["phase_trace"] = std::move(trace);
  out["metrics"] = ledger_json(result.ledger, false);
  return out;
}

ordered_json metrics_json(const DiscoveryResult& result) {
  return ledger_json(result.ledger, true);
}

}  // namespace depdisc
