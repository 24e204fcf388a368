#include <cstdio>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depdisc/error.hpp"
#include "depdisc/oracle.hpp"
#include "depdisc/plans.hpp"
#include "depdisc/serialize.hpp"

namespace {

using namespace depdisc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitLimit = 3;

const std::map<std::string, DepKind> kDepNames = {
    {"fd", DepKind::fd}, {"ucc", DepKind::ucc}, {"od", DepKind::od}, {"dc", DepKind::dc}};

const std::map<std::string, Algorithm> kAlgoNames = {{"tane", Algorithm::tane},
                                                     {"fastfds", Algorithm::fastfds},
                                                     {"hyfd", Algorithm::hyfd},
                                                     {"datadriven", Algorithm::datadriven}};

std::string dep_name(DepKind dep) {
  for (const auto& [name, kind] : kDepNames)
    if (kind == dep) return name;
  return "?";
}

void write_document(const ordered_json& doc, const std::string& path) {
  std::string text = doc.dump(2);
  text += '\n';
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << text;
}

double wall_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

struct DiscoverArgs {
  std::string input;
  std::string dep;
  std::string algo;
  int ldp = 1;
  uint32_t workers = 1;
  uint64_t memory_budget = 0;
  uint64_t seed = 0;
  std::string output;
  std::string metrics;
  bool keep_trivial = false;
  bool null_unequal = false;
};

PlanConfig plan_config(const DiscoverArgs& args) {
  PlanConfig config;
  config.dep = kDepNames.at(args.dep);
  config.algo = kAlgoNames.at(args.algo);
  config.ldp = args.ldp;
  config.cluster.workers = args.workers;
  config.cluster.memory_budget = args.memory_budget;
  config.cluster.seed = args.seed;
  config.sampling_seed = args.seed;
  config.keep_trivial = args.keep_trivial;
  return config;
}

int cmd_discover(const DiscoverArgs& args) {
  PlanConfig config = plan_config(args);
  try {
    validate_plan(config);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  LoadOptions load;
  load.null_unequal = args.null_unequal;
  Relation r = load_csv(args.input, load);

  DiscoveryResult result = run_discovery(r, config);
  write_document(result_json(result, config, r.attribute_names()), args.output);
  if (!args.metrics.empty()) write_document(metrics_json(result), args.metrics);
  return kExitOk;
}

int cmd_oracle(const std::string& input, const std::string& dep_text,
               const oracle::OracleLimits& limits, bool keep_trivial,
               const std::string& output) {
  DepKind dep = kDepNames.at(dep_text);
  Relation r = load_csv(input, {});

  std::vector<Dependency> deps;
  switch (dep) {
    case DepKind::fd: deps = oracle::brute_fds(r, limits); break;
    case DepKind::ucc: deps = oracle::brute_uccs(r, limits); break;
    case DepKind::od: deps = oracle::brute_ods(r, limits); break;
    case DepKind::dc: deps = oracle::brute_dcs(r, limits, keep_trivial); break;
  }

  ordered_json doc;
  doc["dep"] = dep_text;
  doc["rows"] = r.row_count();
  doc["columns"] = r.column_count();
  doc["count"] = deps.size();
  doc["dependencies"] = ordered_json::array();
  for (const auto& d : deps) doc["dependencies"].push_back(d.render(r.attribute_names()));
  write_document(doc, output);
  return kExitOk;
}

int cmd_experiment_precision(const std::string& input,
                             const std::vector<uint32_t>& partitions, uint64_t seed,
                             const std::string& output) {
  Relation r = load_csv(input, {});

  PlanConfig config;
  config.dep = DepKind::fd;
  config.algo = Algorithm::tane;
  config.ldp = 2;
  config.cluster.workers = 1;
  config.cluster.seed = seed;
  config.sampling_seed = seed;

  ordered_json doc;
  doc["input"] = input;
  doc["seed"] = seed;
  doc["runs"] = ordered_json::array();

  std::printf("%6s %10s %10s %10s\n", "p", "naive", "valid", "precision");
  for (uint32_t p : partitions) {
    PrecisionRun run;
    if (p == 1) {
      run.parts = 1;
      run.naive = run_discovery(r, config).dependencies;
      run.valid_count = run.naive.size();
      run.precision = 1.0;
    } else {
      run = run_naive_intersection(r, p, config);
    }
    std::printf("%6u %10zu %10llu %10.4f\n", p, run.naive.size(),
                (unsigned long long)run.valid_count, run.precision);
    ordered_json entry;
    entry["parts"] = p;
    entry["naive"] = run.naive.size();
    entry["valid"] = run.valid_count;
    entry["precision"] = run.precision;
    doc["runs"].push_back(entry);
  }
  if (!output.empty()) write_document(doc, output);
  return kExitOk;
}

int cmd_experiment_compare(const std::string& input, const std::string& algo_text,
                           uint32_t workers, uint64_t memory_budget, uint64_t seed,
                           const std::string& output) {
  Algorithm algo = kAlgoNames.at(algo_text);
  if (algo == Algorithm::datadriven) {
    std::cerr << "error: experiment-compare covers the FD algorithms\n";
    return kExitUsage;
  }
  Relation r = load_csv(input, {});

  ordered_json doc;
  doc["input"] = input;
  doc["algo"] = algo_text;
  doc["workers"] = workers;
  doc["seed"] = seed;
  doc["plans"] = ordered_json::array();

  std::printf("%-14s %10s %14s %14s %12s\n", "plan", "time_ms", "shuffle_bytes",
              "X_bytes", "Y_units");
  for (int ldp : {1, 2}) {
    PlanConfig config;
    config.dep = DepKind::fd;
    config.algo = algo;
    config.ldp = ldp;
    config.cluster.workers = workers;
    config.cluster.memory_budget = memory_budget;
    config.cluster.seed = seed;
    config.sampling_seed = seed;

    auto start = std::chrono::steady_clock::now();
    DiscoveryResult result = run_discovery(r, config);
    double elapsed = wall_ms_since(start);

    std::string plan = algo_text + "-ldp" + std::to_string(ldp);
    std::printf("%-14s %10.1f %14llu %14llu %12llu\n", plan.c_str(), elapsed,
                (unsigned long long)result.ledger.total_bytes(),
                (unsigned long long)result.ledger.max_stage_x(),
                (unsigned long long)result.ledger.total_units());

    ordered_json entry;
    entry["ldp"] = ldp;
    entry["dependencies"] = result.dependencies.size();
    entry["shuffle_bytes"] = result.ledger.total_bytes();
    entry["max_worker_bytes"] = result.ledger.max_stage_x();
    entry["work_units"] = result.ledger.total_units();
    doc["plans"].push_back(entry);
  }
  if (!output.empty()) write_document(doc, output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency discovery over a metered multi-worker runtime"};
  app.require_subcommand(1);

  DiscoverArgs d;
  auto* discover = app.add_subcommand("discover", "Run a discovery plan over a CSV");
  discover->add_option("--input", d.input, "CSV file")->required();
  discover->add_option("--dep", d.dep, "Dependency kind")
      ->required()
      ->check(CLI::IsMember({"fd", "ucc", "od", "dc"}));
  discover->add_option("--algo", d.algo, "Discovery algorithm")
      ->required()
      ->check(CLI::IsMember({"tane", "fastfds", "hyfd", "datadriven"}));
  discover->add_option("--ldp", d.ldp, "Logical plan variant")->check(CLI::Range(1, 2));
  discover->add_option("--workers", d.workers, "Worker count")->check(CLI::Range(1, 1024));
  discover->add_option("--memory-budget", d.memory_budget,
                       "Per-worker memory budget in bytes (0 = unlimited)");
  discover->add_option("--seed", d.seed, "Seed for splits and sampling");
  discover->add_option("--output", d.output, "Result JSON path (default stdout)");
  discover->add_option("--metrics", d.metrics, "Timing-inclusive ledger JSON path");
  discover->add_flag("--keep-trivial", d.keep_trivial, "Keep trivial denial constraints");
  discover->add_flag("--null-unequal", d.null_unequal, "Nulls compare unequal");

  std::string o_input, o_dep, o_output;
  oracle::OracleLimits limits;
  bool o_keep_trivial = false;
  auto* orc = app.add_subcommand("oracle", "Exhaustive reference discovery");
  orc->add_option("--input", o_input, "CSV file")->required();
  orc->add_option("--dep", o_dep, "Dependency kind")
      ->required()
      ->check(CLI::IsMember({"fd", "ucc", "od", "dc"}));
  orc->add_option("--max-rows", limits.max_rows, "Row cap");
  orc->add_option("--max-cols", limits.max_cols, "Column cap");
  orc->add_option("--max-dc-predicates", limits.max_dc_predicates,
                  "Predicate count cap for denial constraints");
  orc->add_flag("--keep-trivial", o_keep_trivial, "Keep trivial denial constraints");
  orc->add_option("--output", o_output, "JSON path (default stdout)");

  std::string p_input, p_output;
  std::vector<uint32_t> p_partitions = {2, 5, 10};
  uint64_t p_seed = 0;
  auto* prec = app.add_subcommand("experiment-precision",
                                  "Naive split-and-intersect FD precision");
  prec->add_option("--input", p_input, "CSV file")->required();
  prec->add_option("--partitions", p_partitions, "Partition counts")
      ->delimiter(',')
      ->check(CLI::Range(1u, 1000u));
  prec->add_option("--seed", p_seed, "Split seed");
  prec->add_option("--output", p_output, "JSON path");

  std::string c_input, c_algo, c_output;
  uint32_t c_workers = 1;
  uint64_t c_budget = 0, c_seed = 0;
  auto* cmp = app.add_subcommand("experiment-compare",
                                 "Shuffle and work comparison of LDP1 vs LDP2");
  cmp->add_option("--input", c_input, "CSV file")->required();
  cmp->add_option("--algo", c_algo, "FD algorithm")
      ->required()
      ->check(CLI::IsMember({"tane", "fastfds", "hyfd", "datadriven"}));
  cmp->add_option("--workers", c_workers, "Worker count")->check(CLI::Range(1, 1024));
  cmp->add_option("--memory-budget", c_budget, "Per-worker memory budget in bytes");
  cmp->add_option("--seed", c_seed, "Seed for splits and sampling");
  cmp->add_option("--output", c_output, "JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (discover->parsed()) return cmd_discover(d);
    if (orc->parsed()) return cmd_oracle(o_input, o_dep, limits, o_keep_trivial, o_output);
    if (prec->parsed()) return cmd_experiment_precision(p_input, p_partitions, p_seed, p_output);
    if (cmp->parsed())
      return cmd_experiment_compare(c_input, c_algo, c_workers, c_budget, c_seed, c_output);
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLimit;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
