#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "depdisc/datagen.hpp"
#include "depdisc/error.hpp"
#include "depdisc/plans.hpp"
#include "depdisc/serialize.hpp"

using namespace depdisc;

namespace {

Relation fig2a() {
  return load_csv(std::string(DATA_DIR) + "/fig2a.csv", {});
}

Relation tax() {
  return load_csv(std::string(DATA_DIR) + "/tax.csv", {});
}

PlanConfig plan(DepKind dep, Algorithm algo, uint32_t ldp, uint32_t workers = 1,
                uint64_t budget = 0) {
  PlanConfig config;
  config.dep = dep;
  config.algo = algo;
  config.ldp = ldp;
  config.cluster.workers = workers;
  config.cluster.memory_budget = budget;
  return config;
}

std::set<std::string> names_of(const DiscoveryResult& result, const Relation& r) {
  std::set<std::string> out;
  for (const auto& d : result.dependencies)
    out.insert(d.render(r.attribute_names()));
  return out;
}

const std::set<std::string> kFig2aFds = {"A,B -> C", "A,B -> D", "A,D -> B",
                                         "B,C -> A", "B,C -> D", "B,D -> A",
                                         "D -> C"};
const std::set<std::string> kFig2aKeys = {"UNIQUE(A,B)", "UNIQUE(A,D)",
                                          "UNIQUE(B,C)", "UNIQUE(B,D)"};

}  // namespace

TEST_CASE("algorithm names round-trip") {
  CHECK(algorithm_from_string("tane") == Algorithm::tane);
  CHECK(algorithm_from_string("fastfds") == Algorithm::fastfds);
  CHECK(algorithm_from_string("hyfd") == Algorithm::hyfd);
  CHECK(algorithm_from_string("datadriven") == Algorithm::datadriven);
  CHECK_THROWS_AS(algorithm_from_string("dfd"), InputError);
  CHECK(std::string(algorithm_name(Algorithm::fastfds)) == "fastfds");
}

TEST_CASE("plan validation rejects unsupported pairings") {
  CHECK_THROWS_AS(validate_plan(plan(DepKind::dc, Algorithm::tane, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::dc, Algorithm::fastfds, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::dc, Algorithm::hyfd, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::fd, Algorithm::datadriven, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::ucc, Algorithm::fastfds, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::od, Algorithm::fastfds, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::od, Algorithm::hyfd, 1)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::fd, Algorithm::tane, 3)), InputError);
  CHECK_THROWS_AS(validate_plan(plan(DepKind::fd, Algorithm::tane, 0)), InputError);

  CHECK_NOTHROW(validate_plan(plan(DepKind::fd, Algorithm::tane, 1)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::ucc, Algorithm::tane, 2)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::od, Algorithm::tane, 2)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::fd, Algorithm::fastfds, 1)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::fd, Algorithm::hyfd, 2)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::ucc, Algorithm::hyfd, 1)));
  CHECK_NOTHROW(validate_plan(plan(DepKind::dc, Algorithm::datadriven, 2)));
}

TEST_CASE("every fd plan agrees on the worked example") {
  Relation r = fig2a();
  for (Algorithm algo : {Algorithm::tane, Algorithm::fastfds, Algorithm::hyfd}) {
    for (uint32_t ldp : {1u, 2u}) {
      for (uint32_t workers : {1u, 3u}) {
        auto result = run_discovery(r, plan(DepKind::fd, algo, ldp, workers));
        CAPTURE(algorithm_name(algo));
        CAPTURE(ldp);
        CAPTURE(workers);
        CHECK(names_of(result, r) == kFig2aFds);
        CHECK(std::is_sorted(result.dependencies.begin(),
                             result.dependencies.end(), [&](const auto& a,
                                                            const auto& b) {
                               return a.render(r.attribute_names()) <
                                      b.render(r.attribute_names());
                             }));
      }
    }
  }
}

TEST_CASE("ucc plans find the four minimal keys") {
  Relation r = fig2a();
  for (Algorithm algo : {Algorithm::tane, Algorithm::hyfd}) {
    for (uint32_t ldp : {1u, 2u}) {
      auto result = run_discovery(r, plan(DepKind::ucc, algo, ldp, 2));
      CAPTURE(algorithm_name(algo));
      CAPTURE(ldp);
      CHECK(names_of(result, r) == kFig2aKeys);
    }
  }
}

TEST_CASE("order plan confirms the tax table rules") {
  Relation r = tax();
  auto result = run_discovery(r, plan(DepKind::od, Algorithm::tane, 2, 3));
  auto found = names_of(result, r);
  CHECK(found.count("SAL ~> STX [desc]") == 1);
  CHECK(found.count("SAL ~> STX [asc]") == 0);
  for (const auto& d : result.dependencies) CHECK(d.kind == DepKind::od);

  auto ldp1 = run_discovery(r, plan(DepKind::od, Algorithm::tane, 1, 3));
  CHECK(names_of(ldp1, r) == found);
}

TEST_CASE("fd plans agree on the tax table") {
  Relation r = tax();
  std::set<std::string> reference;
  bool first = true;
  for (Algorithm algo : {Algorithm::tane, Algorithm::fastfds, Algorithm::hyfd}) {
    for (uint32_t ldp : {1u, 2u}) {
      auto result = run_discovery(r, plan(DepKind::fd, algo, ldp, 2));
      auto found = names_of(result, r);
      CHECK(found.count("ZIP -> ST") == 1);
      if (first) {
        reference = found;
        first = false;
      } else {
        CAPTURE(algorithm_name(algo));
        CAPTURE(ldp);
        CHECK(found == reference);
      }
    }
  }
}

TEST_CASE("memory budgets change shipping but never results") {
  Relation r = tax();
  auto unlimited = run_discovery(r, plan(DepKind::fd, Algorithm::tane, 1, 4));
  auto constrained = run_discovery(r, plan(DepKind::fd, Algorithm::tane, 1, 4, 600));
  CHECK(names_of(unlimited, r) == names_of(constrained, r));

  auto tiny = plan(DepKind::fd, Algorithm::tane, 1, 4, 2);
  CHECK_THROWS_AS(run_discovery(r, tiny), LimitError);
  CHECK_THROWS_WITH(run_discovery(r, tiny),
                    doctest::Contains("memory budget below a single streamed item"));
}

TEST_CASE("relations wider than the set width are refused at load") {
  std::vector<std::string> names;
  std::vector<std::string> row;
  for (int i = 0; i < 65; ++i) {
    names.push_back("c" + std::to_string(i));
    row.push_back("v");
  }
  CHECK_THROWS_AS(relation_from_rows(names, {row}, {}), InputError);
  names.pop_back();
  row.pop_back();
  CHECK_NOTHROW(relation_from_rows(names, {row}, {}));
}

TEST_CASE("empty and single-row relations yield constant rules") {
  Relation one = relation_from_rows({"A", "B"}, {{"x", "y"}}, {});
  for (Algorithm algo : {Algorithm::tane, Algorithm::fastfds, Algorithm::hyfd}) {
    auto result = run_discovery(one, plan(DepKind::fd, algo, 1));
    CAPTURE(algorithm_name(algo));
    CHECK(names_of(result, one) ==
          std::set<std::string>{"TRUE -> A", "TRUE -> B"});
  }
  Relation zero = relation_from_rows({"A", "B"}, {}, {});
  auto result = run_discovery(zero, plan(DepKind::fd, Algorithm::tane, 1));
  CHECK(names_of(result, zero) ==
        std::set<std::string>{"TRUE -> A", "TRUE -> B"});
}

TEST_CASE("data-driven plan reproduces known denial constraints") {
  Relation r = tax();
  auto result = run_discovery(r, plan(DepKind::dc, Algorithm::datadriven, 2, 3));
  auto found = names_of(result, r);
  CHECK(found.count("!( t0.ST == t1.ST & t0.SAL < t1.SAL & t0.TR > t1.TR )") == 1);
  CHECK(result.dependencies.size() > 100);

  auto ldp1 = run_discovery(r, plan(DepKind::dc, Algorithm::datadriven, 1, 3));
  CHECK(names_of(ldp1, r) == found);
}

TEST_CASE("phase estimates follow the published formulas") {
  auto est = estimate_phase_costs(1000, 8, 4, 200, 3200, 1.0);
  CHECK(est.data_driven == doctest::Approx(2.0 * 1000 * 8 / 4 + 8.0 * 250 * 250));
  CHECK(est.schema_driven == doctest::Approx(3200 + 200.0 * 1000));

  auto weighted = estimate_phase_costs(1000, 8, 4, 200, 3200, 0.5);
  CHECK(weighted.data_driven ==
        doctest::Approx(2.0 * 1000 * 8 / 4 + 0.5 * 8.0 * 250 * 250));
  CHECK(weighted.schema_driven == doctest::Approx(3200 + 0.5 * 200.0 * 1000));

  CHECK_THROWS_AS(estimate_phase_costs(10, 2, 0, 1, 1, 1.0), ContractError);
}

TEST_CASE("hybrid plan reports its phase bookkeeping") {
  Relation r = tax();
  auto result = run_discovery(r, plan(DepKind::fd, Algorithm::hyfd, 2, 3));
  CHECK_FALSE(result.phase_trace.empty());
  bool saw_sampling = false, saw_validation = false;
  for (const auto& entry : result.phase_trace) {
    if (entry.phase == "data-driven") saw_sampling = true;
    if (entry.phase == "schema-driven") saw_validation = true;
    CHECK(entry.rounds > 0);
  }
  CHECK(saw_sampling);
  CHECK(saw_validation);
  CHECK(result.counts.count("group_pairs") == 1);
  CHECK(result.counts.at("fully_validated") == 1);
}

TEST_CASE("naive intersection drops split-fragile rules") {
  Relation r = fig2a();
  auto run = run_naive_intersection(r, 2, plan(DepKind::fd, Algorithm::tane, 2));
  CHECK(run.parts == 2);
  CHECK(run.valid_count <= run.naive.size());
  CHECK(run.precision >= 0.0);
  CHECK(run.precision <= 1.0);
  for (const auto& d : run.naive) CHECK(d.kind == DepKind::fd);

  CHECK_THROWS_AS(run_naive_intersection(r, 1, plan(DepKind::fd, Algorithm::tane, 2)),
                  InputError);
  CHECK_THROWS_AS(run_naive_intersection(r, 0, plan(DepKind::fd, Algorithm::tane, 2)),
                  InputError);

  // More parts than rows still works: empty parts determine everything.
  auto wide = run_naive_intersection(r, 7, plan(DepKind::fd, Algorithm::tane, 2));
  CHECK(wide.parts == 7);
  CHECK(wide.precision >= 0.0);
}

TEST_CASE("precision is one when nothing false survives") {
  Relation r = fig2a();
  auto run = run_naive_intersection(r, 2, plan(DepKind::fd, Algorithm::tane, 2));
  // Frozen: this split keeps only rules that hold globally.
  CHECK(run.precision == 1.0);
}

TEST_CASE("ledgers expose stage structure") {
  Relation r = tax();
  auto result = run_discovery(r, plan(DepKind::fd, Algorithm::tane, 1, 4));
  const auto& stages = result.ledger.stages();
  REQUIRE_FALSE(stages.empty());
  for (const auto& s : stages) {
    CHECK_FALSE(s.name.empty());
    CHECK(s.k == 4);
    CHECK(s.bytes_received.size() == 4);
    CHECK(s.x_bytes() <= s.total_bytes());
  }
  CHECK(result.ledger.total_bytes() > 0);
}

TEST_CASE("serialized dependencies are canonical text") {
  Relation r = fig2a();
  auto result = run_discovery(r, plan(DepKind::fd, Algorithm::tane, 2));
  std::string text = dependencies_text(result.dependencies, r.attribute_names());
  CHECK(text ==
        "A,B -> C\nA,B -> D\nA,D -> B\nB,C -> A\nB,C -> D\nB,D -> A\nD -> C\n");

  auto again = run_discovery(r, plan(DepKind::fd, Algorithm::tane, 2));
  CHECK(dependencies_text(again.dependencies, r.attribute_names()) == text);
}

TEST_CASE("result json carries config echo and skips wall time") {
  Relation r = fig2a();
  PlanConfig config = plan(DepKind::fd, Algorithm::hyfd, 2, 3);
  auto result = run_discovery(r, config);
  ordered_json doc = result_json(result, config, r.attribute_names());

  CHECK(doc["config"]["algo"] == "hyfd");
  CHECK(doc["config"]["ldp"] == 2);
  CHECK(doc["config"]["dep"] == "fd");
  CHECK(doc["config"]["workers"] == 3);
  CHECK(doc["dependencies"].size() == 7);
  CHECK(doc["dependencies"][0] == "A,B -> C");
  CHECK(doc["counts"].is_object());
  CHECK_FALSE(doc["phase_trace"].empty());
  REQUIRE(doc["metrics"]["stages"].is_array());
  for (const auto& stage : doc["metrics"]["stages"]) {
    CHECK(stage.contains("name"));
    CHECK(stage.contains("x_bytes"));
    CHECK_FALSE(stage.contains("wall_ms"));
  }

  ordered_json metrics = metrics_json(result);
  REQUIRE(metrics["stages"].is_array());
  if (!metrics["stages"].empty()) CHECK(metrics["stages"][0].contains("wall_ms"));

  // Dumped twice, byte for byte.
  CHECK(result_json(result, config, r.attribute_names()).dump(2) == doc.dump(2));
}

TEST_CASE("plans on generated corpus rows stay seed-stable") {
  Relation r = datagen::corpus_relation(17);
  auto a = run_discovery(r, plan(DepKind::fd, Algorithm::hyfd, 2, 5));
  auto b = run_discovery(r, plan(DepKind::fd, Algorithm::hyfd, 2, 5));
  CHECK(dependencies_text(a.dependencies, r.attribute_names()) ==
        dependencies_text(b.dependencies, r.attribute_names()));
  CHECK(a.ledger.total_bytes() == b.ledger.total_bytes());
  CHECK(a.counts == b.counts);
}
