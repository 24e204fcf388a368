#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "depdisc/error.hpp"
#include "depdisc/oracle.hpp"
#include "depdisc/plans.hpp"
#include "depdisc/serialize.hpp"

namespace py = pybind11;
using namespace depdisc;

namespace {

const std::map<std::string, DepKind> kDeps = {
    {"fd", DepKind::fd}, {"ucc", DepKind::ucc}, {"od", DepKind::od}, {"dc", DepKind::dc}};

const std::map<std::string, Algorithm> kAlgos = {{"tane", Algorithm::tane},
                                                 {"fastfds", Algorithm::fastfds},
                                                 {"hyfd", Algorithm::hyfd},
                                                 {"datadriven", Algorithm::datadriven}};

DepKind dep_from(const std::string& name) {
  auto it = kDeps.find(name);
  if (it == kDeps.end()) throw InputError("unknown dependency kind: " + name);
  return it->second;
}

Algorithm algo_from(const std::string& name) {
  auto it = kAlgos.find(name);
  if (it == kAlgos.end()) throw InputError("unknown algorithm: " + name);
  return it->second;
}

std::string discover_json(const Relation& r, const std::string& dep,
                          const std::string& algo, int ldp, uint32_t workers,
                          uint64_t memory_budget, uint64_t seed, bool keep_trivial) {
  PlanConfig config;
  config.dep = dep_from(dep);
  config.algo = algo_from(algo);
  config.ldp = ldp;
  config.cluster.workers = workers;
  config.cluster.memory_budget = memory_budget;
  config.cluster.seed = seed;
  config.sampling_seed = seed;
  config.keep_trivial = keep_trivial;
  DiscoveryResult result = run_discovery(r, config);
  return result_json(result, config, r.attribute_names()).dump();
}

std::string oracle_json(const Relation& r, const std::string& dep, uint32_t max_rows,
                        uint32_t max_cols, uint32_t max_dc_predicates,
                        bool keep_trivial) {
  oracle::OracleLimits limits;
  limits.max_rows = max_rows;
  limits.max_cols = max_cols;
  limits.max_dc_predicates = max_dc_predicates;

  std::vector<Dependency> deps;
  switch (dep_from(dep)) {
    case DepKind::fd: deps = oracle::brute_fds(r, limits); break;
    case DepKind::ucc: deps = oracle::brute_uccs(r, limits); break;
    case DepKind::od: deps = oracle::brute_ods(r, limits); break;
    case DepKind::dc: deps = oracle::brute_dcs(r, limits, keep_trivial); break;
  }
  ordered_json doc;
  doc["dep"] = dep;
  doc["count"] = deps.size();
  doc["dependencies"] = ordered_json::array();
  for (const auto& d : deps) doc["dependencies"].push_back(d.render(r.attribute_names()));
  return doc.dump();
}

std::string precision_json(const Relation& r, uint32_t parts, uint64_t seed) {
  PlanConfig config;
  config.dep = DepKind::fd;
  config.algo = Algorithm::tane;
  config.ldp = 2;
  config.cluster.seed = seed;
  config.sampling_seed = seed;
  PrecisionRun run = run_naive_intersection(r, parts, config);
  ordered_json doc;
  doc["parts"] = run.parts;
  doc["naive"] = run.naive.size();
  doc["valid"] = run.valid_count;
  doc["precision"] = run.precision;
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_depdisc, m) {
  m.doc() = "Dependency discovery (FD/UCC/OD/DC) over a metered multi-worker runtime";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<LimitError>(m, "LimitError", PyExc_RuntimeError);

  py::class_<Relation>(m, "Relation")
      .def_property_readonly("rows", &Relation::row_count)
      .def_property_readonly("columns", &Relation::column_count)
      .def_property_readonly("names", &Relation::attribute_names)
      .def("__repr__", [](const Relation& r) {
        return "<Relation " + std::to_string(r.row_count()) + "x" +
               std::to_string(r.column_count()) + ">";
      });

  m.def(
      "load_csv",
      [](const std::string& path, bool null_unequal) {
        LoadOptions options;
        options.null_unequal = null_unequal;
        return load_csv(path, options);
      },
      py::arg("path"), py::arg("null_unequal") = false,
      "Load and dictionary-encode a CSV file");

  m.def("discover_json", &discover_json, py::arg("relation"), py::arg("dep"),
        py::arg("algo"), py::arg("ldp") = 1, py::arg("workers") = 1,
        py::arg("memory_budget") = 0, py::arg("seed") = 0,
        py::arg("keep_trivial") = false,
        "Run a discovery plan; returns the result document as a JSON string");

  m.def("oracle_json", &oracle_json, py::arg("relation"), py::arg("dep"),
        py::arg("max_rows") = 500, py::arg("max_cols") = 8,
        py::arg("max_dc_predicates") = 3, py::arg("keep_trivial") = false,
        "Exhaustive reference discovery; returns a JSON string");

  m.def("precision_json", &precision_json, py::arg("relation"), py::arg("parts"),
        py::arg("seed") = 0,
        "Split-and-intersect FD precision experiment; returns a JSON string");
}
