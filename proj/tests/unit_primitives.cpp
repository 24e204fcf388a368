#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "depdisc/datagen.hpp"
#include "depdisc/error.hpp"
#include "depdisc/primitives.hpp"
#include "depdisc/rng.hpp"

using namespace depdisc;

namespace {

Relation fig2a() {
  return load_csv_text("A,B,C,D\na,a,a,a\nb,b,a,a\na,c,a,c\nb,c,d,e\n", {}, "fig2a");
}

std::set<std::vector<uint32_t>> class_set(const Partition& p) {
  std::set<std::vector<uint32_t>> out;
  for (const auto& c : p.classes) {
    auto rows = c.rows;
    std::sort(rows.begin(), rows.end());
    out.insert(rows);
  }
  return out;
}

Bitset bits(std::initializer_list<uint32_t> indices, uint32_t width) {
  Bitset b(width);
  for (uint32_t i : indices) b.set(i);
  return b;
}

}  // namespace

TEST_CASE("stripped partitions on the worked example") {
  Relation r = fig2a();
  auto pa = gen_eq_class(AttributeSet::single(0), r);
  CHECK(pa.class_count == 2);
  CHECK(class_set(pa) == std::set<std::vector<uint32_t>>{{0, 2}, {1, 3}});
  CHECK(pa.stripped_singletons == 0);

  auto pb = gen_eq_class(AttributeSet::single(1), r);
  CHECK(pb.class_count == 3);
  CHECK(class_set(pb) == std::set<std::vector<uint32_t>>{{2, 3}});
  CHECK(pb.stripped_singletons == 2);

  auto pc = gen_eq_class(AttributeSet::single(2), r);
  CHECK(pc.class_count == 2);
  CHECK(class_set(pc) == std::set<std::vector<uint32_t>>{{0, 1, 2}});

  auto pd = gen_eq_class(AttributeSet::single(3), r);
  CHECK(pd.class_count == 3);
  CHECK(class_set(pd) == std::set<std::vector<uint32_t>>{{0, 1}});
}

TEST_CASE("intersection equals direct grouping") {
  Relation r = fig2a();
  auto pb = gen_eq_class(AttributeSet::single(1), r);
  auto pc = gen_eq_class(AttributeSet::single(2), r);
  auto pbc = intersect_partitions(pb, pc, r.row_count());
  CHECK(pbc.class_count == 4);
  CHECK(pbc.classes.empty());
  CHECK(is_ucc(pbc, r.row_count()));

  auto direct = gen_eq_class(AttributeSet::of({1, 2}), r);
  CHECK(direct.class_count == pbc.class_count);
  CHECK(class_set(direct) == class_set(pbc));
}

TEST_CASE("intersection matches direct grouping on random relations") {
  for (uint32_t idx : {5u, 23u, 71u}) {
    Relation r = datagen::corpus_relation(idx);
    if (r.column_count() < 2) continue;
    Rng rng(idx);
    for (int trial = 0; trial < 8; ++trial) {
      uint32_t a = uint32_t(rng.next_below(r.column_count()));
      uint32_t b = uint32_t(rng.next_below(r.column_count()));
      if (a == b) continue;
      auto pa = gen_eq_class(AttributeSet::single(a), r);
      auto pb = gen_eq_class(AttributeSet::single(b), r);
      auto meet = intersect_partitions(pa, pb, r.row_count());
      auto direct = gen_eq_class(AttributeSet::of({a, b}), r);
      CHECK(meet.class_count == direct.class_count);
      CHECK(class_set(meet) == class_set(direct));
    }
  }
}

TEST_CASE("count-based refinement decides FDs") {
  Relation r = fig2a();
  auto holds = [&](AttributeSet lhs, uint32_t rhs) {
    RefinementInput input;
    input.mode = RefinementMode::count_based;
    input.left_count = gen_eq_class(lhs, r).class_count;
    input.combined_count = gen_eq_class(lhs.with(rhs), r).class_count;
    return check_refinement(input);
  };
  CHECK(holds(AttributeSet::single(3), 2));        // D -> C
  CHECK_FALSE(holds(AttributeSet::single(2), 3));  // C -> D
  CHECK(holds(AttributeSet::of({1, 2}), 0));       // B,C -> A
  CHECK(holds(AttributeSet::of({1, 3}), 0));       // B,D -> A
  CHECK_FALSE(holds(AttributeSet::single(0), 1));
}

TEST_CASE("ordered classes sort by code with ties grouped") {
  Relation r = load_csv_text("X,A\n2,5\n1,5\n2,2\n", {}, "t");
  auto oc = ordered_eq_classes(AttributeSet::single(0), r);
  REQUIRE(oc.classes.size() == 2);
  CHECK(oc.classes[0] == std::vector<uint32_t>{1});
  auto second = oc.classes[1];
  std::sort(second.begin(), second.end());
  CHECK(second == std::vector<uint32_t>{0, 2});
  CHECK(oc.total_rows() == 3);
}

TEST_CASE("order-based refinement checks class boundaries") {
  Relation r = load_csv_text("X,A\n1,5\n2,5\n3,2\n", {}, "t");
  auto oc = ordered_eq_classes(AttributeSet::single(0), r);
  RefinementInput input;
  input.mode = RefinementMode::order_based;
  input.left_classes = &oc;
  input.rhs_column = &r.column(1);
  input.direction = OdDirection::desc;
  CHECK(check_refinement(input));
  input.direction = OdDirection::asc;
  CHECK_FALSE(check_refinement(input));

  Relation asc = load_csv_text("X,A\n1,1\n2,1\n3,4\n", {}, "t");
  auto oc2 = ordered_eq_classes(AttributeSet::single(0), asc);
  input.left_classes = &oc2;
  input.rhs_column = &asc.column(1);
  CHECK(check_refinement(input));

  // Mixed order inside one class boundary breaks both directions.
  Relation mixed = load_csv_text("X,A\n1,2\n2,1\n3,4\n", {}, "t");
  auto oc3 = ordered_eq_classes(AttributeSet::single(0), mixed);
  input.left_classes = &oc3;
  input.rhs_column = &mixed.column(1);
  CHECK_FALSE(check_refinement(input));
  input.direction = OdDirection::desc;
  CHECK_FALSE(check_refinement(input));
}

TEST_CASE("evidence sets of the worked example") {
  Relation r = fig2a();
  auto space = PredicateSpace::make(SpaceMode::fd_inequality, r);
  REQUIRE(space.size() == 4);

  CHECK(gen_ev_set(0, 1, r, space) == bits({0, 1}, 4));
  CHECK(gen_ev_set(1, 2, r, space) == bits({0, 1, 3}, 4));
  CHECK(gen_ev_set(0, 3, r, space) == bits({0, 1, 2, 3}, 4));
  CHECK(gen_ev_set(0, 2, r, space) == bits({1, 3}, 4));
  CHECK(gen_ev_set(1, 3, r, space) == bits({1, 2, 3}, 4));
  CHECK(gen_ev_set(2, 3, r, space) == bits({0, 2, 3}, 4));

  CHECK(gen_ev_set(1, 0, r, space) == gen_ev_set(0, 1, r, space));
  CHECK_THROWS_AS(gen_ev_set(2, 2, r, space), ContractError);
}

TEST_CASE("evidence of a duplicate-heavy pair on the tax table") {
  Relation r = load_csv(std::string(DATA_DIR) + "/tax.csv", {});
  auto space = PredicateSpace::make(SpaceMode::fd_inequality, r);
  // Rows t2 and t6 agree everywhere except tid, ID, AC, PH, ZIP.
  auto ev = gen_ev_set(1, 5, r, space);
  std::set<std::string> names;
  for (uint32_t pos : ev.to_indices())
    names.insert(r.attribute_name(space.predicate(pos).attribute));
  CHECK(names == std::set<std::string>{"tid", "ID", "AC", "PH", "ZIP"});
}

TEST_CASE("mirroring evidence swaps order predicates") {
  Relation r = load_csv_text("N,C\n1,x\n2,y\n", {}, "t");
  auto space = PredicateSpace::make(SpaceMode::dc_full, r);
  REQUIRE(space.size() == 8);

  auto ev = gen_ev_set(0, 1, r, space);
  auto back = mirror_evidence(ev, space);
  CHECK(back == gen_ev_set(1, 0, r, space));
  CHECK(mirror_evidence(back, space) == ev);

  // 1 < 2: forward pair satisfies ne/lt/le on N, ne on C.
  CHECK(ev.test(space.position({0, PredOp::ne})));
  CHECK(ev.test(space.position({0, PredOp::lt})));
  CHECK(ev.test(space.position({0, PredOp::le})));
  CHECK_FALSE(ev.test(space.position({0, PredOp::gt})));
  CHECK(back.test(space.position({0, PredOp::gt})));
  CHECK(back.test(space.position({0, PredOp::ge})));
  CHECK(ev.test(space.position({1, PredOp::ne})));
  CHECK_FALSE(ev.test(space.position({1, PredOp::eq})));

  // In the symmetric FD space mirroring is the identity.
  auto fd_space = PredicateSpace::make(SpaceMode::fd_inequality, r);
  auto fd_ev = gen_ev_set(0, 1, r, fd_space);
  CHECK(mirror_evidence(fd_ev, fd_space) == fd_ev);
}

TEST_CASE("null codes never satisfy order predicates") {
  Relation r = load_csv_text("N\n\n4\n", {}, "t");
  const Column& c = r.column(0);
  uint32_t null_code = r.code(0, 0);
  uint32_t four = r.code(1, 0);
  CHECK(predicate_satisfied(c, null_code, null_code, PredOp::eq));
  CHECK_FALSE(predicate_satisfied(c, null_code, four, PredOp::lt));
  CHECK_FALSE(predicate_satisfied(c, four, null_code, PredOp::gt));
  CHECK(predicate_satisfied(c, null_code, four, PredOp::ne));
}

TEST_CASE("window pairs obey the offset rule") {
  std::vector<uint32_t> rows = {5, 9, 2, 7};
  CHECK(window_pairs(rows, 1) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{5, 9}, {9, 2}, {2, 7}});
  CHECK(window_pairs(rows, 2) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{5, 2}, {9, 7}});
  CHECK(window_pairs(rows, 3) == std::vector<std::pair<uint32_t, uint32_t>>{{5, 7}});
  CHECK(window_pairs(rows, 4).empty());
  CHECK(window_pairs(rows, 0).empty());
}

TEST_CASE("local joins") {
  std::vector<int> left = {1, 2, 3}, right = {2, 3, 4};
  auto eq = local_join(std::span<const int>(left), std::span<const int>(right),
                       [](int a, int b) { return a == b; });
  CHECK(eq == std::vector<std::pair<int, int>>{{2, 2}, {3, 3}});

  auto lt = local_self_join(std::span<const int>(left),
                            [](int a, int b) { return a < b; });
  CHECK(lt == std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("minimal covers of the worked example rhs") {
  // Evidence sets that contain A, with A removed: the hitting sets are the
  // candidate left-hand sides for A.
  std::vector<Bitset> sets = {bits({1}, 4), bits({1, 3}, 4), bits({1, 2, 3}, 4),
                              bits({2, 3}, 4)};
  auto covers = minimal_covers(sets, 4);
  REQUIRE(covers.size() == 2);
  std::set<std::vector<uint32_t>> got;
  for (const auto& c : covers) got.insert(c.to_indices());
  CHECK(got == std::set<std::vector<uint32_t>>{{1, 2}, {1, 3}});
}

TEST_CASE("minimal covers properties on random inputs") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    uint32_t width = 2 + uint32_t(rng.next_below(7));
    uint32_t count = 1 + uint32_t(rng.next_below(10));
    std::vector<Bitset> sets;
    for (uint32_t s = 0; s < count; ++s) {
      Bitset b(width);
      for (uint32_t i = 0; i < width; ++i)
        if (rng.next_below(3) == 0) b.set(i);
      if (b.any()) sets.push_back(b);
    }
    if (sets.empty()) continue;
    auto covers = minimal_covers(sets, width);

    auto hits_all = [&](const Bitset& cand) {
      for (const auto& s : sets)
        if (!cand.intersects(s)) return false;
      return true;
    };
    for (const auto& c : covers) CHECK(hits_all(c));
    for (size_t i = 0; i < covers.size(); ++i)
      for (size_t j = 0; j < covers.size(); ++j)
        if (i != j) CHECK_FALSE(covers[i].is_subset_of(covers[j]));

    // Exhaustive cross-check: every minimal hitting set is reported.
    std::set<std::vector<uint32_t>> got;
    for (const auto& c : covers) got.insert(c.to_indices());
    for (uint32_t mask = 1; mask < (1u << width); ++mask) {
      Bitset cand(width);
      for (uint32_t i = 0; i < width; ++i)
        if (mask & (1u << i)) cand.set(i);
      if (!hits_all(cand)) continue;
      bool minimal = true;
      for (uint32_t i = 0; i < width && minimal; ++i) {
        if (!cand.test(i)) continue;
        Bitset sub = cand;
        sub.reset(i);
        if (sub.any() && hits_all(sub)) minimal = false;
        if (!sub.any()) minimal = minimal && !hits_all(sub);
      }
      if (minimal) CHECK(got.count(cand.to_indices()) == 1);
    }
  }
}

TEST_CASE("fds from the worked example evidence") {
  Relation r = fig2a();
  auto space = PredicateSpace::make(SpaceMode::fd_inequality, r);
  std::vector<EvidenceSet> evidence;
  for (uint32_t i = 0; i < 4; ++i)
    for (uint32_t j = i + 1; j < 4; ++j) evidence.push_back(gen_ev_set(i, j, r, space));

  auto fds = fds_from_evidence(evidence, r.column_count());
  sort_canonical(fds, r.attribute_names());
  std::vector<std::string> rendered;
  for (const auto& d : fds) rendered.push_back(d.render(r.attribute_names()));
  CHECK(rendered == std::vector<std::string>{"A,B -> C", "A,B -> D", "A,D -> B",
                                             "B,C -> A", "B,C -> D", "B,D -> A",
                                             "D -> C"});
}

TEST_CASE("empty evidence means every attribute is constant") {
  auto fds = fds_from_evidence({}, 3);
  CHECK(fds.size() == 3);
  for (const auto& d : fds) CHECK(d.lhs.empty());
}

TEST_CASE("dcs from evidence on an anti-correlated pair") {
  Relation r = load_csv_text("A,B\n1,2\n2,1\n", {}, "t");
  auto space = PredicateSpace::make(SpaceMode::dc_full, r);
  std::vector<EvidenceSet> evidence;
  for (uint32_t i = 0; i < 2; ++i)
    for (uint32_t j = 0; j < 2; ++j)
      if (i != j) evidence.push_back(gen_ev_set(i, j, r, space));

  auto dcs = dcs_from_evidence(evidence, space);
  std::set<std::string> rendered;
  for (const auto& d : dcs) rendered.insert(d.render(r.attribute_names()));
  CHECK(rendered.count("!( t0.A == t1.A )") == 1);
  CHECK(rendered.count("!( t0.A < t1.A & t0.B < t1.B )") == 1);
  // A satisfied predicate set is never emitted as a constraint.
  CHECK(rendered.count("!( t0.A < t1.A )") == 0);

  for (const auto& d : dcs) {
    Bitset pred_bits = space.empty_set();
    for (const auto& p : d.predicates) pred_bits.set(space.position(p));
    for (const auto& ev : evidence) CHECK_FALSE(pred_bits.is_subset_of(ev));
  }
}

TEST_CASE("trivial dcs are filtered unless asked for") {
  Relation r = load_csv_text("A\n1\n1\n", {}, "t");
  auto space = PredicateSpace::make(SpaceMode::dc_full, r);
  std::vector<EvidenceSet> evidence = {gen_ev_set(0, 1, r, space),
                                       gen_ev_set(1, 0, r, space)};
  auto strict = dcs_from_evidence(evidence, space);
  for (const auto& d : strict) {
    Bitset b = space.empty_set();
    for (const auto& p : d.predicates) b.set(space.position(p));
    CHECK(predicate_set_satisfiable(b, space));
  }
  auto all = dcs_from_evidence(evidence, space, true);
  CHECK(all.size() >= strict.size());
}

TEST_CASE("predicate set satisfiability") {
  Relation r = load_csv_text("N,C\n1,x\n2,y\n", {}, "t");
  auto space = PredicateSpace::make(SpaceMode::dc_full, r);
  auto set_of = [&](std::vector<Predicate> preds) {
    Bitset b = space.empty_set();
    for (const auto& p : preds) b.set(space.position(p));
    return b;
  };
  CHECK(predicate_set_satisfiable(set_of({{0, PredOp::lt}, {1, PredOp::eq}}), space));
  CHECK(predicate_set_satisfiable(set_of({{0, PredOp::lt}, {0, PredOp::le}}), space));
  CHECK_FALSE(predicate_set_satisfiable(set_of({{0, PredOp::lt}, {0, PredOp::gt}}), space));
  CHECK_FALSE(predicate_set_satisfiable(set_of({{0, PredOp::eq}, {0, PredOp::ne}}), space));
  CHECK_FALSE(predicate_set_satisfiable(set_of({{1, PredOp::eq}, {1, PredOp::ne}}), space));
  CHECK_FALSE(predicate_set_satisfiable(set_of({{0, PredOp::eq}, {0, PredOp::lt}}), space));
}

TEST_CASE("ucc check counts distinct rows") {
  Relation r = fig2a();
  CHECK_FALSE(is_ucc(gen_eq_class(AttributeSet::single(0), r), r.row_count()));
  CHECK(is_ucc(gen_eq_class(AttributeSet::of({0, 1}), r), r.row_count()));
  CHECK(is_ucc(gen_eq_class(AttributeSet::of({0, 3}), r), r.row_count()));
  CHECK_FALSE(is_ucc(gen_eq_class(AttributeSet::of({0, 2}), r), r.row_count()));
}
