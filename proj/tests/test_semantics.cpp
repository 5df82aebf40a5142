#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loceff/equivalence.hpp"
#include "loceff/parser.hpp"

using namespace loceff;

namespace {

const char* kPrelude = R"(signature {
  choose : unit -> bool ;
  yield : bool -> unit ;
}

theory choice {
  idem: ; z : unit -> * |- choose((); y. if y then z() else z()) ~ z()
  assoc: ; z1 : unit -> *, z2 : unit -> *, z3 : unit -> * |- choose((); y. if y then choose((); w. if w then z1() else z2()) else z3()) ~ choose((); y. if y then z1() else choose((); w. if w then z2() else z3()))
  comm: ; z1 : unit -> *, z2 : unit -> * |- choose((); y. if y then z1() else z2()) ~ choose((); y. if y then z2() else z1())
}
)";

struct World {
  Decls decls;
  Signature choose_sig;
  Signature yield_sig;
  Theory idem, comm, all;
};

const World& world() {
  static const World w = [] {
    World out;
    out.decls = parse_program(kPrelude, "<test>").decls;
    out.choose_sig = make_signature({{"choose", OpSig{vt_unit(), vt_bool()}}});
    out.yield_sig = make_signature({{"yield", OpSig{vt_bool(), vt_unit()}}});
    out.idem = out.decls.theory_of({"idem"}, {});
    out.comm = out.decls.theory_of({"comm"}, {});
    out.all = out.decls.theory_of({"idem", "comm", "assoc"}, {});
    return out;
  }();
  return w;
}

TreePtr leaf(bool b) { return tree_return(sem_bool(b)); }
TreePtr node(TreePtr ff_child, TreePtr tt_child) {
  return tree_op("choose", sem_star(), {sem_bool(false), sem_bool(true)},
                 {std::move(ff_child), std::move(tt_child)});
}

}  // namespace

TEST_CASE("universe sizes at bool leaves over one binary operation") {
  const Signature& sig = world().choose_sig;
  CHECK(universe_estimate(sig, vt_bool(), 0, 100000) == 2);
  CHECK(universe_estimate(sig, vt_bool(), 1, 100000) == 6);
  CHECK(universe_estimate(sig, vt_bool(), 2, 100000) == 38);
  CHECK(universe_estimate(sig, vt_bool(), 3, 100000) == 1446);
  CHECK(universe_estimate(sig, vt_bool(), 4, 100000) == 100001);
}

TEST_CASE("universe sizes at unit leaves over a unary operation") {
  const Signature& sig = world().yield_sig;
  CHECK(universe_estimate(sig, vt_unit(), 2, 100000) == 7);
  CHECK(universe_estimate(sig, vt_unit(), 3, 100000) == 15);
  CHECK(universe_estimate(sig, vt_unit(), 4, 100000) == 31);
}

TEST_CASE("both directions of a balanced equation become rules") {
  CompiledRules rules = compile_rules(world().comm, world().choose_sig);
  CHECK(rules.rules.size() == 2);
  CHECK(rules.warnings.empty());
}

TEST_CASE("unbalanced directions are dropped with a warning") {
  auto tv = [](const char* z) { return mk_tvar(z, mk_unit()); };
  Equation grow{"grow",
                {},
                {{"z1", vt_unit()}, {"z2", vt_unit()}},
                tv("z1"),
                mk_top("choose", mk_unit(), "b",
                       mk_tif(mk_bound(0, "b"), tv("z1"), tv("z2")))};
  CompiledRules rules = compile_rules(make_theory({grow}), world().choose_sig);
  REQUIRE(rules.rules.size() == 1);
  CHECK(rules.rules[0].label == "grow");
  CHECK_FALSE(rules.rules[0].forward);
  CHECK(rules.warnings.size() == 1);
}

TEST_CASE("the oracle partitions the commutativity universe") {
  TreeOracle d1(world().comm, world().choose_sig, vt_bool(), 1);
  CHECK(d1.universe_size() == 6);
  CHECK(d1.class_count() == 5);

  TreeOracle d2(world().comm, world().choose_sig, vt_bool(), 2);
  CHECK(d2.universe_size() == 38);
  CHECK(d2.class_count() == 17);

  TreeOracle d3(world().comm, world().choose_sig, vt_bool(), 3);
  CHECK(d3.universe_size() == 1446);
  CHECK(d3.class_count() == 155);
}

TEST_CASE("oracle queries distinguish swapped children from distinct leaves") {
  TreeOracle oracle(world().comm, world().choose_sig, vt_bool(), 1);
  CHECK(oracle.query(node(leaf(false), leaf(true)), node(leaf(true), leaf(false))) ==
        TreeOracle::Relation::Related);
  CHECK(oracle.query(node(leaf(false), leaf(false)), node(leaf(true), leaf(true))) ==
        TreeOracle::Relation::NotRelated);
  CHECK(oracle.query(leaf(true), leaf(false)) == TreeOracle::Relation::NotRelated);
  CHECK(oracle.query(node(node(leaf(false), leaf(true)), leaf(true)),
                     node(node(leaf(false), leaf(true)), leaf(true))) ==
        TreeOracle::Relation::OutsideUniverse);
}

TEST_CASE("idempotence collapses the depth-two universe to fourteen classes") {
  TreeOracle oracle(world().idem, world().choose_sig, vt_bool(), 2);
  CHECK(oracle.universe_size() == 38);
  CHECK(oracle.class_count() == 14);
}

TEST_CASE("the full semilattice theory has three classes at depth three") {
  TreeOracle oracle(world().all, world().choose_sig, vt_bool(), 3);
  CHECK(oracle.universe_size() == 1446);
  CHECK(oracle.class_count() == 3);
}

TEST_CASE("an oversized universe is rejected") {
  CHECK_THROWS_AS(TreeOracle(world().comm, world().choose_sig, vt_bool(), 4), Error);
}

TEST_CASE("rewrite search relates swapped children and replays its path") {
  TreePtr a = node(leaf(false), leaf(true));
  TreePtr b = node(leaf(true), leaf(false));
  EquivBounds bounds;
  EquivResult r = tree_equiv(a, b, world().comm, world().choose_sig, vt_bool(), bounds);
  REQUIRE(r.outcome == EquivOutcome::Related);
  CHECK(r.path.size() + r.path_from_b.size() == 1);
  CHECK(replay_path(a, b, r.path, r.path_from_b, world().comm, world().choose_sig, vt_bool()));
}

TEST_CASE("distinct leaves are refuted through the oracle fallback") {
  EquivResult r =
      tree_equiv(leaf(true), leaf(false), world().comm, world().choose_sig, vt_bool(), {});
  CHECK(r.outcome == EquivOutcome::RefutedWithinBound);
  REQUIRE(r.oracle_depth.has_value());
  CHECK(*r.oracle_depth == 3);
}

TEST_CASE("search meets in the middle on nested swaps") {
  TreePtr a = node(node(leaf(false), leaf(true)), leaf(false));
  TreePtr b = node(leaf(false), node(leaf(true), leaf(false)));
  EquivResult r = tree_equiv(a, b, world().comm, world().choose_sig, vt_bool(), {});
  REQUIRE(r.outcome == EquivOutcome::Related);
  CHECK(r.path.size() == 1);
  CHECK(r.path_from_b.size() == 1);
  CHECK(replay_path(a, b, r.path, r.path_from_b, world().comm, world().choose_sig, vt_bool()));
}

TEST_CASE("the logical relation is pointwise at function types") {
  EquivBounds bounds;
  CHECK(rel_comp(ct(vt_bool(), world().choose_sig, world().comm), node(leaf(false), leaf(true)),
                 node(leaf(true), leaf(false)), bounds) == RelOutcome::Related);
  CHECK(rel_value(vt_fn(vt_bool(), ct(vt_bool(), world().choose_sig, world().comm)),
                  sem_table({sem_bool(false), sem_bool(true)},
                            {node(leaf(false), leaf(true)), leaf(false)}),
                  sem_table({sem_bool(false), sem_bool(true)},
                            {node(leaf(true), leaf(false)), leaf(false)}),
                  bounds) == RelOutcome::Related);
}
