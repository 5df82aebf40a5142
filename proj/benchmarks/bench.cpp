#include <benchmark/benchmark.h>

#include "loceff/equivalence.hpp"
#include "loceff/generator.hpp"
#include "loceff/interp.hpp"
#include "loceff/parser.hpp"

using namespace loceff;

namespace {

const char* kProgram = R"(signature {
  choose : unit -> bool ;
}

theory choice {
  idem: ; z : unit -> * |- choose((); y. if y then z() else z()) ~ z()
  comm: ; z1 : unit -> *, z2 : unit -> * |- choose((); y. if y then z1() else z2()) ~ choose((); y. if y then z2() else z1())
  assoc: ; z1 : unit -> *, z2 : unit -> *, z3 : unit -> * |- choose((); y. if y then choose((); w. if w then z1() else z2()) else z3()) ~ choose((); y. if y then z1() else choose((); w. if w then z2() else z3()))
}

let coin : bool!{choose}/{comm,idem,assoc} = choose((); b. return b)
)";

struct World {
  Program program;
  Signature sig;
  Theory comm;
  Theory all_theory;
  CompPtr handled;
  CompTypePtr handled_type;
};

const World& world() {
  static const World w = [] {
    World out;
    out.program = parse_program(kProgram, "<bench>");
    out.sig = out.program.decls.sig;
    out.comm = out.program.decls.theory_of({"comm"}, {});
    out.all_theory = out.program.decls.theory_of({"idem", "comm", "assoc"}, {});
    ValuePtr join = parse_value(
        "handler { choose((); k) -> do a <- k true in do b <- k false in "
        "if a then return b else return false } : (bool!{choose}/{}) => (bool!{}/{})",
        out.program.decls);
    CompPtr body = parse_comp(
        "do p <- choose((); b. return b) in do q <- choose((); b. return b) in "
        "if p then return q else return p",
        out.program.decls);
    out.handled = mk_handle(join, body);
    out.handled_type = parse_ctype("bool!{}/{}", out.program.decls);
    return out;
  }();
  return w;
}

TreePtr leaf(bool b) { return tree_return(sem_bool(b)); }
TreePtr node(TreePtr ff_child, TreePtr tt_child) {
  return tree_op("choose", sem_star(), {sem_bool(false), sem_bool(true)},
                 {std::move(ff_child), std::move(tt_child)});
}

void bm_parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(kProgram, "<bench>"));
}
BENCHMARK(bm_parse);

void bm_typecheck(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(check_comp({}, w.handled, w.handled_type));
}
BENCHMARK(bm_typecheck);

void bm_run(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(run(w.handled, 10000, false).steps);
}
BENCHMARK(bm_run);

void bm_denote(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(denote_comp({}, w.handled, w.handled_type, {}));
}
BENCHMARK(bm_denote);

void bm_oracle_build(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) {
    TreeOracle oracle(w.all_theory, w.sig, vt_bool(), static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(oracle.class_count());
  }
}
BENCHMARK(bm_oracle_build)->Arg(2)->Arg(3);

void bm_tree_equiv(benchmark::State& state) {
  const World& w = world();
  TreePtr a = node(node(leaf(false), leaf(true)), leaf(false));
  TreePtr b = node(leaf(false), node(leaf(true), leaf(false)));
  for (auto _ : state) {
    EquivResult r = tree_equiv(a, b, w.comm, w.sig, vt_bool(), {});
    benchmark::DoNotOptimize(r.outcome);
  }
}
BENCHMARK(bm_tree_equiv);

void bm_generate(benchmark::State& state) {
  for (auto _ : state) {
    GenConfig cfg;
    cfg.count = 50;
    benchmark::DoNotOptimize(generate_corpus(cfg).size());
  }
}
BENCHMARK(bm_generate);

}  // namespace

BENCHMARK_MAIN();
