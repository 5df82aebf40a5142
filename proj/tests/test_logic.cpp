#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loceff/logic.hpp"

using namespace loceff;

namespace {

ProofNodePtr pn(ProofNode n) { return std::make_shared<const ProofNode>(std::move(n)); }

struct CommWorld {
  Signature sig;
  Theory comm;
  CompTypePtr source;
  CompTypePtr target;
  OpClauses pick;
};

const CommWorld& comm_world() {
  static const CommWorld w = [] {
    CommWorld out;
    out.sig = make_signature({{"choose", OpSig{vt_unit(), vt_bool()}}});
    auto tmpl_ctx = std::vector<std::pair<std::string, ValueTypePtr>>{{"z1", vt_unit()},
                                                                      {"z2", vt_unit()}};
    TemplatePtr lhs = mk_top(
        "choose", mk_unit(), "b",
        mk_tif(mk_bound(0, "b"), mk_tvar("z1", mk_unit()), mk_tvar("z2", mk_unit())));
    TemplatePtr rhs = mk_top(
        "choose", mk_unit(), "b",
        mk_tif(mk_bound(0, "b"), mk_tvar("z2", mk_unit()), mk_tvar("z1", mk_unit())));
    out.comm = make_theory({Equation{"comm", {}, tmpl_ctx, lhs, rhs}});
    out.source = ct(vt_bool(), out.sig, out.comm);
    out.target = ct(vt_bool(), {}, {});
    out.pick["choose"] = OpClause{"x", "k", mk_apply(mk_bound(0, "k"), mk_bool(true))};
    return out;
  }();
  return w;
}

}  // namespace

TEST_CASE("pushing a template through clauses substitutes the continuation") {
  const CommWorld& w = comm_world();
  TemplatePtr lhs = w.comm.equations.at(0).lhs;
  TemplatePtr rhs = w.comm.equations.at(0).rhs;
  std::map<std::string, ValuePtr> fns{{"z1", mk_free("f1")}, {"z2", mk_free("f2")}};
  CHECK(print_comp(thandle(w.pick, lhs, fns)) == "(fun b -> if b then f1 () else f2 ()) true");
  CHECK(print_comp(thandle(w.pick, rhs, fns)) == "(fun b -> if b then f2 () else f1 ()) true");
}

TEST_CASE("a beta chain proves a branch-collapsing goal") {
  CompTypePtr pure_bool = ct(vt_bool(), {}, {});
  Ctx ctx{{"f", vt_fn(vt_unit(), pure_bool)}};
  CompPtr call_f = mk_apply(mk_free("f"), mk_unit());
  ValuePtr branchy = mk_lambda("y", mk_if(mk_bound(0, "y"), call_f, call_f));
  CompPtr redex = mk_apply(branchy, mk_bool(true));
  CompPtr after_beta = mk_if(mk_bool(true), call_f, call_f);
  ProofNodePtr script =
      pn({.tag = "trans",
          .children = {pn({.tag = "beta_apply", .comp = redex, .ctype = pure_bool}),
                       pn({.tag = "beta_if_true", .comp = after_beta, .ctype = pure_bool})}});
  NamedProof p{"collapse", ctx, {}, f_comp_eq(redex, call_f, pure_bool), true, script, {}};
  CHECK(check_named_proof(p).empty());
}

TEST_CASE("induction proves the eta law for sequencing") {
  Signature tick_sig = make_signature({{"tick", OpSig{vt_unit(), vt_unit()}}});
  CompTypePtr d_tick = ct(vt_unit(), tick_sig, {});
  CompPtr hole = mk_hole();
  FormulaPtr schema = f_comp_eq(mk_do("x", hole, mk_return(mk_bound(0, "x"))), hole, d_tick);
  CompPtr subject = mk_op("tick", mk_unit(), "y", mk_return(mk_unit()));
  ProofNodePtr ret_case =
      pn({.tag = "beta_do_return",
          .comp = mk_do("x", mk_return(mk_free("xr")), mk_return(mk_bound(0, "x"))),
          .ctype = d_tick});
  CompPtr op_redex =
      mk_do("x", mk_op("tick", mk_free("xa"), "y", mk_apply(mk_free("k"), mk_bound(0, "y"))),
            mk_return(mk_bound(0, "x")));
  ProofNodePtr op_inner = pn(
      {.tag = "trans",
       .children = {
           pn({.tag = "beta_do_op", .comp = op_redex, .ctype = d_tick}),
           pn({.tag = "cong_op",
               .ctype = d_tick,
               .op = "tick",
               .binder = "y",
               .children = {pn({.tag = "refl", .value = mk_free("xa"), .vtype = vt_unit()}),
                            pn({.tag = "forall_elim",
                                .value = mk_free("y"),
                                .children = {pn({.tag = "hyp", .index = size_t{0}})}})}})}});
  ProofNodePtr op_case = pn({.tag = "case",
                             .op = "tick",
                             .binder = "xa",
                             .cont = "k",
                             .children = {op_inner}});
  ProofNodePtr ind = pn({.tag = "induction",
                         .comp = subject,
                         .ctype = d_tick,
                         .formula = schema,
                         .binder = "xr",
                         .children = {ret_case, op_case}});
  NamedProof p{"eta_via_ind",
               {},
               {},
               f_comp_eq(mk_do("x", subject, mk_return(mk_bound(0, "x"))), subject, d_tick),
               false,
               ind,
               {}};
  CHECK(check_named_proof(p).empty());
}

TEST_CASE("the equational fragment rejects hypothesis references") {
  CompTypePtr pure_bool = ct(vt_bool(), {}, {});
  Ctx ctx{{"f", vt_fn(vt_unit(), pure_bool)}};
  CompPtr call_f = mk_apply(mk_free("f"), mk_unit());
  NamedProof p{"bad",        ctx, {}, f_comp_eq(call_f, call_f, pure_bool), true,
               pn({.tag = "hyp", .index = size_t{0}}), {}};
  auto diags = check_named_proof(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message == "hyp is outside the equational fragment");
}

TEST_CASE("a first-branch handler refutes commutativity with a replayable witness") {
  const CommWorld& w = comm_world();
  VHandler h{"x", mk_return(mk_bound(0, "x")), w.pick, std::nullopt, std::nullopt};
  RespectsConfig cfg;
  cfg.mode = RespectsMode::Auto;
  RespectsReport rep = check_respects(h, w.source, w.target, cfg);
  CHECK(rep.verdict == RespectsVerdict::No);
  REQUIRE(rep.counterexample.has_value());
  CHECK(rep.counterexample->label == "comm");
  CHECK(print_tree(rep.counterexample->lhs) == "return tt");
  CHECK(print_tree(rep.counterexample->rhs) == "return ff");
  CHECK(replay_counterexample(h, w.source, w.target, *rep.counterexample));
  REQUIRE_FALSE(rep.diags.empty());
  CHECK(rep.diags[0].code == "RespectsFailed");
  CHECK(rep.diags[0].message == "equation comm is broken: return tt vs return ff at depth 2");
}

TEST_CASE("a branch-joining handler respects commutativity") {
  const CommWorld& w = comm_world();
  CompPtr and_body = mk_do(
      "a", mk_apply(mk_bound(0, "k"), mk_bool(true)),
      mk_do("b", mk_apply(mk_bound(1, "k"), mk_bool(false)),
            mk_if(mk_bound(1, "a"),
                  mk_if(mk_bound(0, "b"), mk_return(mk_bool(true)), mk_return(mk_bool(false))),
                  mk_return(mk_bool(false)))));
  OpClauses clauses;
  clauses["choose"] = OpClause{"x", "k", and_body};
  VHandler h{"x", mk_return(mk_bound(0, "x")), clauses, std::nullopt, std::nullopt};
  RespectsConfig cfg;
  cfg.mode = RespectsMode::Auto;
  RespectsReport rep = check_respects(h, w.source, w.target, cfg);
  CHECK(rep.verdict == RespectsVerdict::Yes);
  CHECK(rep.diags.empty());
}

TEST_CASE("an empty theory is respected by any handler") {
  const CommWorld& w = comm_world();
  VHandler h{"x", mk_return(mk_bound(0, "x")), w.pick, std::nullopt, std::nullopt};
  RespectsConfig cfg;
  cfg.mode = RespectsMode::Auto;
  RespectsReport rep = check_respects(h, ct(vt_bool(), w.sig, {}), w.target, cfg);
  CHECK(rep.verdict == RespectsVerdict::Yes);
}

TEST_CASE("formulas print with explicit types") {
  CHECK(print_formula(f_forall(
            "x", vt_bool(),
            f_implies(f_true(), f_value_eq(mk_bound(0, "x"), mk_bound(0, "x"), vt_bool())))) ==
        "forall x : bool . top => x == x @ bool");
}
