#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loceff/interp.hpp"
#include "loceff/parser.hpp"
#include "loceff/typecheck.hpp"

using namespace loceff;

namespace {

const char* kPrelude = R"(signature {
  choose : unit -> bool ;
  yield : bool -> unit ;
}

theory choice {
  comm: ; z1 : unit -> *, z2 : unit -> * |- choose((); y. if y then z1() else z2()) ~ choose((); y. if y then z2() else z1())
}
)";

const Decls& decls() {
  static const Decls d = parse_program(kPrelude, "<test>").decls;
  return d;
}

CompPtr comp(const std::string& s) { return parse_comp(s, decls()); }
ValuePtr value(const std::string& s) { return parse_value(s, decls()); }
CompTypePtr ctype(const std::string& s) { return parse_ctype(s, decls()); }

}  // namespace

TEST_CASE("printing reparses to an alpha-equal term") {
  std::vector<std::string> sources = {
      "return true",
      "if true then return false else return true",
      "(fun x -> if x then return x else return false) true",
      "do x <- choose((); y. return y) in yield(x; u. return u)",
      "with handler { choose((); k) -> k true } handle choose((); y. return y)",
      "with handler { choose((); k) -> do a <- k true in k a | return x -> yield(x; u. return ()) } handle choose((); y. return y)",
  };
  for (const auto& s : sources) {
    CAPTURE(s);
    CompPtr c = comp(s);
    CompPtr again = comp(print_comp(c));
    CHECK(alpha_equal(c, again));
  }
}

TEST_CASE("alpha equality ignores binder hints") {
  CHECK(alpha_equal(value("fun a -> return a"), value("fun b -> return b")));
  CHECK_FALSE(alpha_equal(value("fun a -> return a"), value("fun a -> return true")));
}

TEST_CASE("close then open round trips a free name") {
  CompPtr c = comp("do x <- f () in g x");
  CompPtr closed = close_comp(c, "f");
  CHECK_FALSE(free_names(closed).count("f"));
  CHECK(free_names(closed).count("g"));
  CHECK(alpha_equal(open_comp(closed, {mk_free("f")}), c));
}

TEST_CASE("substitution avoids capturing binder hints") {
  ValuePtr v = value("fun x -> return y");
  ValuePtr substituted = subst(v, {{"y", mk_free("x")}});
  ValuePtr reparsed = value(print_value(substituted));
  CHECK(alpha_equal(substituted, reparsed));
  CHECK_FALSE(alpha_equal(substituted, value("fun x -> return x")));
}

TEST_CASE("typechecker accepts well-typed terms") {
  CHECK(check_comp({}, comp("return true"), ctype("bool!{}/{}")).empty());
  CHECK(check_comp({}, comp("choose((); y. return y)"), ctype("bool!{choose}/{comm}")).empty());
  CHECK(check_comp({}, comp("do x <- choose((); y. return y) in return x"),
                   ctype("bool!{choose}/{}"))
            .empty());
}

TEST_CASE("typechecker rejects ill-typed terms") {
  CHECK_FALSE(check_comp({}, comp("return true"), ctype("unit!{}/{}")).empty());
  CHECK_FALSE(check_comp({}, comp("choose((); y. return y)"), ctype("bool!{}/{}")).empty());
  CHECK_FALSE(check_comp({}, comp("if () then return true else return false"),
                         ctype("bool!{}/{}"))
                  .empty());
}

TEST_CASE("handler typing requires the exact target type") {
  ValuePtr h = value("handler { choose((); k) -> k true }");
  CHECK(check_value({}, h, parse_vtype("(bool!{choose}/{}) => (bool!{}/{})", decls())).empty());
  CHECK_FALSE(
      check_value({}, h, parse_vtype("(bool!{choose}/{}) => (unit!{}/{})", decls()))
          .empty());
}

TEST_CASE("running a handled computation yields a value") {
  RunResult r = run(
      comp("with handler { choose((); k) -> k true } handle choose((); y. return y)"));
  REQUIRE(r.kind == RunResult::Kind::Value);
  CHECK(print_run_result(r) == "return true");
}

TEST_CASE("an unhandled operation stops the run") {
  RunResult r = run(comp("do u <- yield(true; w. return w) in return ()"));
  REQUIRE(r.kind == RunResult::Kind::OpStopped);
  CHECK(r.op == "yield");
  CHECK(print_run_result(r) == "opStopped(yield, true)");
}

TEST_CASE("deep handlers keep handling the resumed continuation") {
  RunResult r = run(comp("with handler { choose((); k) -> do a <- k true in k false "
                         "| return x -> return x } "
                         "handle do p <- choose((); y. return y) in "
                         "do q <- choose((); z. return z) in "
                         "if p then return q else return p"));
  REQUIRE(r.kind == RunResult::Kind::Value);
  CHECK(print_run_result(r) == "return false");
}

TEST_CASE("stepping is deterministic") {
  CompPtr c = comp("do x <- (fun y -> return y) true in if x then return false else return x");
  RunResult a = run(c);
  RunResult b = run(c);
  CHECK(a.steps == b.steps);
  CHECK(print_run_result(a) == print_run_result(b));
}
