#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "loceff/driver.hpp"

using namespace loceff;

namespace {

struct CmdResult {
  int code;
  std::string out;
  std::string err;
};

CmdResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) {
  return std::string(LOCEFF_CORPUS_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("check accepts every corpus program") {
  for (const char* name :
       {"pickleft.lae", "yieldall.lae", "nondet.lae", "collect.lae", "generators.lae"}) {
    CAPTURE(name);
    CmdResult r = cli({"check", corpus(name)});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
  }
}

TEST_CASE("check reports inferred types") {
  CmdResult r = cli({"check", corpus("pickleft.lae")});
  CHECK(contains(r.out, "pickLeft : (bool!{choose}/{assoc, idem}) => (bool!{}/{})"));
  CHECK(contains(r.out, "demo : bool!{}/{}"));
}

TEST_CASE("run evaluates closed terms") {
  CmdResult demo = cli({"run", corpus("pickleft.lae"), "--term", "demo"});
  CHECK(demo.code == 0);
  CHECK(demo.out == "return true\n");

  CmdResult pair = cli({"run", corpus("yieldall.lae"), "--term", "pair"});
  CHECK(pair.code == 0);
  CHECK(pair.out == "opStopped(yield, true)\n");
}

TEST_CASE("denote prints trees in the free model") {
  CmdResult demo = cli({"denote", corpus("pickleft.lae"), "--term", "demo"});
  CHECK(demo.code == 0);
  CHECK(demo.out == "return tt\n");

  CmdResult pair = cli({"denote", corpus("yieldall.lae"), "--term", "pair"});
  CHECK(pair.code == 0);
  CHECK(pair.out == "yield(tt){ ⋆ => yield(ff){ ⋆ => return ⋆ } }\n");
}

TEST_CASE("verify accepts the annotated corpus handlers") {
  CmdResult pick = cli({"verify", corpus("pickleft.lae"), "--handler", "pickLeft"});
  CHECK(pick.code == 0);
  CHECK(contains(pick.out, "pickLeft respects the theory"));

  CmdResult yield = cli({"verify", corpus("yieldall.lae"), "--handler", "yieldAll"});
  CHECK(yield.code == 0);
  CHECK(contains(yield.out, "yieldAll respects the theory"));
}

TEST_CASE("verify refutes an overridden theory with a replayed witness") {
  CmdResult r = cli({"verify", corpus("pickleft.lae"), "--handler", "pickLeft", "--theory",
                     "comm", "--auto"});
  CHECK(r.code == 1);
  CHECK(contains(r.err,
                 "RespectsFailed: equation comm is broken: return tt vs return ff at depth 2"));
  CHECK(contains(r.out, "pickLeft breaks equation comm"));
  CHECK(contains(r.out, "z1 := {⋆ => return tt}"));
  CHECK(contains(r.out, "z2 := {⋆ => return ff}"));
  CHECK(contains(r.out, "left  return tt"));
  CHECK(contains(r.out, "right return ff"));
  CHECK(contains(r.out, "replayed: yes"));
}

TEST_CASE("prove checks every imported script") {
  CmdResult pick = cli({"prove", corpus("pickleft.lae")});
  CHECK(pick.code == 0);
  CHECK(contains(pick.out, "proof pickLeftRespects/idem: ok"));
  CHECK(contains(pick.out, "proof pickLeftRespects/assoc: ok"));

  CmdResult yield = cli({"prove", corpus("yieldall.lae")});
  CHECK(yield.code == 0);
  CHECK(contains(yield.out, "proof yieldAllRespects/comm: ok"));
}

TEST_CASE("oracle decides equivalence inside the finite universe") {
  CmdResult r = cli({"oracle", corpus("nondet.lae"), "coin", "biased", "--depth", "3"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "universe 1446 trees, 3 classes at depth 3"));
  CHECK(contains(r.out, "related"));
}

TEST_CASE("equiv finds a rewrite path between corpus terms") {
  CmdResult r = cli({"equiv", corpus("nondet.lae"), "coin", "biased"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "related (1+1 rewrite steps)"));
}

TEST_CASE("usage and missing-file errors use distinct exit codes") {
  CHECK(cli({}).code == 64);
  CHECK(cli({"frobnicate"}).code == 64);
  CmdResult missing = cli({"check", corpus("missing.lae")});
  CHECK(missing.code == 66);
  CHECK(contains(missing.err, "E-FILE"));
}
