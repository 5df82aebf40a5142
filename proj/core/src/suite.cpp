#include "loceff/suite.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "loceff/equivalence.hpp"
#include "loceff/freemodel.hpp"
#include "loceff/generator.hpp"
#include "loceff/interp.hpp"
#include "loceff/logic.hpp"
#include "loceff/parser.hpp"

namespace loceff {

namespace {

using Clock = std::chrono::steady_clock;

long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

const char* kChoicePrelude = R"(signature {
  choose : unit -> bool ;
}

theory choice {
  idem: ; z : unit -> * |- choose((); y. if y then z() else z()) ~ z()
  assoc: ; z1 : unit -> *, z2 : unit -> *, z3 : unit -> * |- choose((); y. if y then choose((); w. if w then z1() else z2()) else z3()) ~ choose((); y. if y then z1() else choose((); w. if w then z2() else z3()))
  comm: ; z1 : unit -> *, z2 : unit -> * |- choose((); y. if y then z1() else z2()) ~ choose((); y. if y then z2() else z1())
}
)";

struct ChoiceWorld {
  Program program;
  Signature sigma;
  Theory idem, assoc, comm, all;
};

const ChoiceWorld& choice_world() {
  static const ChoiceWorld world = [] {
    ChoiceWorld w;
    w.program = parse_program(kChoicePrelude, "<suite>");
    w.sigma = w.program.decls.sig;
    w.idem = w.program.decls.theory_of({"idem"}, {});
    w.assoc = w.program.decls.theory_of({"assoc"}, {});
    w.comm = w.program.decls.theory_of({"comm"}, {});
    w.all = w.program.decls.theory_of({"idem", "comm", "assoc"}, {});
    return w;
  }();
  return world;
}

// ---------------------------------------------------------------------------
// Step walks shared by the safety, invariance, and adequacy suites

struct WalkReport {
  bool stuck = false;
  bool fuel_out = false;
  bool preserved = true;
  bool invariant = true;
  size_t steps = 0;
};

WalkReport walk_term(const GenTerm& g, bool check_preservation, bool check_denotation) {
  WalkReport rep;
  size_t size = term_size(g.comp);
  size_t fuel = 10 * size * size;
  CompPtr cur = g.comp;
  TreePtr prev;
  if (check_denotation) prev = denote_comp({}, cur, g.type, {});
  for (;;) {
    if (rep.steps > fuel) {
      rep.fuel_out = true;
      return rep;
    }
    StepResult r = step(cur);
    if (std::holds_alternative<StepValue>(r) || std::holds_alternative<StepOp>(r)) return rep;
    if (std::holds_alternative<StepStuck>(r)) {
      rep.stuck = true;
      return rep;
    }
    cur = std::get<StepNext>(r).comp;
    rep.steps++;
    if (check_preservation && !check_comp({}, cur, g.type).empty()) rep.preserved = false;
    if (check_denotation) {
      TreePtr next_tree = denote_comp({}, cur, g.type, {});
      if (!tree_equal(prev, next_tree)) rep.invariant = false;
      prev = next_tree;
    }
    if (!rep.preserved || !rep.invariant) return rep;
  }
}

// ---------------------------------------------------------------------------
// Random builders for the free-model suites

TreePtr rand_tree(std::mt19937_64& rng, const Signature& sig, int depth) {
  bool leaf = sig.empty() || depth == 0 || (rng() % 3 == 0);
  if (leaf) return tree_return(sem_bool(rng() % 2 == 1));
  TreePtr l = rand_tree(rng, sig, depth - 1);
  TreePtr r = rand_tree(rng, sig, depth - 1);
  return tree_op("choose", sem_star(), {sem_bool(false), sem_bool(true)}, {l, r});
}

std::function<TreePtr(const SemValue&)> table_fn(std::vector<SemValue> domain,
                                                 std::vector<TreePtr> results) {
  return [domain = std::move(domain), results = std::move(results)](const SemValue& v) {
    for (size_t i = 0; i < domain.size(); ++i)
      if (sem_equal(domain[i], v)) return results[i];
    throw Error{"E-DOMAIN", "value outside the probe table domain"};
  };
}

struct TemplateGen {
  std::mt19937_64& rng;
  int counter = 0;

  TemplatePtr gen(int depth, std::vector<std::string> bools) {
    int c = depth == 0 ? 0 : static_cast<int>(rng() % 10);
    if (c < 3) {
      std::string z = (rng() % 2 == 0) ? "z1" : "z2";
      return mk_tvar(z, mk_unit());
    }
    if (c < 6) {
      ValuePtr cond;
      if (!bools.empty() && rng() % 2 == 0)
        cond = mk_free(bools[rng() % bools.size()]);
      else
        cond = mk_bool(rng() % 2 == 1);
      return mk_tif(cond, gen(depth - 1, bools), gen(depth - 1, bools));
    }
    std::string y = "ty" + std::to_string(counter++);
    bools.push_back(y);
    TemplatePtr body = gen(depth - 1, bools);
    return mk_top("choose", mk_unit(), y, close_template(body, y));
  }
};

struct HandlerCase {
  ValuePtr value;
  const VHandler* h = nullptr;
  CompTypePtr source, target;
};

// Desk-scale clause sets over {choose}; the last one reraises into a
// non-empty target row.
std::vector<HandlerCase> handler_pool() {
  const ChoiceWorld& w = choice_world();
  std::vector<std::string> texts = {
      "handler { choose((); k) -> k true } : (bool!{choose}/{}) => (bool!{}/{})",
      "handler { choose((); k) -> k false } : (bool!{choose}/{}) => (bool!{}/{})",
      "handler { choose((); k) -> do x1 <- k true in do x2 <- k false in return x1 } : "
      "(bool!{choose}/{}) => (bool!{}/{})",
      "handler { choose((); k) -> choose((); b. k b) } : (bool!{choose}/{}) => "
      "(bool!{choose}/{})",
  };
  std::vector<HandlerCase> pool;
  for (const auto& text : texts) {
    HandlerCase hc;
    hc.value = parse_value(text, w.program.decls);
    hc.h = std::get_if<VHandler>(&hc.value->node);
    hc.source = hc.h->ascription->first;
    hc.target = hc.h->ascription->second;
    pool.push_back(std::move(hc));
  }
  return pool;
}

struct SquareStats {
  size_t checked = 0;
  size_t failures = 0;
};

// One side of Lemma-style commuting square checks: lifting the free
// denotation of a template equals denoting it directly under the clause
// interpretation with the lifted variable assignment.
SquareStats square_suite(uint64_t seed, size_t triples) {
  const ChoiceWorld& w = choice_world();
  std::mt19937_64 rng(seed);
  std::vector<HandlerCase> pool = handler_pool();
  Ctx vctx{{"bv", vt_bool()}};
  SquareStats stats;
  for (size_t i = 0; i < triples; ++i) {
    TemplateGen tg{rng};
    TemplatePtr t = tg.gen(2, {"bv"});
    const HandlerCase& hc = pool[rng() % pool.size()];
    Interp h = denote_clauses({}, hc.h->clauses, w.sigma, hc.target, {});
    Interp free_h = free_interp(w.sigma);

    std::vector<SemValue> bools{sem_bool(false), sem_bool(true)};
    int target_depth = hc.target->sig.empty() ? 0 : 2;
    auto f = table_fn(bools, {rand_tree(rng, hc.target->sig, target_depth),
                              rand_tree(rng, hc.target->sig, target_depth)});

    Zeta zeta;
    std::map<std::string, TreePtr> zeta_trees;
    for (const std::string z : {"z1", "z2"})
      zeta_trees[z] = rand_tree(rng, w.sigma, 2);
    for (const auto& [z, tree] : zeta_trees)
      zeta[z] = [tree = tree](const SemValue&) { return tree; };
    Zeta lifted;
    for (const auto& [z, tree] : zeta_trees)
      lifted[z] = [&h, &f, tree = tree](const SemValue&) { return lift(h, f, tree); };

    for (bool bv : {false, true}) {
      Env eta{{"bv", sem_bool(bv)}};
      TreePtr via_free = hsem_template(t, free_h, w.sigma, vctx, eta, zeta);
      TreePtr left = lift(h, f, via_free);
      TreePtr right = hsem_template(t, h, w.sigma, vctx, eta, lifted);
      if (!tree_equal(left, right)) stats.failures++;
    }
    stats.checked++;
  }
  return stats;
}

SquareStats coherence_suite(uint64_t seed, size_t instances) {
  const ChoiceWorld& w = choice_world();
  std::mt19937_64 rng(seed);
  std::vector<HandlerCase> pool = handler_pool();
  std::vector<ValuePtr> ground_fns = {
      parse_value("fun u -> return true", w.program.decls),
      parse_value("fun u -> return false", w.program.decls),
  };
  std::vector<ValuePtr> raising_fns = {
      parse_value("fun u -> choose((); b. return b)", w.program.decls),
      parse_value("fun u -> choose((); b. if b then return false else return true)",
                  w.program.decls),
  };
  SquareStats stats;
  for (size_t i = 0; i < instances; ++i) {
    TemplateGen tg{rng};
    TemplatePtr t = tg.gen(2, {});
    const HandlerCase& hc = pool[rng() % pool.size()];
    std::vector<ValuePtr> fn_pool = ground_fns;
    if (!hc.target->sig.empty())
      fn_pool.insert(fn_pool.end(), raising_fns.begin(), raising_fns.end());
    std::map<std::string, ValuePtr> fns;
    Zeta zeta;
    for (const std::string z : {"z1", "z2"}) {
      fns[z] = fn_pool[rng() % fn_pool.size()];
      TreePtr tree = denote_comp({}, mk_apply(fns[z], mk_unit()), hc.target, {});
      zeta[z] = [tree](const SemValue&) { return tree; };
    }
    CompPtr handled = thandle(hc.h->clauses, t, fns);
    TreePtr direct = denote_comp({}, handled, hc.target, {});
    Interp h = denote_clauses({}, hc.h->clauses, w.sigma, hc.target, {});
    TreePtr semantic = hsem_template(t, h, w.sigma, {}, {}, zeta);
    if (!tree_equal(direct, semantic)) stats.failures++;
    stats.checked++;
  }
  return stats;
}

void count_comp_formers(const CompPtr& c, std::set<std::string>& out);

void count_value_formers(const ValuePtr& v, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VLambda>) {
          out.insert("lambda");
          count_comp_formers(node.body, out);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          out.insert("handler");
          count_comp_formers(node.ret_body, out);
          for (const auto& [op, clause] : node.clauses) count_comp_formers(clause.body, out);
        }
      },
      v->node);
}

void count_comp_formers(const CompPtr& c, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          out.insert("if");
          count_value_formers(node.cond, out);
          count_comp_formers(node.then_c, out);
          count_comp_formers(node.else_c, out);
        } else if constexpr (std::is_same_v<T, CApply>) {
          out.insert("apply");
          count_value_formers(node.fn, out);
          count_value_formers(node.arg, out);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          out.insert("return");
          count_value_formers(node.value, out);
        } else if constexpr (std::is_same_v<T, COp>) {
          out.insert("op");
          count_value_formers(node.arg, out);
          count_comp_formers(node.cont, out);
        } else if constexpr (std::is_same_v<T, CDo>) {
          out.insert("do");
          count_comp_formers(node.first, out);
          count_comp_formers(node.rest, out);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          out.insert("handle");
          count_value_formers(node.handler, out);
          count_comp_formers(node.body, out);
        }
      },
      c->node);
}

void count_proof_tags(const ProofNodePtr& n, std::map<std::string, int>& acc) {
  acc[n->tag]++;
  for (const auto& child : n->children) count_proof_tags(child, acc);
}

struct LoadedHandler {
  CheckedProgram checked;
  ValuePtr value;
  const VHandler* h = nullptr;
  CompTypePtr source, target;
  bool ok = false;
  std::string why;
};

LoadedHandler load_handler(const std::string& path, const std::string& name) {
  LoadedHandler out;
  Config cfg;
  out.checked = check_program(load_program(path), cfg, RespectsMode::Pred);
  if (!out.checked.ok()) {
    out.why = path + " does not check";
    return out;
  }
  for (const auto& let : out.checked.program.lets) {
    if (let.name != name) continue;
    out.value = delta_expand(std::get<ValuePtr>(let.term), out.checked);
  }
  if (!out.value) {
    out.why = name + " not found";
    return out;
  }
  out.h = std::get_if<VHandler>(&out.value->node);
  auto it = out.checked.types.find(name);
  auto* ht = std::get_if<VTHandler>(&std::get<ValueTypePtr>(it->second)->node);
  out.source = ht->source;
  out.target = ht->target;
  out.ok = true;
  return out;
}

std::string join(const std::string& dir, const std::string& file) { return dir + "/" + file; }

// All assignments of template variables to trees from a probe universe.
struct ProbeOdometer {
  std::vector<size_t> slots;
  size_t base = 0;
  bool done = false;

  ProbeOdometer(size_t slot_count, size_t base_size)
      : slots(slot_count, 0), base(base_size), done(base_size == 0 && slot_count > 0) {}

  void next() {
    for (size_t i = slots.size(); i-- > 0;) {
      if (++slots[i] < base) return;
      slots[i] = 0;
    }
    done = true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Property suites

std::vector<SuiteResult> run_property_suites(const SuiteConfig& cfg) {
  std::vector<SuiteResult> results;
  auto add = [&](const std::string& name, bool pass, std::string detail) {
    results.push_back(SuiteResult{name, pass, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, e.what());
    }
  };

  GenConfig gen_cfg;
  gen_cfg.seed = cfg.seed;
  gen_cfg.count = cfg.gen_count;
  std::vector<GenTerm> corpus = generate_corpus(gen_cfg);

  guarded("print-parse-roundtrip", [&] {
    Decls decls;
    decls.sig = default_pool();
    size_t bad = 0;
    for (const auto& g : corpus) {
      CompPtr back = parse_comp(print_comp(g.comp), decls);
      if (!alpha_equal(g.comp, back)) bad++;
      CompTypePtr type_back = parse_ctype(print_type(g.type), decls);
      if (!type_equal(g.type, type_back)) bad++;
    }
    add("print-parse-roundtrip", bad == 0,
        std::to_string(corpus.size()) + " terms, " + std::to_string(bad) + " mismatches");
  });

  guarded("generator-determinism", [&] {
    std::vector<GenTerm> again = generate_corpus(gen_cfg);
    bool same = again.size() == corpus.size();
    for (size_t i = 0; same && i < corpus.size(); ++i)
      same = print_comp(corpus[i].comp) == print_comp(again[i].comp) &&
             print_type(corpus[i].type) == print_type(again[i].type);
    bool det_steps = true;
    for (const auto& g : corpus) {
      StepResult a = step(g.comp);
      StepResult b = step(g.comp);
      if (a.index() != b.index()) det_steps = false;
      auto* na = std::get_if<StepNext>(&a);
      auto* nb = std::get_if<StepNext>(&b);
      if (na && nb && !alpha_equal(na->comp, nb->comp)) det_steps = false;
    }
    add("generator-determinism", same && det_steps,
        same ? "regeneration identical" : "regeneration diverged");
  });

  guarded("step-safety", [&] {
    size_t bad = 0;
    for (const auto& g : corpus) {
      WalkReport rep = walk_term(g, true, false);
      if (rep.stuck || rep.fuel_out || !rep.preserved) bad++;
    }
    add("step-safety", bad == 0,
        std::to_string(corpus.size()) + " terms, " + std::to_string(bad) + " failures");
  });

  guarded("denotation-invariance", [&] {
    size_t bad = 0;
    for (const auto& g : corpus) {
      WalkReport rep = walk_term(g, false, true);
      if (rep.stuck || rep.fuel_out || !rep.invariant) bad++;
    }
    add("denotation-invariance", bad == 0,
        std::to_string(corpus.size()) + " terms, " + std::to_string(bad) + " failures");
  });

  guarded("adequacy", [&] {
    GenConfig closed_cfg = gen_cfg;
    closed_cfg.closed_top = true;
    closed_cfg.count = std::max<size_t>(cfg.gen_count, 60);
    size_t checked = 0, bad = 0;
    for (const auto& g : generate_corpus(closed_cfg)) {
      if (!g.type->sig.empty() || !std::holds_alternative<VTBool>(g.type->value->node)) continue;
      checked++;
      TreePtr tree = denote_comp({}, g.comp, g.type, {});
      auto* leaf = std::get_if<TreeReturn>(&tree->node);
      size_t size = term_size(g.comp);
      RunResult r = run(g.comp, 10 * size * size);
      bool match = false;
      if (leaf && r.kind == RunResult::Kind::Value) {
        auto* lb = std::get_if<SemBool>(&leaf->value.node);
        auto* rb = std::get_if<VBool>(&r.value->node);
        match = lb && rb && lb->value == rb->value;
      }
      if (!match) bad++;
    }
    add("adequacy", checked > 0 && bad == 0,
        std::to_string(checked) + " ground bool terms, " + std::to_string(bad) + " failures");
  });

  guarded("handler-square", [&] {
    SquareStats stats = square_suite(cfg.seed + 1, std::max<size_t>(cfg.gen_count / 3, 30));
    add("handler-square", stats.failures == 0,
        std::to_string(stats.checked) + " triples, " + std::to_string(stats.failures) +
            " failures");
  });

  guarded("oracle-partition", [&] {
    const ChoiceWorld& w = choice_world();
    TreeOracle oracle(w.idem, w.sigma, vt_bool(), 2);
    std::vector<TreePtr> universe = oracle.universe();
    auto classes = oracle.classes();
    size_t members = 0;
    for (const auto& cls : classes) members += cls.size();
    bool partition = members == universe.size();
    bool symmetric = true, congruent = true;
    std::mt19937_64 rng(cfg.seed + 2);
    for (int i = 0; i < 60; ++i) {
      const TreePtr& a = universe[rng() % universe.size()];
      const TreePtr& b = universe[rng() % universe.size()];
      if (oracle.query(a, b) != oracle.query(b, a)) symmetric = false;
      if (oracle.query(a, b) == TreeOracle::Relation::Related) {
        const TreePtr& s = universe[rng() % universe.size()];
        if (s->depth > 1 || a->depth > 1 || b->depth > 1) continue;
        TreePtr left = tree_op("choose", sem_star(), {sem_bool(false), sem_bool(true)}, {a, s});
        TreePtr right = tree_op("choose", sem_star(), {sem_bool(false), sem_bool(true)}, {b, s});
        if (oracle.query(left, right) != TreeOracle::Relation::Related) congruent = false;
      }
    }
    add("oracle-partition", partition && symmetric && congruent,
        std::to_string(classes.size()) + " classes over " + std::to_string(universe.size()) +
            " trees");
  });

  guarded("generator-coverage", [&] {
    GenConfig cover_cfg = gen_cfg;
    cover_cfg.count = std::max<size_t>(cfg.gen_count, 1000);
    std::vector<GenTerm> big = generate_corpus(cover_cfg);
    std::map<std::string, size_t> hits;
    for (const auto& g : big) {
      std::set<std::string> formers;
      count_comp_formers(g.comp, formers);
      for (const auto& f : formers) hits[f]++;
    }
    std::vector<std::string> required{"if", "apply", "return", "op", "do", "handle"};
    std::string low;
    for (const auto& f : required) {
      if (hits[f] * 20 < big.size()) low += (low.empty() ? "" : ", ") + f;
    }
    add("generator-coverage", low.empty(),
        low.empty() ? "all formers above 5%" : "below 5%: " + low);
  });

  guarded("thandle-coherence", [&] {
    SquareStats stats = coherence_suite(cfg.seed + 3, std::max<size_t>(cfg.gen_count / 3, 30));
    add("thandle-coherence", stats.failures == 0,
        std::to_string(stats.checked) + " instances, " + std::to_string(stats.failures) +
            " failures");
  });

  return results;
}

// ---------------------------------------------------------------------------
// Acceptance criteria

std::vector<CriterionResult> run_acceptance(const SuiteConfig& cfg, std::ostream* out) {
  std::vector<CriterionResult> results;
  auto add = [&](int number, const std::string& name, bool pass, std::string detail) {
    results.push_back(CriterionResult{number, name, pass, std::move(detail)});
    if (out) {
      *out << "criterion " << number << " " << (pass ? "pass" : "FAIL") << "  " << name;
      if (!results.back().detail.empty()) *out << "  (" << results.back().detail << ")";
      *out << "\n";
    }
  };
  auto guarded = [&](int number, const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(number, name, false, e.what());
    }
  };
  const std::string& dir = cfg.corpus_dir;
  bool have_corpus = !dir.empty();

  guarded(1, "pickLeft verified by proof scripts", [&] {
    if (!have_corpus) return add(1, "pickLeft verified by proof scripts", false, "no corpus dir");
    auto start = Clock::now();
    std::ostringstream o, e;
    int code = run_command({"verify", join(dir, "pickleft.lae"), "--handler", "pickLeft"}, o, e);
    long ms = elapsed_ms(start);
    bool pass = code == 0 && o.str().find("pickLeft respects the theory") != std::string::npos &&
                ms < 1000;
    add(1, "pickLeft verified by proof scripts", pass, std::to_string(ms) + " ms");
  });

  guarded(2, "pickLeft auto-refuted against comm", [&] {
    if (!have_corpus) return add(2, "pickLeft auto-refuted against comm", false, "no corpus dir");
    std::ostringstream o, e;
    int code = run_command({"verify", join(dir, "pickleft.lae"), "--handler", "pickLeft",
                            "--theory", "comm", "--auto"},
                           o, e);
    std::vector<std::string> expected{
        "pickLeft breaks equation comm", "z1 := {⋆ => return tt}",
        "z2 := {⋆ => return ff}",   "left  return tt",
        "right return ff",               "replayed: yes"};
    bool pass = code == 1;
    std::string missing;
    for (const auto& line : expected) {
      if (o.str().find(line) == std::string::npos) {
        pass = false;
        missing = line;
      }
    }
    add(2, "pickLeft auto-refuted against comm", pass,
        pass ? "counterexample returns tt vs ff" : "missing: " + missing);
  });

  guarded(3, "yieldAll verified by the predicate script", [&] {
    const std::string name = "yieldAll verified by the predicate script";
    if (!have_corpus) return add(3, name, false, "no corpus dir");
    auto start = Clock::now();
    std::ostringstream o, e;
    int code = run_command({"verify", join(dir, "yieldall.lae"), "--handler", "yieldAll"}, o, e);
    long ms = elapsed_ms(start);
    Program prog = load_program(join(dir, "yieldall.lae"));
    std::map<std::string, int> tags;
    for (const auto& b : prog.proofs.bundles) {
      if (b.name != "yieldAllRespects") continue;
      for (const auto& cs : b.cases) count_proof_tags(cs.script, tags);
    }
    bool shape = tags["induction"] == 2 && tags["inherit"] == 1;
    bool pass = code == 0 && o.str().find("yieldAll respects the theory") != std::string::npos &&
                shape && ms < 5000;
    add(3, name, pass,
        std::to_string(ms) + " ms, " + std::to_string(tags["induction"]) + " inductions, " +
            std::to_string(tags["inherit"]) + " inherit");
  });

  GenConfig big_cfg;
  big_cfg.seed = cfg.seed;
  big_cfg.count = 1000;
  std::vector<GenTerm> big_corpus;

  guarded(4, "safety on 1000 generated terms", [&] {
    auto start = Clock::now();
    big_corpus = generate_corpus(big_cfg);
    size_t stuck = 0, fuel_out = 0, unpreserved = 0;
    for (const auto& g : big_corpus) {
      WalkReport rep = walk_term(g, true, false);
      if (rep.stuck) stuck++;
      if (rep.fuel_out) fuel_out++;
      if (!rep.preserved) unpreserved++;
    }
    long ms = elapsed_ms(start);
    bool pass = stuck == 0 && fuel_out == 0 && unpreserved == 0 && ms < 60000;
    add(4, "safety on 1000 generated terms", pass,
        std::to_string(ms) + " ms, stuck " + std::to_string(stuck) + ", fuel " +
            std::to_string(fuel_out) + ", preservation " + std::to_string(unpreserved));
  });

  guarded(5, "denotation invariant along steps", [&] {
    if (big_corpus.empty()) big_corpus = generate_corpus(big_cfg);
    size_t bad = 0;
    for (const auto& g : big_corpus) {
      WalkReport rep = walk_term(g, false, true);
      if (rep.stuck || rep.fuel_out || !rep.invariant) bad++;
    }
    add(5, "denotation invariant along steps", bad == 0,
        std::to_string(big_corpus.size()) + " terms, " + std::to_string(bad) + " failures");
  });

  guarded(6, "adequacy at ground bool", [&] {
    GenConfig closed_cfg;
    closed_cfg.seed = cfg.seed + 10;
    closed_cfg.count = 1600;
    closed_cfg.closed_top = true;
    size_t checked = 0, bad = 0;
    for (const auto& g : generate_corpus(closed_cfg)) {
      if (checked == 500) break;
      if (!g.type->sig.empty() || !std::holds_alternative<VTBool>(g.type->value->node)) continue;
      checked++;
      TreePtr tree = denote_comp({}, g.comp, g.type, {});
      auto* leaf = std::get_if<TreeReturn>(&tree->node);
      size_t size = term_size(g.comp);
      RunResult r = run(g.comp, 10 * size * size);
      bool match = false;
      if (leaf && r.kind == RunResult::Kind::Value) {
        auto* lb = std::get_if<SemBool>(&leaf->value.node);
        auto* rb = std::get_if<VBool>(&r.value->node);
        match = lb && rb && lb->value == rb->value;
      }
      if (!match) bad++;
    }
    add(6, "adequacy at ground bool", checked == 500 && bad == 0,
        std::to_string(checked) + " terms, " + std::to_string(bad) + " failures");
  });

  guarded(7, "clause lifting square", [&] {
    SquareStats stats = square_suite(cfg.seed + 20, 200);
    add(7, "clause lifting square", stats.checked == 200 && stats.failures == 0,
        std::to_string(stats.checked) + " triples, " + std::to_string(stats.failures) +
            " failures");
  });

  guarded(8, "oracle lifting and instance checks", [&] {
    const std::string name = "oracle lifting and instance checks";
    const ChoiceWorld& w = choice_world();
    std::ostringstream detail;
    bool pass = true;

    // Part one: related pairs stay related after lifting pointwise-related
    // probe tables over the leaves.
    for (const auto* theory : {&w.idem, &w.comm}) {
      TreeOracle oracle3(*theory, w.sigma, vt_bool(), 3);
      TreeOracle oracle2(*theory, w.sigma, vt_bool(), 2);
      std::vector<TreePtr> u2 = oracle2.universe();
      std::vector<std::pair<TreePtr, TreePtr>> table_entries;
      for (const auto& cls : oracle2.classes()) {
        if (cls.size() >= 2) table_entries.emplace_back(cls[0], cls[1]);
        if (table_entries.size() == 2) break;
      }
      if (table_entries.size() < 2) table_entries.emplace_back(u2[0], u2[0]);
      std::vector<SemValue> bools{sem_bool(false), sem_bool(true)};
      auto g = table_fn(bools, {table_entries[0].first, table_entries[1].first});
      auto g2 = table_fn(bools, {table_entries[0].second, table_entries[1].second});

      size_t pairs = 0, lift_failures = 0;
      EquivBounds bounds;
      bounds.step_bound = 4000;
      bounds.size_bound = 256;
      Interp free_h = free_interp(w.sigma);
      for (size_t i = 0; i < u2.size(); ++i) {
        for (size_t j = i; j < u2.size(); ++j) {
          if (oracle3.query(u2[i], u2[j]) != TreeOracle::Relation::Related) continue;
          pairs++;
          TreePtr left = lift(free_h, g, u2[i]);
          TreePtr right = lift(free_h, g2, u2[j]);
          EquivResult res = tree_equiv(left, right, *theory, w.sigma, vt_bool(), bounds);
          if (res.outcome != EquivOutcome::Related) lift_failures++;
        }
      }
      if (lift_failures > 0) pass = false;
      detail << (theory == &w.idem ? "idem" : "comm") << " pairs " << pairs << " (universe@3 "
             << oracle3.universe_size() << ", probes@2 " << u2.size() << "), ";
      if (oracle3.universe_size() >= 100000) pass = false;
    }

    // Part two: every accepted corpus handler passes the per-equation
    // instance check on all enumerated contexts and depth-2 probe tables.
    struct Target {
      const char* file;
      const char* handler;
    };
    size_t instances = 0, instance_failures = 0;
    if (!have_corpus) {
      add(8, name, false, "no corpus dir");
      return;
    }
    for (const Target& t : {Target{"pickleft.lae", "pickLeft"},
                            Target{"yieldall.lae", "yieldAll"},
                            Target{"collect.lae", "collectToList"}}) {
      LoadedHandler lh = load_handler(join(dir, t.file), t.handler);
      if (!lh.ok) {
        pass = false;
        detail << t.handler << ": " << lh.why << ", ";
        continue;
      }
      TreeOracle probes(lh.target->theory, lh.target->sig, lh.target->value, 2);
      std::vector<TreePtr> probe_universe = probes.universe();
      Interp h = denote_clauses({}, lh.h->clauses, lh.source->sig, lh.target, {});

      struct Instance {
        TreePtr lhs, rhs;
      };
      std::vector<Instance> queued;
      int max_depth = 0;
      for (const Equation& eq : lh.source->theory.equations) {
        auto envs = enumerate_envs(eq.value_ctx);
        if (!envs) {
          pass = false;
          continue;
        }
        for (const Env& eta : *envs) {
          ProbeOdometer odo(eq.template_ctx.size(), probe_universe.size());
          while (!odo.done) {
            Zeta zeta;
            for (size_t zi = 0; zi < eq.template_ctx.size(); ++zi) {
              TreePtr tree = probe_universe[odo.slots[zi]];
              zeta[eq.template_ctx[zi].first] = [tree](const SemValue&) { return tree; };
            }
            TreePtr lhs = hsem_template(eq.lhs, h, lh.source->sig, eq.value_ctx, eta, zeta);
            TreePtr rhs = hsem_template(eq.rhs, h, lh.source->sig, eq.value_ctx, eta, zeta);
            max_depth = std::max({max_depth, lhs->depth, rhs->depth});
            queued.push_back({lhs, rhs});
            odo.next();
          }
        }
      }
      int oracle_depth = std::max(3, max_depth);
      if (universe_estimate(lh.target->sig, lh.target->value, oracle_depth, 100000) > 100000) {
        pass = false;
        detail << t.handler << ": instance universe too large, ";
        continue;
      }
      TreeOracle target_oracle(lh.target->theory, lh.target->sig, lh.target->value, oracle_depth);
      for (const Instance& inst : queued) {
        instances++;
        if (target_oracle.query(inst.lhs, inst.rhs) != TreeOracle::Relation::Related)
          instance_failures++;
      }
      detail << t.handler << " " << queued.size() << " instances (target universe@"
             << oracle_depth << " " << target_oracle.universe_size() << "), ";
    }
    if (instance_failures > 0 || instances == 0) pass = false;
    add(8, name, pass, detail.str() + std::to_string(instance_failures) + " failures");
  });

  guarded(9, "search and oracle agree", [&] {
    const ChoiceWorld& w = choice_world();
    std::ostringstream detail;
    bool pass = true;
    size_t confirmed = 0, replays = 0, oracle_only = 0;
    for (const auto* theory : {&w.idem, &w.comm, &w.assoc}) {
      TreeOracle oracle2(*theory, w.sigma, vt_bool(), 2);
      for (const auto& cls : oracle2.classes()) {
        for (size_t i = 0; i + 1 < cls.size(); ++i) {
          const TreePtr& a = cls[i];
          const TreePtr& b = cls[i + 1];
          EquivResult res = tree_equiv(a, b, *theory, w.sigma, vt_bool());
          if (res.outcome != EquivOutcome::Related) {
            pass = false;
            continue;
          }
          if (res.path.empty() && res.path_from_b.empty()) {
            oracle_only++;
            continue;
          }
          int wpd = std::max(a->depth, b->depth);
          for (const auto& step : res.path) wpd = std::max(wpd, step.result->depth);
          for (const auto& step : res.path_from_b) wpd = std::max(wpd, step.result->depth);
          int want = wpd + 2;
          while (want > 1 &&
                 universe_estimate(w.sigma, vt_bool(), want, 100000) > 100000)
            want--;
          TreeOracle confirm(*theory, w.sigma, vt_bool(), want);
          if (confirm.query(a, b) != TreeOracle::Relation::Related) pass = false;
          confirmed++;
          if (!replay_path(a, b, res.path, res.path_from_b, *theory, w.sigma, vt_bool()))
            pass = false;
          replays++;
        }
      }
    }
    // Unrelated leaves must be refuted, not unknown.
    EquivResult refuted = tree_equiv(tree_return(sem_bool(true)), tree_return(sem_bool(false)),
                                     w.idem, w.sigma, vt_bool());
    if (refuted.outcome != EquivOutcome::RefutedWithinBound) pass = false;

    // Checked ground-type proof goals must not be oracle-refuted once their
    // function contexts are instantiated with concrete values.
    size_t goal_instances = 0;
    if (!have_corpus) {
      add(9, "search and oracle agree", false, "no corpus dir");
      return;
    }
    for (const std::string file : {"pickleft.lae", "yieldall.lae"}) {
      Program prog = load_program(join(dir, file));
      for (const auto& bundle : prog.proofs.bundles) {
        for (const auto& cs : bundle.cases) {
          auto* goal = std::get_if<FCompEq>(&cs.goal->node);
          if (!goal) continue;
          const CompTypePtr& type = goal->type;
          std::vector<ValuePtr> fills;
          for (const SemValue& ground :
               enumerate_ground(type->value) ? *enumerate_ground(type->value)
                                             : std::vector<SemValue>{}) {
            ValuePtr lit = std::holds_alternative<SemStar>(ground.node)
                               ? mk_unit()
                               : mk_bool(std::get<SemBool>(ground.node).value);
            fills.push_back(mk_lambda("u", mk_return(lit)));
          }
          for (const auto& [op, sig] : type->sig) {
            auto args = enumerate_ground(sig.param);
            if (!args) continue;
            for (const SemValue& arg : *args) {
              ValuePtr lit = std::holds_alternative<SemStar>(arg.node)
                                 ? mk_unit()
                                 : mk_bool(std::get<SemBool>(arg.node).value);
              fills.push_back(mk_lambda(
                  "u", mk_op(op, lit, "w", mk_return(mk_unit()))));
            }
          }
          ProbeOdometer odo(cs.context.size(), fills.size());
          TreeOracle goal_oracle(type->theory, type->sig, type->value, 3);
          while (!odo.done) {
            std::map<std::string, ValuePtr> bind;
            for (size_t i = 0; i < cs.context.size(); ++i)
              bind[cs.context[i].first] = fills[odo.slots[i]];
            TreePtr lhs = denote_comp({}, subst(goal->lhs, bind), type, {});
            TreePtr rhs = denote_comp({}, subst(goal->rhs, bind), type, {});
            if (goal_oracle.query(lhs, rhs) != TreeOracle::Relation::Related) pass = false;
            goal_instances++;
            odo.next();
          }
        }
      }
    }
    detail << confirmed << " related verdicts confirmed, " << replays << " replays, "
           << oracle_only << " oracle-only, " << goal_instances << " goal instances";
    add(9, "search and oracle agree", pass, detail.str());
  });

  guarded(10, "theory mismatch rejected", [&] {
    if (!have_corpus) return add(10, "theory mismatch rejected", false, "no corpus dir");
    Config config;
    CheckedProgram checked =
        check_program(load_program(join(dir, "collect.lae")), config, RespectsMode::Pred);
    if (!checked.ok()) return add(10, "theory mismatch rejected", false, "collect.lae broken");
    Ctx ctx;
    for (const auto& let : checked.program.lets) {
      auto it = checked.types.find(let.name);
      if (it == checked.types.end()) continue;
      if (auto* vt = std::get_if<ValueTypePtr>(&it->second)) ctx.emplace_back(let.name, *vt);
    }
    CompPtr composed = mk_handle(mk_free("collectToList"),
                                 mk_apply(mk_free("chooseBoth"), mk_unit()));
    CompTypePtr target = parse_ctype("bool!{}/{}", checked.program.decls);
    std::vector<Diag> diags = check_comp(ctx, composed, target);
    bool saw_mismatch = false;
    for (const auto& d : diags)
      if (d.code == "TheoryMismatch") saw_mismatch = true;
    add(10, "theory mismatch rejected", saw_mismatch,
        saw_mismatch ? "check_comp reports TheoryMismatch" : "no TheoryMismatch diagnostic");
  });

  return results;
}

}  // namespace loceff
