#pragma once

#include "loceff/equivalence.hpp"

namespace loceff {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct FTrue {};
struct FFalse {};
struct FValueEq {
  ValuePtr lhs, rhs;
  ValueTypePtr type;
};
struct FCompEq {
  CompPtr lhs, rhs;
  CompTypePtr type;
};
struct FAnd {
  FormulaPtr lhs, rhs;
};
struct FOr {
  FormulaPtr lhs, rhs;
};
struct FImplies {
  FormulaPtr lhs, rhs;
};
struct FForall {
  std::string hint;
  ValueTypePtr type;
  FormulaPtr body;
};
struct FExists {
  std::string hint;
  ValueTypePtr type;
  FormulaPtr body;
};

struct Formula {
  std::variant<FTrue, FFalse, FValueEq, FCompEq, FAnd, FOr, FImplies, FForall, FExists> node;
  Span span;
};

FormulaPtr f_true(Span span = {});
FormulaPtr f_false(Span span = {});
FormulaPtr f_value_eq(ValuePtr lhs, ValuePtr rhs, ValueTypePtr type, Span span = {});
FormulaPtr f_comp_eq(CompPtr lhs, CompPtr rhs, CompTypePtr type, Span span = {});
FormulaPtr f_and(FormulaPtr lhs, FormulaPtr rhs, Span span = {});
FormulaPtr f_or(FormulaPtr lhs, FormulaPtr rhs, Span span = {});
FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs, Span span = {});
FormulaPtr f_forall(std::string hint, ValueTypePtr type, FormulaPtr body, Span span = {});
FormulaPtr f_exists(std::string hint, ValueTypePtr type, FormulaPtr body, Span span = {});

FormulaPtr open_formula(const FormulaPtr& f, const std::vector<ValuePtr>& reps);
FormulaPtr close_formula(const FormulaPtr& f, const std::string& name);
FormulaPtr subst(const FormulaPtr& f, const std::map<std::string, ValuePtr>& bindings);
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);
void free_names(const FormulaPtr& f, std::set<std::string>& out);
std::string print_formula(const FormulaPtr& f);

// Replace the hole of every equated computation in a schema.
FormulaPtr plug_formula(const FormulaPtr& schema, const CompPtr& filler);
bool formula_has_hole(const FormulaPtr& f);
// Schema sanity: every computation equation mentions the hole.
bool wf_schema(const FormulaPtr& f);

// Push a template through handler clauses: template variables become calls
// of the given value-level functions, op nodes become clause bodies with the
// rest of the template as continuation.
CompPtr thandle(const OpClauses& clauses, const TemplatePtr& t,
                const std::map<std::string, ValuePtr>& fns);

struct ProofNode;
using ProofNodePtr = std::shared_ptr<const ProofNode>;

struct ProofNode {
  std::string tag;
  std::optional<CompPtr> comp;        // comp(...), subject(...)
  std::optional<ValuePtr> value;      // value(...), witness(...)
  std::optional<ValueTypePtr> vtype;  // type(...) carrying a value type, vtype(...)
  std::optional<CompTypePtr> ctype;   // type(...) carrying a computation type
  std::optional<FormulaPtr> formula;  // formula(...), schema(...)
  std::optional<std::string> op;      // op(...), label(...)
  std::optional<std::string> binder;  // binder(...), var(...), arg(...), ret(...)
  std::optional<std::string> cont;    // cont(...)
  std::map<std::string, ValuePtr> vals;  // vals(x := v, ...)
  std::map<std::string, ValuePtr> fns;   // fns(z := f, ...)
  std::optional<size_t> index;           // index(...)
  std::vector<ProofNodePtr> children;
  Span span;
};

struct NamedProof {
  std::string name;
  Ctx context;
  std::vector<FormulaPtr> hyps;
  FormulaPtr goal;
  bool eq_only = false;  // logic: eq restricts the rule set
  ProofNodePtr script;
  Span span;
};

struct RespectsCase {
  std::string label;
  Ctx context;
  FormulaPtr goal;
  bool eq_only = true;
  ProofNodePtr script;
  Span span;
};

struct RespectsBundle {
  std::string name;
  CompTypePtr target;
  std::vector<RespectsCase> cases;
  Span span;
};

struct ProofFile {
  std::vector<NamedProof> proofs;
  std::vector<RespectsBundle> bundles;
};

struct ProofEnv {
  Ctx ctx;
  std::vector<FormulaPtr> hyps;
  bool eq_only = false;
  CheckOpts opts;
};

// Bottom-up synthesis: returns the formula the script proves, never trusting
// a stated conclusion. Throws Error E-PROOF on any defect.
FormulaPtr synth_proof(const ProofEnv& env, const ProofNodePtr& node);

// Check a named proof end to end: context and hypotheses well-formed, script
// synthesizes a formula alpha-equal to the goal.
std::vector<Diag> check_named_proof(const NamedProof& p, const CheckOpts& opts = {});

enum class RespectsMode { Null, Free, Eq, Pred, Auto };

struct RespectsConfig {
  RespectsMode mode = RespectsMode::Pred;
  int auto_depth = 2;
  size_t auto_steps = 10000;
  EquivBounds bounds;
  const ProofFile* proofs = nullptr;
};

struct RespectsCounterexample {
  std::string label;
  Env eta;
  std::map<std::string, SemValue> zeta;  // template variables as tables
  TreePtr lhs, rhs;
  int oracle_depth = 0;
};

struct RespectsReport {
  RespectsVerdict verdict = RespectsVerdict::Unknown;
  std::vector<Diag> diags;
  std::optional<RespectsCounterexample> counterexample;
};

// Decide whether handler clauses respect the source theory, per the
// configured discipline. "No" only ever arises from an exhaustive-universe
// refutation and always carries a replayable counterexample.
RespectsReport check_respects(const VHandler& h, const CompTypePtr& source,
                              const CompTypePtr& target, const RespectsConfig& cfg);

// Recompute both denotations from the counterexample and confirm the oracle
// still refutes them.
bool replay_counterexample(const VHandler& h, const CompTypePtr& source,
                           const CompTypePtr& target, const RespectsCounterexample& cex,
                           const EquivBounds& bounds = {});

// Adapt check_respects to the typechecker's oracle interface.
std::unique_ptr<RespectsOracle> make_respects_oracle(RespectsConfig cfg);

}  // namespace loceff
