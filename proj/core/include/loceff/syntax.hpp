#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace loceff {

struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
  bool known() const { return line > 0; }
};

struct Diag {
  std::string code;
  std::string message;
  Span span;
};

// Thrown for contract violations the caller asked about (bad template
// instantiation, opaque equality, ...). Checker pipelines accumulate Diag
// lists instead of throwing.
struct Error : std::runtime_error {
  Diag diag;
  explicit Error(Diag d) : std::runtime_error(d.code + ": " + d.message), diag(std::move(d)) {}
  Error(std::string code, std::string message, Span span = {})
      : Error(Diag{std::move(code), std::move(message), span}) {}
};

// ---------------------------------------------------------------------------
// Types

struct ValueType;
struct CompType;
using ValueTypePtr = std::shared_ptr<const ValueType>;
using CompTypePtr = std::shared_ptr<const CompType>;

struct VTUnit {};
struct VTBool {};
struct VTFn {
  ValueTypePtr arg;
  CompTypePtr result;
};
struct VTHandler {
  CompTypePtr source;
  CompTypePtr target;
};

struct ValueType {
  std::variant<VTUnit, VTBool, VTFn, VTHandler> node;
};

struct OpSig {
  ValueTypePtr param;
  ValueTypePtr result;
};

// Operation name -> parameter/result types. Kept sorted so iteration order is
// deterministic everywhere (printing, enumeration, clause checking).
using Signature = std::map<std::string, OpSig>;

struct Template;
using TemplatePtr = std::shared_ptr<const Template>;

struct Equation {
  std::string label;
  std::vector<std::pair<std::string, ValueTypePtr>> value_ctx;
  std::vector<std::pair<std::string, ValueTypePtr>> template_ctx;  // z : A -> *
  TemplatePtr lhs;
  TemplatePtr rhs;
};

struct Theory {
  std::vector<Equation> equations;  // sorted by label at construction
  bool empty() const { return equations.empty(); }
  const Equation* find(const std::string& label) const;
};

struct CompType {
  ValueTypePtr value;
  Signature sig;
  Theory theory;
};

ValueTypePtr vt_unit();
ValueTypePtr vt_bool();
ValueTypePtr vt_fn(ValueTypePtr arg, CompTypePtr result);
ValueTypePtr vt_handler(CompTypePtr source, CompTypePtr target);
CompTypePtr ct(ValueTypePtr value, Signature sig = {}, Theory theory = {});

bool type_equal(const ValueTypePtr& a, const ValueTypePtr& b);
bool type_equal(const CompTypePtr& a, const CompTypePtr& b);
bool signature_equal(const Signature& a, const Signature& b);
// Set equality of the label-normalized equations (alpha-equivalence of the
// equation bodies; labels themselves do not participate).
bool theory_equal(const Theory& a, const Theory& b);
// Canonical key for one equation: contexts renamed positionally, then printed.
std::string equation_key(const Equation& eq);

// ---------------------------------------------------------------------------
// Terms (locally nameless: bound occurrences are indices, free are names)

struct ValueTerm;
struct CompTerm;
using ValuePtr = std::shared_ptr<const ValueTerm>;
using CompPtr = std::shared_ptr<const CompTerm>;

struct Evidence {
  struct Auto {
    int depth = 2;
    int steps = 10000;
  };
  // Either a named respects bundle from a proof file, or bounded auto search.
  std::variant<std::string, Auto> source;
};

struct VFree {
  std::string name;
};
struct VBound {
  int index = 0;
  std::string hint;
};
struct VUnit {};
struct VBool {
  bool value = false;
};
struct VLambda {
  std::string hint;
  CompPtr body;  // binds 1
};
struct OpClause {
  std::string arg_hint;
  std::string cont_hint;
  CompPtr body;  // binds 2: index 0 = continuation, index 1 = argument
};
using OpClauses = std::map<std::string, OpClause>;
struct VHandler {
  std::string ret_hint;
  CompPtr ret_body;  // binds 1
  OpClauses clauses;
  // Optional surface ascription `handler { ... } : (C) => (D)`; consulted only
  // when the handler sits in a position whose type cannot be synthesized.
  std::optional<std::pair<CompTypePtr, CompTypePtr>> ascription;
  std::optional<Evidence> evidence;
};

struct ValueTerm {
  std::variant<VFree, VBound, VUnit, VBool, VLambda, VHandler> node;
  Span span;
};

struct CIf {
  ValuePtr cond;
  CompPtr then_c;
  CompPtr else_c;
};
struct CApply {
  ValuePtr fn;
  ValuePtr arg;
};
struct CReturn {
  ValuePtr value;
};
struct COp {
  std::string op;
  ValuePtr arg;
  std::string cont_hint;
  CompPtr cont;  // binds 1
};
struct CDo {
  std::string hint;
  CompPtr first;
  CompPtr rest;  // binds 1
};
struct CHandle {
  ValuePtr handler;
  CompPtr body;
};
// Placeholder for induction schemas; rejected by the typechecker and the
// interpreter, produced only by the proof-script parser.
struct CHole {};

struct CompTerm {
  std::variant<CIf, CApply, CReturn, COp, CDo, CHandle, CHole> node;
  Span span;
};

// Templates: the bodies of theory equations.
struct TVar {
  std::string var;  // template context name, never bound inside the template
  ValuePtr arg;
};
struct TIf {
  ValuePtr cond;
  TemplatePtr then_t;
  TemplatePtr else_t;
};
struct TOp {
  std::string op;
  ValuePtr arg;
  std::string cont_hint;
  TemplatePtr body;  // binds 1
};

struct Template {
  std::variant<TVar, TIf, TOp> node;
  Span span;
};

ValuePtr mk_free(std::string name, Span span = {});
ValuePtr mk_bound(int index, std::string hint, Span span = {});
ValuePtr mk_unit(Span span = {});
ValuePtr mk_bool(bool value, Span span = {});
ValuePtr mk_lambda(std::string hint, CompPtr body, Span span = {});
ValuePtr mk_handler(VHandler h, Span span = {});
CompPtr mk_if(ValuePtr cond, CompPtr then_c, CompPtr else_c, Span span = {});
CompPtr mk_apply(ValuePtr fn, ValuePtr arg, Span span = {});
CompPtr mk_return(ValuePtr value, Span span = {});
CompPtr mk_op(std::string op, ValuePtr arg, std::string cont_hint, CompPtr cont, Span span = {});
CompPtr mk_do(std::string hint, CompPtr first, CompPtr rest, Span span = {});
CompPtr mk_handle(ValuePtr handler, CompPtr body, Span span = {});
CompPtr mk_hole(Span span = {});
TemplatePtr mk_tvar(std::string var, ValuePtr arg, Span span = {});
TemplatePtr mk_tif(ValuePtr cond, TemplatePtr then_t, TemplatePtr else_t, Span span = {});
TemplatePtr mk_top(std::string op, ValuePtr arg, std::string cont_hint, TemplatePtr body,
                   Span span = {});

// ---------------------------------------------------------------------------
// Binder plumbing

// Replaces indices [depth, depth+n) in a body whose outermost binders were
// just peeled. reps[0] is the innermost binder. Replacement terms must be
// locally closed (they always are: locally nameless terms never contain
// indices that escape their own root).
ValuePtr open_value(const ValuePtr& v, const std::vector<ValuePtr>& reps);
CompPtr open_comp(const CompPtr& c, const std::vector<ValuePtr>& reps);
TemplatePtr open_template(const TemplatePtr& t, const std::vector<ValuePtr>& reps);

// Inverse of open for a single free name: occurrences of `name` become the
// index for a binder about to be wrapped around the result.
CompPtr close_comp(const CompPtr& c, const std::string& name);
// names[i] becomes bound index i; used for multi-binder clause bodies.
CompPtr close_comp(const CompPtr& c, const std::vector<std::string>& names);
ValuePtr close_value(const ValuePtr& v, const std::string& name);
TemplatePtr close_template(const TemplatePtr& t, const std::string& name);

// Offset variants for terms embedded under extra binders (formula
// quantifiers share the index namespace with term binders): indices
// [depth, depth+n) are replaced, names become indices depth + i.
ValuePtr open_value_at(const ValuePtr& v, const std::vector<ValuePtr>& reps, int depth);
CompPtr open_comp_at(const CompPtr& c, const std::vector<ValuePtr>& reps, int depth);
ValuePtr close_value_at(const ValuePtr& v, const std::vector<std::string>& names, int depth);
CompPtr close_comp_at(const CompPtr& c, const std::vector<std::string>& names, int depth);

// Capture-avoiding substitution of free names.
ValuePtr subst(const ValuePtr& v, const std::map<std::string, ValuePtr>& bindings);
CompPtr subst(const CompPtr& c, const std::map<std::string, ValuePtr>& bindings);
TemplatePtr subst(const TemplatePtr& t, const std::map<std::string, ValuePtr>& bindings);

bool alpha_equal(const ValuePtr& a, const ValuePtr& b);
bool alpha_equal(const CompPtr& a, const CompPtr& b);
bool alpha_equal(const TemplatePtr& a, const TemplatePtr& b);

void free_names(const ValuePtr& v, std::set<std::string>& out);
void free_names(const CompPtr& c, std::set<std::string>& out);
void free_names(const TemplatePtr& t, std::set<std::string>& out);
std::set<std::string> free_names(const CompPtr& c);

// True when the term mentions the binder at the given distance above its root
// (0 = the binder immediately enclosing this body).
bool mentions_bound(const ValuePtr& v, int distance);
bool mentions_bound(const CompPtr& c, int distance);

bool has_hole(const CompPtr& c);
// Replaces every hole with the given computation (free names in `fill` stay
// free; binder indices cannot capture them).
CompPtr plug(const CompPtr& c, const CompPtr& fill);

size_t term_size(const ValuePtr& v);
size_t term_size(const CompPtr& c);

std::string fresh_name(const std::string& hint, const std::set<std::string>& taken);

// Template instantiation: z(v) becomes apply(fns[z], v), then vals are
// substituted for the equation's value context names.
CompPtr instantiate_template(const TemplatePtr& t, const std::map<std::string, ValuePtr>& fns,
                             const std::map<std::string, ValuePtr>& vals);

// ---------------------------------------------------------------------------
// Printing (stable; reparses to an alpha-equal term)

std::string print_value(const ValuePtr& v);
std::string print_comp(const CompPtr& c);
std::string print_template(const TemplatePtr& t);
std::string print_type(const ValueTypePtr& t);
std::string print_type(const CompTypePtr& t);
std::string print_equation(const Equation& eq);

Theory make_theory(std::vector<Equation> eqs);
Signature make_signature(std::vector<std::pair<std::string, OpSig>> ops);

}  // namespace loceff
