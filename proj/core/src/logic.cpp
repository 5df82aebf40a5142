#include "loceff/logic.hpp"

#include <algorithm>

#include "loceff/interp.hpp"

namespace loceff {

FormulaPtr f_true(Span span) { return std::make_shared<Formula>(Formula{FTrue{}, span}); }
FormulaPtr f_false(Span span) { return std::make_shared<Formula>(Formula{FFalse{}, span}); }
FormulaPtr f_value_eq(ValuePtr lhs, ValuePtr rhs, ValueTypePtr type, Span span) {
  return std::make_shared<Formula>(
      Formula{FValueEq{std::move(lhs), std::move(rhs), std::move(type)}, span});
}
FormulaPtr f_comp_eq(CompPtr lhs, CompPtr rhs, CompTypePtr type, Span span) {
  return std::make_shared<Formula>(
      Formula{FCompEq{std::move(lhs), std::move(rhs), std::move(type)}, span});
}
FormulaPtr f_and(FormulaPtr lhs, FormulaPtr rhs, Span span) {
  return std::make_shared<Formula>(Formula{FAnd{std::move(lhs), std::move(rhs)}, span});
}
FormulaPtr f_or(FormulaPtr lhs, FormulaPtr rhs, Span span) {
  return std::make_shared<Formula>(Formula{FOr{std::move(lhs), std::move(rhs)}, span});
}
FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs, Span span) {
  return std::make_shared<Formula>(Formula{FImplies{std::move(lhs), std::move(rhs)}, span});
}
FormulaPtr f_forall(std::string hint, ValueTypePtr type, FormulaPtr body, Span span) {
  return std::make_shared<Formula>(
      Formula{FForall{std::move(hint), std::move(type), std::move(body)}, span});
}
FormulaPtr f_exists(std::string hint, ValueTypePtr type, FormulaPtr body, Span span) {
  return std::make_shared<Formula>(
      Formula{FExists{std::move(hint), std::move(type), std::move(body)}, span});
}

namespace {

FormulaPtr open_f(const FormulaPtr& f, const std::vector<ValuePtr>& reps, int depth) {
  return std::visit(
      [&](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          return f_value_eq(open_value_at(node.lhs, reps, depth),
                            open_value_at(node.rhs, reps, depth), node.type, f->span);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return f_comp_eq(open_comp_at(node.lhs, reps, depth),
                           open_comp_at(node.rhs, reps, depth), node.type, f->span);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return f_and(open_f(node.lhs, reps, depth), open_f(node.rhs, reps, depth), f->span);
        } else if constexpr (std::is_same_v<T, FOr>) {
          return f_or(open_f(node.lhs, reps, depth), open_f(node.rhs, reps, depth), f->span);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return f_implies(open_f(node.lhs, reps, depth), open_f(node.rhs, reps, depth), f->span);
        } else if constexpr (std::is_same_v<T, FForall>) {
          return f_forall(node.hint, node.type, open_f(node.body, reps, depth + 1), f->span);
        } else if constexpr (std::is_same_v<T, FExists>) {
          return f_exists(node.hint, node.type, open_f(node.body, reps, depth + 1), f->span);
        } else {
          return f;
        }
      },
      f->node);
}

FormulaPtr close_f(const FormulaPtr& f, const std::vector<std::string>& names, int depth) {
  return std::visit(
      [&](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          return f_value_eq(close_value_at(node.lhs, names, depth),
                            close_value_at(node.rhs, names, depth), node.type, f->span);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return f_comp_eq(close_comp_at(node.lhs, names, depth),
                           close_comp_at(node.rhs, names, depth), node.type, f->span);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return f_and(close_f(node.lhs, names, depth), close_f(node.rhs, names, depth), f->span);
        } else if constexpr (std::is_same_v<T, FOr>) {
          return f_or(close_f(node.lhs, names, depth), close_f(node.rhs, names, depth), f->span);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return f_implies(close_f(node.lhs, names, depth), close_f(node.rhs, names, depth),
                           f->span);
        } else if constexpr (std::is_same_v<T, FForall>) {
          return f_forall(node.hint, node.type, close_f(node.body, names, depth + 1), f->span);
        } else if constexpr (std::is_same_v<T, FExists>) {
          return f_exists(node.hint, node.type, close_f(node.body, names, depth + 1), f->span);
        } else {
          return f;
        }
      },
      f->node);
}

bool value_has_hole(const ValuePtr& v) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VLambda>) {
          return has_hole(node.body);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          if (has_hole(node.ret_body)) return true;
          for (const auto& [op, clause] : node.clauses) {
            if (has_hole(clause.body)) return true;
          }
          return false;
        } else {
          return false;
        }
      },
      v->node);
}

}  // namespace

FormulaPtr open_formula(const FormulaPtr& f, const std::vector<ValuePtr>& reps) {
  return open_f(f, reps, 0);
}

FormulaPtr close_formula(const FormulaPtr& f, const std::string& name) {
  return close_f(f, std::vector<std::string>{name}, 0);
}

FormulaPtr subst(const FormulaPtr& f, const std::map<std::string, ValuePtr>& bindings) {
  if (bindings.empty()) return f;
  return std::visit(
      [&](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          return f_value_eq(subst(node.lhs, bindings), subst(node.rhs, bindings), node.type,
                            f->span);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return f_comp_eq(subst(node.lhs, bindings), subst(node.rhs, bindings), node.type,
                           f->span);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return f_and(subst(node.lhs, bindings), subst(node.rhs, bindings), f->span);
        } else if constexpr (std::is_same_v<T, FOr>) {
          return f_or(subst(node.lhs, bindings), subst(node.rhs, bindings), f->span);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return f_implies(subst(node.lhs, bindings), subst(node.rhs, bindings), f->span);
        } else if constexpr (std::is_same_v<T, FForall>) {
          return f_forall(node.hint, node.type, subst(node.body, bindings), f->span);
        } else if constexpr (std::is_same_v<T, FExists>) {
          return f_exists(node.hint, node.type, subst(node.body, bindings), f->span);
        } else {
          return f;
        }
      },
      f->node);
}

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, FValueEq>) {
          return type_equal(na.type, nb.type) && alpha_equal(na.lhs, nb.lhs) &&
                 alpha_equal(na.rhs, nb.rhs);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return type_equal(na.type, nb.type) && alpha_equal(na.lhs, nb.lhs) &&
                 alpha_equal(na.rhs, nb.rhs);
        } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr> ||
                             std::is_same_v<T, FImplies>) {
          return alpha_equal(na.lhs, nb.lhs) && alpha_equal(na.rhs, nb.rhs);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FExists>) {
          return type_equal(na.type, nb.type) && alpha_equal(na.body, nb.body);
        } else {
          return true;
        }
      },
      a->node);
}

void free_names(const FormulaPtr& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          free_names(node.lhs, out);
          free_names(node.rhs, out);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          free_names(node.lhs, out);
          free_names(node.rhs, out);
        } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr> ||
                             std::is_same_v<T, FImplies>) {
          free_names(node.lhs, out);
          free_names(node.rhs, out);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FExists>) {
          free_names(node.body, out);
        }
      },
      f->node);
}

std::string print_formula(const FormulaPtr& f) {
  auto atom = [](const FormulaPtr& g) {
    return std::holds_alternative<FTrue>(g->node) || std::holds_alternative<FFalse>(g->node) ||
           std::holds_alternative<FValueEq>(g->node) || std::holds_alternative<FCompEq>(g->node);
  };
  auto wrap = [&](const FormulaPtr& g) {
    return atom(g) ? print_formula(g) : "(" + print_formula(g) + ")";
  };
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FTrue>) {
          return "top";
        } else if constexpr (std::is_same_v<T, FFalse>) {
          return "bot";
        } else if constexpr (std::is_same_v<T, FValueEq>) {
          return print_value(node.lhs) + " == " + print_value(node.rhs) + " @ " +
                 print_type(node.type);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return print_comp(node.lhs) + " == " + print_comp(node.rhs) + " @ " +
                 print_type(node.type);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return wrap(node.lhs) + " /\\ " + wrap(node.rhs);
        } else if constexpr (std::is_same_v<T, FOr>) {
          return wrap(node.lhs) + " \\/ " + wrap(node.rhs);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return wrap(node.lhs) + " => " + wrap(node.rhs);
        } else {
          std::set<std::string> taken;
          free_names(node.body, taken);
          std::string x = fresh_name(node.hint, taken);
          FormulaPtr body = open_formula(node.body, {mk_free(x)});
          const char* head = std::is_same_v<T, FForall> ? "forall " : "exists ";
          return head + x + " : " + print_type(node.type) + " . " + print_formula(body);
        }
      },
      f->node);
}

FormulaPtr plug_formula(const FormulaPtr& schema, const CompPtr& filler) {
  return std::visit(
      [&](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FCompEq>) {
          return f_comp_eq(plug(node.lhs, filler), plug(node.rhs, filler), node.type,
                           schema->span);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return f_and(plug_formula(node.lhs, filler), plug_formula(node.rhs, filler),
                       schema->span);
        } else if constexpr (std::is_same_v<T, FOr>) {
          return f_or(plug_formula(node.lhs, filler), plug_formula(node.rhs, filler),
                      schema->span);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return f_implies(plug_formula(node.lhs, filler), plug_formula(node.rhs, filler),
                           schema->span);
        } else if constexpr (std::is_same_v<T, FForall>) {
          return f_forall(node.hint, node.type, plug_formula(node.body, filler), schema->span);
        } else if constexpr (std::is_same_v<T, FExists>) {
          return f_exists(node.hint, node.type, plug_formula(node.body, filler), schema->span);
        } else {
          return schema;
        }
      },
      schema->node);
}

bool formula_has_hole(const FormulaPtr& f) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          return value_has_hole(node.lhs) || value_has_hole(node.rhs);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return has_hole(node.lhs) || has_hole(node.rhs);
        } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr> ||
                             std::is_same_v<T, FImplies>) {
          return formula_has_hole(node.lhs) || formula_has_hole(node.rhs);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FExists>) {
          return formula_has_hole(node.body);
        } else {
          return false;
        }
      },
      f->node);
}

bool wf_schema(const FormulaPtr& f) {
  bool ok = std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          return !value_has_hole(node.lhs) && !value_has_hole(node.rhs);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          return has_hole(node.lhs) || has_hole(node.rhs);
        } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr> ||
                             std::is_same_v<T, FImplies>) {
          return wf_schema(node.lhs) && wf_schema(node.rhs);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FExists>) {
          return wf_schema(node.body);
        } else {
          return true;
        }
      },
      f->node);
  return ok && formula_has_hole(f);
}

CompPtr thandle(const OpClauses& clauses, const TemplatePtr& t,
                const std::map<std::string, ValuePtr>& fns) {
  return std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          auto it = fns.find(node.var);
          if (it == fns.end())
            throw Error("UnboundTemplateVariable",
                        "no function supplied for template variable " + node.var, t->span);
          return mk_apply(it->second, node.arg, t->span);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return mk_if(node.cond, thandle(clauses, node.then_t, fns),
                       thandle(clauses, node.else_t, fns), t->span);
        } else {
          auto it = clauses.find(node.op);
          if (it == clauses.end())
            throw Error("MissingClause", "handler lacks a clause for operation " + node.op,
                        t->span);
          std::set<std::string> taken;
          free_names(node.body, taken);
          free_names(it->second.body, taken);
          for (const auto& [z, fn] : fns) free_names(fn, taken);
          std::string y = fresh_name(node.cont_hint, taken);
          CompPtr rest = thandle(clauses, open_template(node.body, {mk_free(y)}), fns);
          ValuePtr resume = mk_lambda(node.cont_hint, close_comp(rest, y));
          return open_comp(it->second.body, {resume, node.arg});
        }
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Proof synthesis

namespace {

[[noreturn]] void proof_fail(const std::string& msg, const Span& span) {
  throw Error("E-PROOF", msg, span);
}

const std::set<std::string>& eq_tags() {
  static const std::set<std::string> tags = {
      "refl",        "sym",          "trans",          "beta_if_true",      "beta_if_false",
      "beta_apply",  "beta_do_return", "beta_do_op",   "beta_handle_return", "beta_handle_op",
      "eta_fun",     "eta_do",       "eta_unit",       "cong_if",           "cong_app",
      "cong_return", "cong_op",      "cong_do",        "cong_handle",       "cong_fun",
      "cong_handler", "subst_eq",    "inherit"};
  return tags;
}

const CompPtr& need_comp(const ProofNodePtr& n) {
  if (!n->comp) proof_fail(n->tag + " needs a computation payload", n->span);
  return *n->comp;
}
const ValuePtr& need_value(const ProofNodePtr& n) {
  if (!n->value) proof_fail(n->tag + " needs a value payload", n->span);
  return *n->value;
}
const ValueTypePtr& need_vtype(const ProofNodePtr& n) {
  if (!n->vtype) proof_fail(n->tag + " needs a value type payload", n->span);
  return *n->vtype;
}
const CompTypePtr& need_ctype(const ProofNodePtr& n) {
  if (!n->ctype) proof_fail(n->tag + " needs a computation type payload", n->span);
  return *n->ctype;
}
const FormulaPtr& need_formula(const ProofNodePtr& n) {
  if (!n->formula) proof_fail(n->tag + " needs a formula payload", n->span);
  return *n->formula;
}
const std::string& need_op(const ProofNodePtr& n) {
  if (!n->op) proof_fail(n->tag + " needs an operation or label payload", n->span);
  return *n->op;
}
const std::string& need_binder(const ProofNodePtr& n) {
  if (!n->binder) proof_fail(n->tag + " needs a binder payload", n->span);
  return *n->binder;
}
const std::string& need_cont(const ProofNodePtr& n) {
  if (!n->cont) proof_fail(n->tag + " needs a continuation payload", n->span);
  return *n->cont;
}
size_t need_index(const ProofNodePtr& n) {
  if (!n->index) proof_fail(n->tag + " needs an index payload", n->span);
  return *n->index;
}
void need_children(const ProofNodePtr& n, size_t count) {
  if (n->children.size() != count)
    proof_fail(n->tag + " takes " + std::to_string(count) + " premises, got " +
                   std::to_string(n->children.size()),
               n->span);
}

void must_check_value(const ProofEnv& env, const ValuePtr& v, const ValueTypePtr& type,
                      const Span& span) {
  auto diags = check_value(env.ctx, v, type, env.opts);
  if (!diags.empty())
    proof_fail("ill-typed value at " + print_type(type) + ": " + diags.front().message, span);
}

void must_check_comp(const ProofEnv& env, const CompPtr& c, const CompTypePtr& type,
                     const Span& span) {
  auto diags = check_comp(env.ctx, c, type, env.opts);
  if (!diags.empty())
    proof_fail("ill-typed computation at " + print_type(type) + ": " + diags.front().message,
               span);
}

ProofEnv extend(const ProofEnv& env, const std::string& name, const ValueTypePtr& type,
                const Span& span) {
  if (name.empty()) proof_fail("empty binder name", span);
  if (ctx_lookup(env.ctx, name)) proof_fail("binder " + name + " shadows the context", span);
  ProofEnv out = env;
  out.ctx.emplace_back(name, type);
  return out;
}

struct CompEqParts {
  CompPtr lhs, rhs;
  CompTypePtr type;
};
CompEqParts need_comp_eq(const FormulaPtr& f, const std::string& who, const Span& span) {
  auto* eq = std::get_if<FCompEq>(&f->node);
  if (!eq) proof_fail(who + " needs a computation equation premise", span);
  return {eq->lhs, eq->rhs, eq->type};
}
struct ValueEqParts {
  ValuePtr lhs, rhs;
  ValueTypePtr type;
};
ValueEqParts need_value_eq(const FormulaPtr& f, const std::string& who, const Span& span) {
  auto* eq = std::get_if<FValueEq>(&f->node);
  if (!eq) proof_fail(who + " needs a value equation premise", span);
  return {eq->lhs, eq->rhs, eq->type};
}

void wf_formula_in(const Ctx& ctx, const FormulaPtr& f, const CheckOpts& opts,
                   std::vector<Diag>& diags) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FValueEq>) {
          wf_vtype(node.type, diags);
          for (const auto& d : check_value(ctx, node.lhs, node.type, opts)) diags.push_back(d);
          for (const auto& d : check_value(ctx, node.rhs, node.type, opts)) diags.push_back(d);
        } else if constexpr (std::is_same_v<T, FCompEq>) {
          wf_ctype(node.type, diags);
          for (const auto& d : check_comp(ctx, node.lhs, node.type, opts)) diags.push_back(d);
          for (const auto& d : check_comp(ctx, node.rhs, node.type, opts)) diags.push_back(d);
        } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr> ||
                             std::is_same_v<T, FImplies>) {
          wf_formula_in(ctx, node.lhs, opts, diags);
          wf_formula_in(ctx, node.rhs, opts, diags);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FExists>) {
          wf_vtype(node.type, diags);
          std::set<std::string> taken = ctx_names(ctx);
          free_names(node.body, taken);
          std::string x = fresh_name(node.hint, taken);
          Ctx inner = ctx;
          inner.emplace_back(x, node.type);
          wf_formula_in(inner, open_formula(node.body, {mk_free(x)}), opts, diags);
        }
      },
      f->node);
}

bool is_equation(const FormulaPtr& f) {
  return std::holds_alternative<FValueEq>(f->node) || std::holds_alternative<FCompEq>(f->node);
}

FormulaPtr synth(const ProofEnv& env, const ProofNodePtr& node);

std::vector<FormulaPtr> synth_all(const ProofEnv& env, const ProofNodePtr& node) {
  std::vector<FormulaPtr> out;
  out.reserve(node->children.size());
  for (const auto& child : node->children) out.push_back(synth(env, child));
  return out;
}

FormulaPtr synth_beta(const ProofEnv& env, const ProofNodePtr& node) {
  need_children(node, 0);
  const CompPtr& c = need_comp(node);
  const CompTypePtr& type = need_ctype(node);
  const std::string& tag = node->tag;
  if (!eq_tags().count(tag)) proof_fail("unknown proof rule " + tag, node->span);
  auto shape_ok = [&]() -> bool {
    if (tag == "beta_if_true" || tag == "beta_if_false") {
      auto* n = std::get_if<CIf>(&c->node);
      if (!n) return false;
      auto* b = std::get_if<VBool>(&n->cond->node);
      return b && b->value == (tag == "beta_if_true");
    }
    if (tag == "beta_apply") {
      auto* n = std::get_if<CApply>(&c->node);
      return n && std::holds_alternative<VLambda>(n->fn->node);
    }
    if (tag == "beta_do_return") {
      auto* n = std::get_if<CDo>(&c->node);
      return n && std::holds_alternative<CReturn>(n->first->node);
    }
    if (tag == "beta_do_op") {
      auto* n = std::get_if<CDo>(&c->node);
      return n && std::holds_alternative<COp>(n->first->node);
    }
    if (tag == "beta_handle_return") {
      auto* n = std::get_if<CHandle>(&c->node);
      return n && std::holds_alternative<VHandler>(n->handler->node) &&
             std::holds_alternative<CReturn>(n->body->node);
    }
    auto* n = std::get_if<CHandle>(&c->node);
    return n && std::holds_alternative<VHandler>(n->handler->node) &&
           std::holds_alternative<COp>(n->body->node);
  };
  if (!shape_ok()) proof_fail(tag + " does not apply to this computation", node->span);
  must_check_comp(env, c, type, node->span);
  StepResult s = step(c);
  auto* next = std::get_if<StepNext>(&s);
  if (!next) proof_fail(tag + ": the computation does not reduce", node->span);
  must_check_comp(env, next->comp, type, node->span);
  return f_comp_eq(c, next->comp, type, node->span);
}

FormulaPtr synth(const ProofEnv& env, const ProofNodePtr& node) {
  const std::string& tag = node->tag;
  if (env.eq_only && !eq_tags().count(tag))
    proof_fail(tag + " is outside the equational fragment", node->span);

  if (tag == "refl") {
    need_children(node, 0);
    if (node->comp) {
      const CompTypePtr& type = need_ctype(node);
      must_check_comp(env, *node->comp, type, node->span);
      return f_comp_eq(*node->comp, *node->comp, type, node->span);
    }
    const ValuePtr& v = need_value(node);
    const ValueTypePtr& type = need_vtype(node);
    must_check_value(env, v, type, node->span);
    return f_value_eq(v, v, type, node->span);
  }

  if (tag == "sym") {
    need_children(node, 1);
    FormulaPtr f = synth(env, node->children[0]);
    if (auto* eq = std::get_if<FValueEq>(&f->node))
      return f_value_eq(eq->rhs, eq->lhs, eq->type, node->span);
    if (auto* eq = std::get_if<FCompEq>(&f->node))
      return f_comp_eq(eq->rhs, eq->lhs, eq->type, node->span);
    proof_fail("sym needs an equation premise", node->span);
  }

  if (tag == "trans") {
    if (node->children.size() < 2) proof_fail("trans takes at least two premises", node->span);
    auto premises = synth_all(env, node);
    if (auto* first = std::get_if<FCompEq>(&premises.front()->node)) {
      CompPtr lhs = first->lhs;
      CompPtr prev = first->rhs;
      for (size_t i = 1; i < premises.size(); ++i) {
        auto eq = need_comp_eq(premises[i], "trans", node->children[i]->span);
        if (!type_equal(eq.type, first->type))
          proof_fail("trans premises disagree on the type", node->children[i]->span);
        if (!alpha_equal(prev, eq.lhs))
          proof_fail("trans premises do not chain at step " + std::to_string(i + 1),
                     node->children[i]->span);
        prev = eq.rhs;
      }
      return f_comp_eq(lhs, prev, first->type, node->span);
    }
    auto first = need_value_eq(premises.front(), "trans", node->children[0]->span);
    ValuePtr prev = first.rhs;
    for (size_t i = 1; i < premises.size(); ++i) {
      auto eq = need_value_eq(premises[i], "trans", node->children[i]->span);
      if (!type_equal(eq.type, first.type))
        proof_fail("trans premises disagree on the type", node->children[i]->span);
      if (!alpha_equal(prev, eq.lhs))
        proof_fail("trans premises do not chain at step " + std::to_string(i + 1),
                   node->children[i]->span);
      prev = eq.rhs;
    }
    return f_value_eq(first.lhs, prev, first.type, node->span);
  }

  if (tag.rfind("beta_", 0) == 0) return synth_beta(env, node);

  if (tag == "eta_fun") {
    need_children(node, 0);
    const ValuePtr& v = need_value(node);
    const ValueTypePtr& type = need_vtype(node);
    if (!std::holds_alternative<VTFn>(type->node))
      proof_fail("eta_fun needs a function type", node->span);
    must_check_value(env, v, type, node->span);
    ValuePtr expansion = mk_lambda("x", mk_apply(v, mk_bound(0, "x")), node->span);
    return f_value_eq(expansion, v, type, node->span);
  }

  if (tag == "eta_do") {
    need_children(node, 0);
    const CompPtr& c = need_comp(node);
    const CompTypePtr& type = need_ctype(node);
    must_check_comp(env, c, type, node->span);
    CompPtr expansion = mk_do("x", c, mk_return(mk_bound(0, "x")), node->span);
    return f_comp_eq(expansion, c, type, node->span);
  }

  if (tag == "eta_unit") {
    need_children(node, 0);
    const ValuePtr& v = need_value(node);
    must_check_value(env, v, vt_unit(), node->span);
    return f_value_eq(v, mk_unit(), vt_unit(), node->span);
  }

  if (tag == "cong_if") {
    need_children(node, 3);
    auto cond = need_value_eq(synth(env, node->children[0]), "cong_if", node->span);
    if (!type_equal(cond.type, vt_bool()))
      proof_fail("cong_if condition premise must be at bool", node->span);
    auto then_eq = need_comp_eq(synth(env, node->children[1]), "cong_if", node->span);
    auto else_eq = need_comp_eq(synth(env, node->children[2]), "cong_if", node->span);
    if (!type_equal(then_eq.type, else_eq.type))
      proof_fail("cong_if branch premises disagree on the type", node->span);
    return f_comp_eq(mk_if(cond.lhs, then_eq.lhs, else_eq.lhs),
                     mk_if(cond.rhs, then_eq.rhs, else_eq.rhs), then_eq.type, node->span);
  }

  if (tag == "cong_app") {
    need_children(node, 2);
    auto fn = need_value_eq(synth(env, node->children[0]), "cong_app", node->span);
    auto arg = need_value_eq(synth(env, node->children[1]), "cong_app", node->span);
    auto* fnt = std::get_if<VTFn>(&fn.type->node);
    if (!fnt) proof_fail("cong_app function premise must be at a function type", node->span);
    if (!type_equal(fnt->arg, arg.type))
      proof_fail("cong_app argument premise type mismatch", node->span);
    return f_comp_eq(mk_apply(fn.lhs, arg.lhs), mk_apply(fn.rhs, arg.rhs), fnt->result,
                     node->span);
  }

  if (tag == "cong_return") {
    need_children(node, 1);
    const CompTypePtr& type = need_ctype(node);
    auto v = need_value_eq(synth(env, node->children[0]), "cong_return", node->span);
    if (!type_equal(type->value, v.type))
      proof_fail("cong_return premise type differs from the result type", node->span);
    return f_comp_eq(mk_return(v.lhs), mk_return(v.rhs), type, node->span);
  }

  if (tag == "cong_op") {
    need_children(node, 2);
    const std::string& op = need_op(node);
    const std::string& y = need_binder(node);
    const CompTypePtr& type = need_ctype(node);
    auto sig_it = type->sig.find(op);
    if (sig_it == type->sig.end())
      proof_fail("operation " + op + " is not in the effect row", node->span);
    auto arg = need_value_eq(synth(env, node->children[0]), "cong_op", node->span);
    if (!type_equal(arg.type, sig_it->second.param))
      proof_fail("cong_op argument premise type mismatch", node->span);
    ProofEnv inner = extend(env, y, sig_it->second.result, node->span);
    auto cont = need_comp_eq(synth(inner, node->children[1]), "cong_op", node->span);
    if (!type_equal(cont.type, type))
      proof_fail("cong_op continuation premise type mismatch", node->span);
    return f_comp_eq(mk_op(op, arg.lhs, y, close_comp(cont.lhs, y)),
                     mk_op(op, arg.rhs, y, close_comp(cont.rhs, y)), type, node->span);
  }

  if (tag == "cong_do") {
    need_children(node, 2);
    const std::string& x = need_binder(node);
    auto first = need_comp_eq(synth(env, node->children[0]), "cong_do", node->span);
    ProofEnv inner = extend(env, x, first.type->value, node->span);
    auto rest = need_comp_eq(synth(inner, node->children[1]), "cong_do", node->span);
    if (!signature_equal(first.type->sig, rest.type->sig) ||
        !theory_equal(first.type->theory, rest.type->theory))
      proof_fail("cong_do premises disagree on the effect row", node->span);
    return f_comp_eq(mk_do(x, first.lhs, close_comp(rest.lhs, x)),
                     mk_do(x, first.rhs, close_comp(rest.rhs, x)), rest.type, node->span);
  }

  if (tag == "cong_handle") {
    need_children(node, 2);
    auto h = need_value_eq(synth(env, node->children[0]), "cong_handle", node->span);
    auto* ht = std::get_if<VTHandler>(&h.type->node);
    if (!ht) proof_fail("cong_handle handler premise must be at a handler type", node->span);
    auto body = need_comp_eq(synth(env, node->children[1]), "cong_handle", node->span);
    if (!type_equal(body.type, ht->source))
      proof_fail("cong_handle body premise type mismatch", node->span);
    return f_comp_eq(mk_handle(h.lhs, body.lhs), mk_handle(h.rhs, body.rhs), ht->target,
                     node->span);
  }

  if (tag == "cong_fun") {
    need_children(node, 1);
    const std::string& x = need_binder(node);
    const ValueTypePtr& arg_type = need_vtype(node);
    ProofEnv inner = extend(env, x, arg_type, node->span);
    auto body = need_comp_eq(synth(inner, node->children[0]), "cong_fun", node->span);
    return f_value_eq(mk_lambda(x, close_comp(body.lhs, x)),
                      mk_lambda(x, close_comp(body.rhs, x)), vt_fn(arg_type, body.type),
                      node->span);
  }

  if (tag == "cong_handler") {
    const ValueTypePtr& type = need_vtype(node);
    auto* ht = std::get_if<VTHandler>(&type->node);
    if (!ht) proof_fail("cong_handler needs a handler type", node->span);
    const std::string& xr = need_binder(node);
    need_children(node, 1 + ht->source->sig.size());
    ProofEnv ret_env = extend(env, xr, ht->source->value, node->span);
    auto ret = need_comp_eq(synth(ret_env, node->children[0]), "cong_handler", node->span);
    if (!type_equal(ret.type, ht->target))
      proof_fail("cong_handler return premise type mismatch", node->span);
    VHandler lhs{xr, close_comp(ret.lhs, xr), {}, std::make_pair(ht->source, ht->target), {}};
    VHandler rhs{xr, close_comp(ret.rhs, xr), {}, std::make_pair(ht->source, ht->target), {}};
    size_t idx = 1;
    for (const auto& [op, s] : ht->source->sig) {
      const ProofNodePtr& wrapper = node->children[idx++];
      if (wrapper->tag != "clause" || need_op(wrapper) != op)
        proof_fail("cong_handler expects a clause premise for " + op, wrapper->span);
      const std::string& x = need_binder(wrapper);
      const std::string& k = need_cont(wrapper);
      need_children(wrapper, 1);
      ProofEnv inner = extend(extend(env, x, s.param, wrapper->span), k,
                              vt_fn(s.result, ht->target), wrapper->span);
      auto body = need_comp_eq(synth(inner, wrapper->children[0]), "cong_handler", wrapper->span);
      if (!type_equal(body.type, ht->target))
        proof_fail("cong_handler clause premise type mismatch", wrapper->span);
      lhs.clauses[op] = OpClause{x, k, close_comp(body.lhs, {k, x})};
      rhs.clauses[op] = OpClause{x, k, close_comp(body.rhs, {k, x})};
    }
    ValuePtr vl = mk_handler(std::move(lhs), node->span);
    ValuePtr vr = mk_handler(std::move(rhs), node->span);
    must_check_value(env, vl, type, node->span);
    must_check_value(env, vr, type, node->span);
    return f_value_eq(vl, vr, type, node->span);
  }

  if (tag == "subst_eq") {
    need_children(node, 2);
    const std::string& x = need_binder(node);
    const ValueTypePtr& type = need_vtype(node);
    auto vals = need_value_eq(synth(env, node->children[0]), "subst_eq", node->span);
    if (!type_equal(vals.type, type))
      proof_fail("subst_eq value premise type mismatch", node->span);
    ProofEnv inner = extend(env, x, type, node->span);
    FormulaPtr body = synth(inner, node->children[1]);
    if (auto* eq = std::get_if<FValueEq>(&body->node)) {
      return f_value_eq(subst(eq->lhs, {{x, vals.lhs}}), subst(eq->rhs, {{x, vals.rhs}}),
                        eq->type, node->span);
    }
    if (auto* eq = std::get_if<FCompEq>(&body->node)) {
      return f_comp_eq(subst(eq->lhs, {{x, vals.lhs}}), subst(eq->rhs, {{x, vals.rhs}}),
                       eq->type, node->span);
    }
    proof_fail("subst_eq body premise must be an equation", node->span);
  }

  if (tag == "inherit") {
    need_children(node, 0);
    const std::string& label = need_op(node);
    const CompTypePtr& type = need_ctype(node);
    const Equation* eq = type->theory.find(label);
    if (!eq) proof_fail("no equation labeled " + label + " in the theory", node->span);
    std::map<std::string, ValuePtr> vals;
    for (const auto& [x, a] : eq->value_ctx) {
      auto it = node->vals.find(x);
      if (it == node->vals.end())
        proof_fail("inherit is missing a value for " + x, node->span);
      must_check_value(env, it->second, a, node->span);
      vals[x] = it->second;
    }
    if (vals.size() != node->vals.size())
      proof_fail("inherit supplies values outside the equation context", node->span);
    std::map<std::string, ValuePtr> fns;
    for (const auto& [z, b] : eq->template_ctx) {
      auto it = node->fns.find(z);
      if (it == node->fns.end())
        proof_fail("inherit is missing a function for " + z, node->span);
      must_check_value(env, it->second, vt_fn(b, type), node->span);
      fns[z] = it->second;
    }
    if (fns.size() != node->fns.size())
      proof_fail("inherit supplies functions outside the template context", node->span);
    return f_comp_eq(instantiate_template(eq->lhs, fns, vals),
                     instantiate_template(eq->rhs, fns, vals), type, node->span);
  }

  if (tag == "hyp") {
    need_children(node, 0);
    size_t i = need_index(node);
    if (i >= env.hyps.size())
      proof_fail("hypothesis index " + std::to_string(i) + " out of range", node->span);
    return env.hyps[i];
  }

  if (tag == "and_intro") {
    need_children(node, 2);
    auto premises = synth_all(env, node);
    return f_and(premises[0], premises[1], node->span);
  }
  if (tag == "and_elim_left" || tag == "and_elim_right") {
    need_children(node, 1);
    FormulaPtr f = synth(env, node->children[0]);
    auto* a = std::get_if<FAnd>(&f->node);
    if (!a) proof_fail(tag + " needs a conjunction premise", node->span);
    return tag == "and_elim_left" ? a->lhs : a->rhs;
  }
  if (tag == "or_intro_left" || tag == "or_intro_right") {
    need_children(node, 1);
    const FormulaPtr& other = need_formula(node);
    std::vector<Diag> diags;
    wf_formula_in(env.ctx, other, env.opts, diags);
    if (!diags.empty())
      proof_fail("ill-formed disjunct: " + diags.front().message, node->span);
    FormulaPtr f = synth(env, node->children[0]);
    return tag == "or_intro_left" ? f_or(f, other, node->span) : f_or(other, f, node->span);
  }
  if (tag == "or_elim") {
    need_children(node, 3);
    FormulaPtr f = synth(env, node->children[0]);
    auto* o = std::get_if<FOr>(&f->node);
    if (!o) proof_fail("or_elim needs a disjunction premise", node->span);
    ProofEnv left_env = env;
    left_env.hyps.push_back(o->lhs);
    FormulaPtr from_left = synth(left_env, node->children[1]);
    ProofEnv right_env = env;
    right_env.hyps.push_back(o->rhs);
    FormulaPtr from_right = synth(right_env, node->children[2]);
    if (!alpha_equal(from_left, from_right))
      proof_fail("or_elim cases conclude different formulas", node->span);
    return from_left;
  }
  if (tag == "impl_intro") {
    need_children(node, 1);
    const FormulaPtr& antecedent = need_formula(node);
    std::vector<Diag> diags;
    wf_formula_in(env.ctx, antecedent, env.opts, diags);
    if (!diags.empty())
      proof_fail("ill-formed antecedent: " + diags.front().message, node->span);
    ProofEnv inner = env;
    inner.hyps.push_back(antecedent);
    FormulaPtr body = synth(inner, node->children[0]);
    return f_implies(antecedent, body, node->span);
  }
  if (tag == "impl_elim") {
    need_children(node, 2);
    FormulaPtr f = synth(env, node->children[0]);
    auto* imp = std::get_if<FImplies>(&f->node);
    if (!imp) proof_fail("impl_elim needs an implication premise", node->span);
    FormulaPtr arg = synth(env, node->children[1]);
    if (!alpha_equal(arg, imp->lhs))
      proof_fail("impl_elim premise does not match the antecedent", node->span);
    return imp->rhs;
  }
  if (tag == "forall_intro") {
    need_children(node, 1);
    const std::string& x = need_binder(node);
    const ValueTypePtr& type = need_vtype(node);
    ProofEnv inner = extend(env, x, type, node->span);
    FormulaPtr body = synth(inner, node->children[0]);
    return f_forall(x, type, close_formula(body, x), node->span);
  }
  if (tag == "forall_elim") {
    need_children(node, 1);
    const ValuePtr& v = need_value(node);
    FormulaPtr f = synth(env, node->children[0]);
    auto* fa = std::get_if<FForall>(&f->node);
    if (!fa) proof_fail("forall_elim needs a universal premise", node->span);
    must_check_value(env, v, fa->type, node->span);
    return open_formula(fa->body, {v});
  }
  if (tag == "exists_intro") {
    need_children(node, 1);
    const FormulaPtr& stated = need_formula(node);
    auto* ex = std::get_if<FExists>(&stated->node);
    if (!ex) proof_fail("exists_intro needs an existential formula payload", node->span);
    const ValuePtr& witness = need_value(node);
    must_check_value(env, witness, ex->type, node->span);
    if (node->vtype && !type_equal(*node->vtype, ex->type))
      proof_fail("exists_intro binder type differs from the formula", node->span);
    FormulaPtr body = synth(env, node->children[0]);
    if (!alpha_equal(body, open_formula(ex->body, {witness})))
      proof_fail("exists_intro premise does not match the instantiated body", node->span);
    return stated;
  }
  if (tag == "exists_elim") {
    need_children(node, 2);
    const std::string& x = need_binder(node);
    FormulaPtr f = synth(env, node->children[0]);
    auto* ex = std::get_if<FExists>(&f->node);
    if (!ex) proof_fail("exists_elim needs an existential premise", node->span);
    ProofEnv inner = extend(env, x, ex->type, node->span);
    inner.hyps.push_back(open_formula(ex->body, {mk_free(x)}));
    FormulaPtr conclusion = synth(inner, node->children[1]);
    std::set<std::string> fn;
    free_names(conclusion, fn);
    if (fn.count(x))
      proof_fail("exists_elim conclusion mentions the witness " + x, node->span);
    return conclusion;
  }

  if (tag == "induction") {
    const CompPtr& subject = need_comp(node);
    const CompTypePtr& type = need_ctype(node);
    const FormulaPtr& schema = need_formula(node);
    const std::string& xr = need_binder(node);
    if (!wf_schema(schema)) proof_fail("induction needs a schema with a hole", node->span);
    must_check_comp(env, subject, type, node->span);
    need_children(node, 1 + type->sig.size());
    ProofEnv ret_env = extend(env, xr, type->value, node->span);
    FormulaPtr ret_case = synth(ret_env, node->children[0]);
    FormulaPtr ret_expected = plug_formula(schema, mk_return(mk_free(xr)));
    if (!alpha_equal(ret_case, ret_expected))
      proof_fail("induction return case concludes the wrong formula: expected " +
                     print_formula(ret_expected),
                 node->children[0]->span);
    size_t idx = 1;
    for (const auto& [op, s] : type->sig) {
      const ProofNodePtr& wrapper = node->children[idx++];
      if (wrapper->tag != "case" || need_op(wrapper) != op)
        proof_fail("induction expects a case premise for " + op, wrapper->span);
      const std::string& x = need_binder(wrapper);
      const std::string& k = need_cont(wrapper);
      need_children(wrapper, 1);
      ProofEnv inner =
          extend(extend(env, x, s.param, wrapper->span), k, vt_fn(s.result, type), wrapper->span);
      std::set<std::string> taken = ctx_names(inner.ctx);
      std::string y = fresh_name("y", taken);
      FormulaPtr hyp_body = plug_formula(schema, mk_apply(mk_free(k), mk_free(y)));
      inner.hyps.push_back(f_forall(y, s.result, close_formula(hyp_body, y), wrapper->span));
      FormulaPtr op_case = synth(inner, wrapper->children[0]);
      CompPtr filler = mk_op(op, mk_free(x), "y", mk_apply(mk_free(k), mk_bound(0, "y")));
      FormulaPtr op_expected = plug_formula(schema, filler);
      if (!alpha_equal(op_case, op_expected))
        proof_fail("induction case for " + op + " concludes the wrong formula: expected " +
                       print_formula(op_expected),
                   wrapper->span);
    }
    return plug_formula(schema, subject);
  }

  if (tag == "case" || tag == "clause")
    proof_fail(tag + " premises only appear under induction or cong_handler", node->span);
  proof_fail("unknown proof rule " + tag, node->span);
}

}  // namespace

FormulaPtr synth_proof(const ProofEnv& env, const ProofNodePtr& node) {
  return synth(env, node);
}

std::vector<Diag> check_named_proof(const NamedProof& p, const CheckOpts& opts) {
  std::vector<Diag> diags;
  if (!wf_ctx(p.context, diags)) return diags;
  if (p.eq_only && !p.hyps.empty()) {
    diags.push_back(Diag{"E-PROOF", "equational proofs take no hypotheses", p.span});
    return diags;
  }
  for (const auto& hyp : p.hyps) wf_formula_in(p.context, hyp, opts, diags);
  wf_formula_in(p.context, p.goal, opts, diags);
  if (p.eq_only && !is_equation(p.goal))
    diags.push_back(Diag{"E-PROOF", "equational goals must be equations", p.span});
  if (!diags.empty()) return diags;
  ProofEnv env{p.context, p.hyps, p.eq_only, opts};
  try {
    FormulaPtr got = synth_proof(env, p.script);
    if (!alpha_equal(got, p.goal))
      diags.push_back(Diag{"E-PROOF",
                           "script proves " + print_formula(got) + ", not the stated goal",
                           p.span});
  } catch (const Error& e) {
    diags.push_back(e.diag);
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Respects checking

namespace {

RespectsReport bundle_check(const VHandler& h, const CompTypePtr& source,
                            const CompTypePtr& target, const std::string& name,
                            const RespectsConfig& cfg) {
  RespectsReport rep;
  auto unknown = [&](const std::string& msg) {
    rep.diags.push_back(Diag{"RespectsUnknown", msg, {}});
    return rep;
  };
  if (!cfg.proofs) return unknown("no proof file loaded for evidence " + name);
  const RespectsBundle* bundle = nullptr;
  for (const auto& b : cfg.proofs->bundles) {
    if (b.name == name) {
      bundle = &b;
      break;
    }
  }
  if (!bundle) return unknown("no respects bundle named " + name);
  if (!type_equal(bundle->target, target))
    return unknown("bundle " + name + " targets " + print_type(bundle->target) + ", not " +
                   print_type(target));
  std::map<std::string, const RespectsCase*> by_label;
  for (const auto& cs : bundle->cases) {
    if (!by_label.emplace(cs.label, &cs).second)
      return unknown("bundle " + name + " repeats the label " + cs.label);
  }
  for (const auto& cs : bundle->cases) {
    if (!source->theory.find(cs.label))
      return unknown("bundle " + name + " proves " + cs.label + ", which is not in the theory");
  }
  for (const auto& eq : source->theory.equations) {
    auto it = by_label.find(eq.label);
    if (it == by_label.end())
      return unknown("bundle " + name + " is missing a case for " + eq.label);
    const RespectsCase& cs = *it->second;
    if (cfg.mode == RespectsMode::Eq && !cs.eq_only)
      return unknown("case " + eq.label + " uses the predicate logic under the equational "
                     "discipline");
    size_t vc = eq.value_ctx.size(), tc = eq.template_ctx.size();
    if (cs.context.size() != vc + tc)
      return unknown("case " + eq.label + " declares " + std::to_string(cs.context.size()) +
                     " context entries, the equation needs " + std::to_string(vc + tc));
    std::map<std::string, ValuePtr> rename;
    for (size_t i = 0; i < vc; ++i) {
      if (!type_equal(cs.context[i].second, eq.value_ctx[i].second))
        return unknown("case " + eq.label + " context entry " + cs.context[i].first +
                       " has the wrong type");
      rename[eq.value_ctx[i].first] = mk_free(cs.context[i].first);
    }
    std::map<std::string, ValuePtr> fns;
    for (size_t j = 0; j < tc; ++j) {
      const auto& declared = cs.context[vc + j];
      if (!type_equal(declared.second, vt_fn(eq.template_ctx[j].second, target)))
        return unknown("case " + eq.label + " context entry " + declared.first +
                       " has the wrong type");
      fns[eq.template_ctx[j].first] = mk_free(declared.first);
    }
    FormulaPtr computed;
    try {
      CompPtr lhs = thandle(h.clauses, subst(eq.lhs, rename), fns);
      CompPtr rhs = thandle(h.clauses, subst(eq.rhs, rename), fns);
      computed = f_comp_eq(lhs, rhs, target);
    } catch (const Error& e) {
      rep.diags.push_back(e.diag);
      return unknown("could not compute the obligation for " + eq.label);
    }
    if (!alpha_equal(cs.goal, computed))
      return unknown("case " + eq.label + " states a goal that differs from the computed "
                     "obligation " + print_formula(computed));
    NamedProof p{name + "/" + eq.label, cs.context, {}, computed, cs.eq_only, cs.script,
                 cs.span};
    auto diags = check_named_proof(p, CheckOpts{});
    if (!diags.empty()) {
      for (const auto& d : diags) rep.diags.push_back(d);
      return unknown("the proof for " + eq.label + " does not check");
    }
  }
  rep.verdict = RespectsVerdict::Yes;
  return rep;
}

RespectsReport auto_check(const VHandler& h, const CompTypePtr& source,
                          const CompTypePtr& target, int depth, size_t steps,
                          const EquivBounds& bounds) {
  RespectsReport rep;
  auto unknown = [&](const std::string& msg) {
    rep.diags.push_back(Diag{"RespectsUnknown", msg, {}});
    return rep;
  };
  try {
    TreeOracle oracle(target->theory, target->sig, target->value, depth, bounds.universe_cap);
    Interp interp = denote_clauses({}, h.clauses, source->sig, target, {});
    auto leaves = enumerate_ground(target->value);
    if (!leaves) return unknown("the target result type is not enumerable");
    std::vector<TreePtr> pool;
    for (auto it = leaves->rbegin(); it != leaves->rend(); ++it)
      pool.push_back(tree_return(*it));
    for (const auto& t : oracle.universe()) {
      if (std::holds_alternative<TreeOp>(t->node)) pool.push_back(t);
    }
    size_t used = 0;
    bool gaps = false;
    for (const auto& eq : source->theory.equations) {
      auto envs = enumerate_envs(eq.value_ctx);
      if (!envs)
        return unknown("equation " + eq.label + " ranges over a non-enumerable context");
      auto tctx = eq.template_ctx;
      std::sort(tctx.begin(), tctx.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      struct VarSlots {
        std::string var;
        std::vector<SemValue> carrier;
        size_t offset = 0;
      };
      std::vector<VarSlots> vars;
      size_t total_slots = 0;
      for (const auto& [z, b] : tctx) {
        auto carrier = enumerate_ground(b);
        if (!carrier)
          return unknown("template variable " + z + " takes a non-enumerable argument");
        vars.push_back(VarSlots{z, *carrier, total_slots});
        total_slots += carrier->size();
      }
      for (const auto& eta : *envs) {
        std::vector<size_t> pick(total_slots, 0);
        bool done = false;
        while (!done) {
          if (++used > steps) return unknown("auto search budget exhausted");
          Zeta zeta;
          std::map<std::string, SemValue> tables;
          for (const auto& vs : vars) {
            std::vector<TreePtr> results;
            results.reserve(vs.carrier.size());
            for (size_t i = 0; i < vs.carrier.size(); ++i)
              results.push_back(pool[pick[vs.offset + i]]);
            tables[vs.var] = sem_table(vs.carrier, results);
            std::vector<SemValue> carrier = vs.carrier;
            zeta[vs.var] = [carrier, results](const SemValue& q) -> TreePtr {
              for (size_t i = 0; i < carrier.size(); ++i) {
                if (sem_equal(carrier[i], q)) return results[i];
              }
              throw Error("E-INTERNAL", "probe outside the argument carrier");
            };
          }
          TreePtr lhs = hsem_template(eq.lhs, interp, source->sig, eq.value_ctx, eta, zeta);
          TreePtr rhs = hsem_template(eq.rhs, interp, source->sig, eq.value_ctx, eta, zeta);
          switch (oracle.query(lhs, rhs)) {
            case TreeOracle::Relation::Related:
              break;
            case TreeOracle::Relation::NotRelated: {
              rep.verdict = RespectsVerdict::No;
              rep.counterexample =
                  RespectsCounterexample{eq.label, eta, tables, lhs, rhs, depth};
              rep.diags.push_back(
                  Diag{"RespectsFailed",
                       "equation " + eq.label + " is broken: " + print_tree(lhs) + " vs " +
                           print_tree(rhs) + " at depth " + std::to_string(depth),
                       {}});
              return rep;
            }
            case TreeOracle::Relation::OutsideUniverse:
              gaps = true;
              break;
          }
          done = true;
          size_t i = total_slots;
          while (i > 0) {
            --i;
            if (++pick[i] < pool.size()) {
              done = false;
              break;
            }
            pick[i] = 0;
          }
          if (total_slots == 0) done = true;
        }
      }
    }
    if (gaps)
      return unknown("some probe instances fell outside the universe at depth " +
                     std::to_string(depth));
    rep.verdict = RespectsVerdict::Yes;
    return rep;
  } catch (const Error& e) {
    rep.diags.push_back(e.diag);
    return rep;
  }
}

}  // namespace

RespectsReport check_respects(const VHandler& h, const CompTypePtr& source,
                              const CompTypePtr& target, const RespectsConfig& cfg) {
  RespectsReport rep;
  if (cfg.mode == RespectsMode::Null) {
    rep.diags.push_back(Diag{"RespectsUnknown", "respects checking is disabled", {}});
    return rep;
  }
  if (source->theory.empty()) {
    rep.verdict = RespectsVerdict::Yes;
    return rep;
  }
  if (cfg.mode == RespectsMode::Free) {
    rep.diags.push_back(
        Diag{"RespectsUnknown", "the free discipline only accepts empty theories", {}});
    return rep;
  }
  if (cfg.mode == RespectsMode::Auto)
    return auto_check(h, source, target, cfg.auto_depth, cfg.auto_steps, cfg.bounds);
  if (!h.evidence) {
    rep.diags.push_back(Diag{"RespectsUnknown", "the handler carries no evidence", {}});
    return rep;
  }
  if (auto* name = std::get_if<std::string>(&h.evidence->source))
    return bundle_check(h, source, target, *name, cfg);
  const auto& a = std::get<Evidence::Auto>(h.evidence->source);
  if (cfg.mode == RespectsMode::Eq) {
    rep.diags.push_back(
        Diag{"RespectsUnknown", "auto evidence requires the predicate discipline", {}});
    return rep;
  }
  return auto_check(h, source, target, a.depth, static_cast<size_t>(a.steps), cfg.bounds);
}

bool replay_counterexample(const VHandler& h, const CompTypePtr& source,
                           const CompTypePtr& target, const RespectsCounterexample& cex,
                           const EquivBounds& bounds) {
  try {
    const Equation* eq = source->theory.find(cex.label);
    if (!eq) return false;
    Interp interp = denote_clauses({}, h.clauses, source->sig, target, {});
    Zeta zeta;
    for (const auto& [var, table] : cex.zeta) {
      auto* t = std::get_if<std::shared_ptr<const SemFnTable>>(&table.node);
      if (!t) return false;
      auto captured = *t;
      zeta[var] = [captured](const SemValue& q) -> TreePtr {
        for (size_t i = 0; i < captured->domain.size(); ++i) {
          if (sem_equal(captured->domain[i], q)) return captured->results[i];
        }
        throw Error("E-INTERNAL", "probe outside the argument carrier");
      };
    }
    TreePtr lhs = hsem_template(eq->lhs, interp, source->sig, eq->value_ctx, cex.eta, zeta);
    TreePtr rhs = hsem_template(eq->rhs, interp, source->sig, eq->value_ctx, cex.eta, zeta);
    if (!tree_equal(lhs, cex.lhs) || !tree_equal(rhs, cex.rhs)) return false;
    TreeOracle oracle(target->theory, target->sig, target->value, cex.oracle_depth,
                      bounds.universe_cap);
    return oracle.query(lhs, rhs) == TreeOracle::Relation::NotRelated;
  } catch (const Error&) {
    return false;
  }
}

namespace {

struct ConfiguredOracle : RespectsOracle {
  RespectsConfig cfg;
  explicit ConfiguredOracle(RespectsConfig c) : cfg(std::move(c)) {}
  RespectsVerdict respects(const VHandler& h, const CompTypePtr& source,
                           const CompTypePtr& target, std::vector<Diag>& diags) const override {
    RespectsReport rep = check_respects(h, source, target, cfg);
    for (const auto& d : rep.diags) diags.push_back(d);
    return rep.verdict;
  }
};

}  // namespace

std::unique_ptr<RespectsOracle> make_respects_oracle(RespectsConfig cfg) {
  return std::make_unique<ConfiguredOracle>(std::move(cfg));
}

}  // namespace loceff
