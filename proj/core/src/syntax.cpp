#include "loceff/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace loceff {

const Equation* Theory::find(const std::string& label) const {
  for (const auto& eq : equations)
    if (eq.label == label) return &eq;
  return nullptr;
}

ValueTypePtr vt_unit() {
  static const auto t = std::make_shared<ValueType>(ValueType{VTUnit{}});
  return t;
}
ValueTypePtr vt_bool() {
  static const auto t = std::make_shared<ValueType>(ValueType{VTBool{}});
  return t;
}
ValueTypePtr vt_fn(ValueTypePtr arg, CompTypePtr result) {
  return std::make_shared<ValueType>(ValueType{VTFn{std::move(arg), std::move(result)}});
}
ValueTypePtr vt_handler(CompTypePtr source, CompTypePtr target) {
  return std::make_shared<ValueType>(ValueType{VTHandler{std::move(source), std::move(target)}});
}
CompTypePtr ct(ValueTypePtr value, Signature sig, Theory theory) {
  return std::make_shared<CompType>(CompType{std::move(value), std::move(sig), std::move(theory)});
}

ValuePtr mk_free(std::string name, Span span) {
  return std::make_shared<ValueTerm>(ValueTerm{VFree{std::move(name)}, span});
}
ValuePtr mk_bound(int index, std::string hint, Span span) {
  return std::make_shared<ValueTerm>(ValueTerm{VBound{index, std::move(hint)}, span});
}
ValuePtr mk_unit(Span span) { return std::make_shared<ValueTerm>(ValueTerm{VUnit{}, span}); }
ValuePtr mk_bool(bool value, Span span) {
  return std::make_shared<ValueTerm>(ValueTerm{VBool{value}, span});
}
ValuePtr mk_lambda(std::string hint, CompPtr body, Span span) {
  return std::make_shared<ValueTerm>(ValueTerm{VLambda{std::move(hint), std::move(body)}, span});
}
ValuePtr mk_handler(VHandler h, Span span) {
  return std::make_shared<ValueTerm>(ValueTerm{std::move(h), span});
}
CompPtr mk_if(ValuePtr cond, CompPtr then_c, CompPtr else_c, Span span) {
  return std::make_shared<CompTerm>(
      CompTerm{CIf{std::move(cond), std::move(then_c), std::move(else_c)}, span});
}
CompPtr mk_apply(ValuePtr fn, ValuePtr arg, Span span) {
  return std::make_shared<CompTerm>(CompTerm{CApply{std::move(fn), std::move(arg)}, span});
}
CompPtr mk_return(ValuePtr value, Span span) {
  return std::make_shared<CompTerm>(CompTerm{CReturn{std::move(value)}, span});
}
CompPtr mk_op(std::string op, ValuePtr arg, std::string cont_hint, CompPtr cont, Span span) {
  return std::make_shared<CompTerm>(
      CompTerm{COp{std::move(op), std::move(arg), std::move(cont_hint), std::move(cont)}, span});
}
CompPtr mk_do(std::string hint, CompPtr first, CompPtr rest, Span span) {
  return std::make_shared<CompTerm>(
      CompTerm{CDo{std::move(hint), std::move(first), std::move(rest)}, span});
}
CompPtr mk_handle(ValuePtr handler, CompPtr body, Span span) {
  return std::make_shared<CompTerm>(CompTerm{CHandle{std::move(handler), std::move(body)}, span});
}
CompPtr mk_hole(Span span) { return std::make_shared<CompTerm>(CompTerm{CHole{}, span}); }
TemplatePtr mk_tvar(std::string var, ValuePtr arg, Span span) {
  return std::make_shared<Template>(Template{TVar{std::move(var), std::move(arg)}, span});
}
TemplatePtr mk_tif(ValuePtr cond, TemplatePtr then_t, TemplatePtr else_t, Span span) {
  return std::make_shared<Template>(
      Template{TIf{std::move(cond), std::move(then_t), std::move(else_t)}, span});
}
TemplatePtr mk_top(std::string op, ValuePtr arg, std::string cont_hint, TemplatePtr body,
                   Span span) {
  return std::make_shared<Template>(
      Template{TOp{std::move(op), std::move(arg), std::move(cont_hint), std::move(body)}, span});
}

// ---------------------------------------------------------------------------
// open / close / subst

namespace {

ValuePtr open_v(const ValuePtr& v, const std::vector<ValuePtr>& reps, int depth);
CompPtr open_c(const CompPtr& c, const std::vector<ValuePtr>& reps, int depth);
TemplatePtr open_t(const TemplatePtr& t, const std::vector<ValuePtr>& reps, int depth);

ValuePtr open_v(const ValuePtr& v, const std::vector<ValuePtr>& reps, int depth) {
  return std::visit(
      [&](const auto& node) -> ValuePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VBound>) {
          if (node.index < depth) return v;
          int k = node.index - depth;
          if (k < static_cast<int>(reps.size())) return reps[k];
          throw Error("E-INTERNAL", "dangling bound variable survived open", v->span);
        } else if constexpr (std::is_same_v<T, VLambda>) {
          return mk_lambda(node.hint, open_c(node.body, reps, depth + 1), v->span);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          VHandler h = node;
          h.ret_body = open_c(node.ret_body, reps, depth + 1);
          for (auto& [op, clause] : h.clauses) clause.body = open_c(clause.body, reps, depth + 2);
          return mk_handler(std::move(h), v->span);
        } else {
          return v;
        }
      },
      v->node);
}

CompPtr open_c(const CompPtr& c, const std::vector<ValuePtr>& reps, int depth) {
  return std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          return mk_if(open_v(node.cond, reps, depth), open_c(node.then_c, reps, depth),
                       open_c(node.else_c, reps, depth), c->span);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return mk_apply(open_v(node.fn, reps, depth), open_v(node.arg, reps, depth), c->span);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return mk_return(open_v(node.value, reps, depth), c->span);
        } else if constexpr (std::is_same_v<T, COp>) {
          return mk_op(node.op, open_v(node.arg, reps, depth), node.cont_hint,
                       open_c(node.cont, reps, depth + 1), c->span);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return mk_do(node.hint, open_c(node.first, reps, depth),
                       open_c(node.rest, reps, depth + 1), c->span);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return mk_handle(open_v(node.handler, reps, depth), open_c(node.body, reps, depth),
                           c->span);
        } else {
          return c;  // CHole
        }
      },
      c->node);
}

TemplatePtr open_t(const TemplatePtr& t, const std::vector<ValuePtr>& reps, int depth) {
  return std::visit(
      [&](const auto& node) -> TemplatePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return mk_tvar(node.var, open_v(node.arg, reps, depth), t->span);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return mk_tif(open_v(node.cond, reps, depth), open_t(node.then_t, reps, depth),
                        open_t(node.else_t, reps, depth), t->span);
        } else {
          return mk_top(node.op, open_v(node.arg, reps, depth), node.cont_hint,
                        open_t(node.body, reps, depth + 1), t->span);
        }
      },
      t->node);
}

ValuePtr close_v(const ValuePtr& v, const std::vector<std::string>& names, int depth);
CompPtr close_c(const CompPtr& c, const std::vector<std::string>& names, int depth);

ValuePtr close_v(const ValuePtr& v, const std::vector<std::string>& names, int depth) {
  return std::visit(
      [&](const auto& node) -> ValuePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          for (size_t i = 0; i < names.size(); ++i) {
            if (node.name == names[i]) return mk_bound(depth + static_cast<int>(i), node.name, v->span);
          }
          return v;
        } else if constexpr (std::is_same_v<T, VLambda>) {
          return mk_lambda(node.hint, close_c(node.body, names, depth + 1), v->span);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          VHandler h = node;
          h.ret_body = close_c(node.ret_body, names, depth + 1);
          for (auto& [op, clause] : h.clauses) clause.body = close_c(clause.body, names, depth + 2);
          return mk_handler(std::move(h), v->span);
        } else {
          return v;
        }
      },
      v->node);
}

CompPtr close_c(const CompPtr& c, const std::vector<std::string>& names, int depth) {
  return std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          return mk_if(close_v(node.cond, names, depth), close_c(node.then_c, names, depth),
                       close_c(node.else_c, names, depth), c->span);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return mk_apply(close_v(node.fn, names, depth), close_v(node.arg, names, depth), c->span);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return mk_return(close_v(node.value, names, depth), c->span);
        } else if constexpr (std::is_same_v<T, COp>) {
          return mk_op(node.op, close_v(node.arg, names, depth), node.cont_hint,
                       close_c(node.cont, names, depth + 1), c->span);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return mk_do(node.hint, close_c(node.first, names, depth),
                       close_c(node.rest, names, depth + 1), c->span);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return mk_handle(close_v(node.handler, names, depth), close_c(node.body, names, depth),
                           c->span);
        } else {
          return c;
        }
      },
      c->node);
}

TemplatePtr close_t(const TemplatePtr& t, const std::vector<std::string>& names, int depth) {
  return std::visit(
      [&](const auto& node) -> TemplatePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return mk_tvar(node.var, close_v(node.arg, names, depth), t->span);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return mk_tif(close_v(node.cond, names, depth), close_t(node.then_t, names, depth),
                        close_t(node.else_t, names, depth), t->span);
        } else {
          return mk_top(node.op, close_v(node.arg, names, depth), node.cont_hint,
                        close_t(node.body, names, depth + 1), t->span);
        }
      },
      t->node);
}

ValuePtr subst_v(const ValuePtr& v, const std::map<std::string, ValuePtr>& b);
CompPtr subst_c(const CompPtr& c, const std::map<std::string, ValuePtr>& b);
TemplatePtr subst_t(const TemplatePtr& t, const std::map<std::string, ValuePtr>& b);

ValuePtr subst_v(const ValuePtr& v, const std::map<std::string, ValuePtr>& b) {
  return std::visit(
      [&](const auto& node) -> ValuePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          auto it = b.find(node.name);
          return it == b.end() ? v : it->second;
        } else if constexpr (std::is_same_v<T, VLambda>) {
          return mk_lambda(node.hint, subst_c(node.body, b), v->span);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          VHandler h = node;
          h.ret_body = subst_c(node.ret_body, b);
          for (auto& [op, clause] : h.clauses) clause.body = subst_c(clause.body, b);
          return mk_handler(std::move(h), v->span);
        } else {
          return v;
        }
      },
      v->node);
}

CompPtr subst_c(const CompPtr& c, const std::map<std::string, ValuePtr>& b) {
  return std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          return mk_if(subst_v(node.cond, b), subst_c(node.then_c, b), subst_c(node.else_c, b),
                       c->span);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return mk_apply(subst_v(node.fn, b), subst_v(node.arg, b), c->span);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return mk_return(subst_v(node.value, b), c->span);
        } else if constexpr (std::is_same_v<T, COp>) {
          return mk_op(node.op, subst_v(node.arg, b), node.cont_hint, subst_c(node.cont, b),
                       c->span);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return mk_do(node.hint, subst_c(node.first, b), subst_c(node.rest, b), c->span);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return mk_handle(subst_v(node.handler, b), subst_c(node.body, b), c->span);
        } else {
          return c;
        }
      },
      c->node);
}

TemplatePtr subst_t(const TemplatePtr& t, const std::map<std::string, ValuePtr>& b) {
  return std::visit(
      [&](const auto& node) -> TemplatePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return mk_tvar(node.var, subst_v(node.arg, b), t->span);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return mk_tif(subst_v(node.cond, b), subst_t(node.then_t, b), subst_t(node.else_t, b),
                        t->span);
        } else {
          return mk_top(node.op, subst_v(node.arg, b), node.cont_hint, subst_t(node.body, b),
                        t->span);
        }
      },
      t->node);
}

}  // namespace

ValuePtr open_value(const ValuePtr& v, const std::vector<ValuePtr>& reps) {
  return open_v(v, reps, 0);
}
CompPtr open_comp(const CompPtr& c, const std::vector<ValuePtr>& reps) {
  return open_c(c, reps, 0);
}
TemplatePtr open_template(const TemplatePtr& t, const std::vector<ValuePtr>& reps) {
  return open_t(t, reps, 0);
}
CompPtr close_comp(const CompPtr& c, const std::string& name) {
  return close_c(c, std::vector<std::string>{name}, 0);
}
CompPtr close_comp(const CompPtr& c, const std::vector<std::string>& names) {
  return close_c(c, names, 0);
}
ValuePtr close_value(const ValuePtr& v, const std::string& name) {
  return close_v(v, std::vector<std::string>{name}, 0);
}
TemplatePtr close_template(const TemplatePtr& t, const std::string& name) {
  return close_t(t, std::vector<std::string>{name}, 0);
}
ValuePtr open_value_at(const ValuePtr& v, const std::vector<ValuePtr>& reps, int depth) {
  return open_v(v, reps, depth);
}
CompPtr open_comp_at(const CompPtr& c, const std::vector<ValuePtr>& reps, int depth) {
  return open_c(c, reps, depth);
}
ValuePtr close_value_at(const ValuePtr& v, const std::vector<std::string>& names, int depth) {
  return close_v(v, names, depth);
}
CompPtr close_comp_at(const CompPtr& c, const std::vector<std::string>& names, int depth) {
  return close_c(c, names, depth);
}

ValuePtr subst(const ValuePtr& v, const std::map<std::string, ValuePtr>& bindings) {
  return bindings.empty() ? v : subst_v(v, bindings);
}
CompPtr subst(const CompPtr& c, const std::map<std::string, ValuePtr>& bindings) {
  return bindings.empty() ? c : subst_c(c, bindings);
}
TemplatePtr subst(const TemplatePtr& t, const std::map<std::string, ValuePtr>& bindings) {
  return bindings.empty() ? t : subst_t(t, bindings);
}

// ---------------------------------------------------------------------------
// alpha equality

bool alpha_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, VFree>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<T, VBound>) {
          return na.index == nb.index;
        } else if constexpr (std::is_same_v<T, VUnit>) {
          return true;
        } else if constexpr (std::is_same_v<T, VBool>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, VLambda>) {
          return alpha_equal(na.body, nb.body);
        } else {
          static_assert(std::is_same_v<T, VHandler>);
          if (!alpha_equal(na.ret_body, nb.ret_body)) return false;
          if (na.clauses.size() != nb.clauses.size()) return false;
          auto ia = na.clauses.begin();
          auto ib = nb.clauses.begin();
          for (; ia != na.clauses.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return false;
            if (!alpha_equal(ia->second.body, ib->second.body)) return false;
          }
          return true;
        }
      },
      a->node);
}

bool alpha_equal(const CompPtr& a, const CompPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, CIf>) {
          return alpha_equal(na.cond, nb.cond) && alpha_equal(na.then_c, nb.then_c) &&
                 alpha_equal(na.else_c, nb.else_c);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return alpha_equal(na.fn, nb.fn) && alpha_equal(na.arg, nb.arg);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return alpha_equal(na.value, nb.value);
        } else if constexpr (std::is_same_v<T, COp>) {
          return na.op == nb.op && alpha_equal(na.arg, nb.arg) && alpha_equal(na.cont, nb.cont);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return alpha_equal(na.first, nb.first) && alpha_equal(na.rest, nb.rest);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return alpha_equal(na.handler, nb.handler) && alpha_equal(na.body, nb.body);
        } else {
          return true;  // CHole
        }
      },
      a->node);
}

bool alpha_equal(const TemplatePtr& a, const TemplatePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, TVar>) {
          return na.var == nb.var && alpha_equal(na.arg, nb.arg);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return alpha_equal(na.cond, nb.cond) && alpha_equal(na.then_t, nb.then_t) &&
                 alpha_equal(na.else_t, nb.else_t);
        } else {
          return na.op == nb.op && alpha_equal(na.arg, nb.arg) && alpha_equal(na.body, nb.body);
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// free names / bound mentions / holes / sizes

void free_names(const ValuePtr& v, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          out.insert(node.name);
        } else if constexpr (std::is_same_v<T, VLambda>) {
          free_names(node.body, out);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          free_names(node.ret_body, out);
          for (const auto& [op, clause] : node.clauses) free_names(clause.body, out);
        }
      },
      v->node);
}

void free_names(const CompPtr& c, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          free_names(node.cond, out);
          free_names(node.then_c, out);
          free_names(node.else_c, out);
        } else if constexpr (std::is_same_v<T, CApply>) {
          free_names(node.fn, out);
          free_names(node.arg, out);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          free_names(node.value, out);
        } else if constexpr (std::is_same_v<T, COp>) {
          free_names(node.arg, out);
          free_names(node.cont, out);
        } else if constexpr (std::is_same_v<T, CDo>) {
          free_names(node.first, out);
          free_names(node.rest, out);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          free_names(node.handler, out);
          free_names(node.body, out);
        }
      },
      c->node);
}

void free_names(const TemplatePtr& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          out.insert(node.var);
          free_names(node.arg, out);
        } else if constexpr (std::is_same_v<T, TIf>) {
          free_names(node.cond, out);
          free_names(node.then_t, out);
          free_names(node.else_t, out);
        } else {
          free_names(node.arg, out);
          free_names(node.body, out);
        }
      },
      t->node);
}

std::set<std::string> free_names(const CompPtr& c) {
  std::set<std::string> out;
  free_names(c, out);
  return out;
}

bool mentions_bound(const ValuePtr& v, int distance) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VBound>) {
          return node.index == distance;
        } else if constexpr (std::is_same_v<T, VLambda>) {
          return mentions_bound(node.body, distance + 1);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          if (mentions_bound(node.ret_body, distance + 1)) return true;
          for (const auto& [op, clause] : node.clauses)
            if (mentions_bound(clause.body, distance + 2)) return true;
          return false;
        } else {
          return false;
        }
      },
      v->node);
}

bool mentions_bound(const CompPtr& c, int distance) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          return mentions_bound(node.cond, distance) || mentions_bound(node.then_c, distance) ||
                 mentions_bound(node.else_c, distance);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return mentions_bound(node.fn, distance) || mentions_bound(node.arg, distance);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return mentions_bound(node.value, distance);
        } else if constexpr (std::is_same_v<T, COp>) {
          return mentions_bound(node.arg, distance) || mentions_bound(node.cont, distance + 1);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return mentions_bound(node.first, distance) || mentions_bound(node.rest, distance + 1);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return mentions_bound(node.handler, distance) || mentions_bound(node.body, distance);
        } else {
          return false;
        }
      },
      c->node);
}

bool has_hole(const CompPtr& c) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CHole>) {
          return true;
        } else if constexpr (std::is_same_v<T, CIf>) {
          return has_hole(node.then_c) || has_hole(node.else_c);
        } else if constexpr (std::is_same_v<T, COp>) {
          return has_hole(node.cont);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return has_hole(node.first) || has_hole(node.rest);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return has_hole(node.body);
        } else {
          return false;
        }
      },
      c->node);
}

CompPtr plug(const CompPtr& c, const CompPtr& fill) {
  return std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CHole>) {
          return fill;
        } else if constexpr (std::is_same_v<T, CIf>) {
          return mk_if(node.cond, plug(node.then_c, fill), plug(node.else_c, fill), c->span);
        } else if constexpr (std::is_same_v<T, COp>) {
          return mk_op(node.op, node.arg, node.cont_hint, plug(node.cont, fill), c->span);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return mk_do(node.hint, plug(node.first, fill), plug(node.rest, fill), c->span);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return mk_handle(node.handler, plug(node.body, fill), c->span);
        } else {
          return c;
        }
      },
      c->node);
}

size_t term_size(const ValuePtr& v) {
  return std::visit(
      [&](const auto& node) -> size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VLambda>) {
          return 1 + term_size(node.body);
        } else if constexpr (std::is_same_v<T, VHandler>) {
          size_t n = 1 + term_size(node.ret_body);
          for (const auto& [op, clause] : node.clauses) n += term_size(clause.body);
          return n;
        } else {
          return 1;
        }
      },
      v->node);
}

size_t term_size(const CompPtr& c) {
  return std::visit(
      [&](const auto& node) -> size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          return 1 + term_size(node.cond) + term_size(node.then_c) + term_size(node.else_c);
        } else if constexpr (std::is_same_v<T, CApply>) {
          return 1 + term_size(node.fn) + term_size(node.arg);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return 1 + term_size(node.value);
        } else if constexpr (std::is_same_v<T, COp>) {
          return 1 + term_size(node.arg) + term_size(node.cont);
        } else if constexpr (std::is_same_v<T, CDo>) {
          return 1 + term_size(node.first) + term_size(node.rest);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          return 1 + term_size(node.handler) + term_size(node.body);
        } else {
          return 1;
        }
      },
      c->node);
}

std::string fresh_name(const std::string& hint, const std::set<std::string>& taken) {
  std::string base = hint.empty() ? "x" : hint;
  if (base == "_") return "_";
  std::string candidate = base;
  while (taken.count(candidate)) candidate += '\'';
  return candidate;
}

CompPtr instantiate_template(const TemplatePtr& t, const std::map<std::string, ValuePtr>& fns,
                             const std::map<std::string, ValuePtr>& vals) {
  CompPtr body = std::visit(
      [&](const auto& node) -> CompPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          auto it = fns.find(node.var);
          if (it == fns.end())
            throw Error("UnboundTemplateVariable",
                        "no instantiation given for template variable " + node.var, t->span);
          return mk_apply(it->second, node.arg, t->span);
        } else if constexpr (std::is_same_v<T, TIf>) {
          return mk_if(node.cond, instantiate_template(node.then_t, fns, {}),
                       instantiate_template(node.else_t, fns, {}), t->span);
        } else {
          return mk_op(node.op, node.arg, node.cont_hint, instantiate_template(node.body, fns, {}),
                       t->span);
        }
      },
      t->node);
  return subst(body, vals);
}

// ---------------------------------------------------------------------------
// printing

namespace {

bool value_is_atom(const ValuePtr& v) {
  return !std::holds_alternative<VLambda>(v->node) && !std::holds_alternative<VHandler>(v->node);
}

std::string effective_hint(const std::string& hint, const CompPtr& body, int distance) {
  if (hint == "_" && mentions_bound(body, distance)) return "x";
  return hint;
}

struct Printer {
  std::vector<std::string> scope;  // innermost binder last
  std::set<std::string> taken;     // free names plus all chosen binder names

  std::string bind(const std::string& hint) {
    std::string name = fresh_name(hint, taken);
    scope.push_back(name);
    if (name != "_") taken.insert(name);
    return name;
  }
  void unbind(size_t n = 1) {
    for (size_t i = 0; i < n; i++) {
      if (scope.back() != "_") taken.erase(scope.back());
      scope.pop_back();
    }
  }

  std::string value(const ValuePtr& v, bool atom_pos) {
    return std::visit(
        [&](const auto& node) -> std::string {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VFree>) {
            return node.name;
          } else if constexpr (std::is_same_v<T, VBound>) {
            int pos = static_cast<int>(scope.size()) - 1 - node.index;
            if (pos < 0) throw Error("E-INTERNAL", "bound variable escapes printing scope");
            return scope[pos];
          } else if constexpr (std::is_same_v<T, VUnit>) {
            return "()";
          } else if constexpr (std::is_same_v<T, VBool>) {
            return node.value ? "true" : "false";
          } else if constexpr (std::is_same_v<T, VLambda>) {
            std::string name = bind(effective_hint(node.hint, node.body, 0));
            std::string body = comp(node.body, false);
            unbind();
            std::string out = "fun " + name + " -> " + body;
            return atom_pos ? "(" + out + ")" : out;
          } else {
            static_assert(std::is_same_v<T, VHandler>);
            std::string out = "handler { ";
            bool first = true;
            for (const auto& [op, clause] : node.clauses) {
              if (!first) out += " | ";
              first = false;
              std::string xa = bind(effective_hint(clause.arg_hint, clause.body, 1));
              std::string xk = bind(effective_hint(clause.cont_hint, clause.body, 0));
              out += op + "(" + xa + "; " + xk + ") -> " + comp(clause.body, false);
              unbind(2);
            }
            if (!first) out += " | ";
            std::string xr = bind(effective_hint(node.ret_hint, node.ret_body, 0));
            out += "return " + xr + " -> " + comp(node.ret_body, false);
            unbind();
            out += " }";
            if (node.ascription) {
              out += " : " + print_type(node.ascription->first) + " => " +
                     print_type(node.ascription->second);
            }
            if (node.evidence) {
              if (auto* name = std::get_if<std::string>(&node.evidence->source)) {
                out += " by " + *name;
              } else {
                const auto& a = std::get<Evidence::Auto>(node.evidence->source);
                out += " by auto(depth = " + std::to_string(a.depth) +
                       ", steps = " + std::to_string(a.steps) + ")";
              }
            }
            return atom_pos ? "(" + out + ")" : out;
          }
        },
        v->node);
  }

  // protected_pos: positions a trailing-extender form must not bleed out of
  // (the bound side of do, the then branch, the left of `;`).
  std::string comp(const CompPtr& c, bool protected_pos) {
    return std::visit(
        [&](const auto& node) -> std::string {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, CIf>) {
            std::string out = "if " + value(node.cond, true) + " then " +
                              comp(node.then_c, true) + " else " + comp(node.else_c, false);
            return protected_pos ? "(" + out + ")" : out;
          } else if constexpr (std::is_same_v<T, CApply>) {
            std::string fn = value(node.fn, true);
            std::string arg = value(node.arg, true);
            if (!value_is_atom(node.arg) && std::holds_alternative<VFree>(node.fn->node))
              fn = "(" + fn + ")";
            return fn + " " + arg;
          } else if constexpr (std::is_same_v<T, CReturn>) {
            return "return " + value(node.value, true);
          } else if constexpr (std::is_same_v<T, COp>) {
            std::string arg = value(node.arg, true);
            std::string name = bind(effective_hint(node.cont_hint, node.cont, 0));
            std::string body = comp(node.cont, false);
            unbind();
            return node.op + "(" + arg + "; " + name + ". " + body + ")";
          } else if constexpr (std::is_same_v<T, CDo>) {
            std::string out;
            if (node.hint == "_" && !mentions_bound(node.rest, 0)) {
              std::string first = comp(node.first, true);
              scope.push_back("_");
              std::string rest = comp(node.rest, false);
              scope.pop_back();
              out = first + "; " + rest;
            } else {
              std::string first = comp(node.first, true);
              std::string name = bind(effective_hint(node.hint, node.rest, 0));
              std::string rest = comp(node.rest, false);
              unbind();
              out = "do " + name + " <- " + first + " in " + rest;
            }
            return protected_pos ? "(" + out + ")" : out;
          } else if constexpr (std::is_same_v<T, CHandle>) {
            std::string out =
                "with " + value(node.handler, true) + " handle " + comp(node.body, false);
            return protected_pos ? "(" + out + ")" : out;
          } else {
            return "[.]";
          }
        },
        c->node);
  }

  std::string templ(const TemplatePtr& t) {
    return std::visit(
        [&](const auto& node) -> std::string {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, TVar>) {
            return node.var + " " + value(node.arg, true);
          } else if constexpr (std::is_same_v<T, TIf>) {
            return "if " + value(node.cond, true) + " then " + templ(node.then_t) + " else " +
                   templ(node.else_t);
          } else {
            std::string arg = value(node.arg, true);
            std::string name = bind(node.cont_hint);
            std::string body = templ(node.body);
            unbind();
            return node.op + "(" + arg + "; " + name + ". " + body + ")";
          }
        },
        t->node);
  }
};

Printer make_printer(std::set<std::string> free) {
  Printer p;
  p.taken = std::move(free);
  return p;
}

}  // namespace

std::string print_value(const ValuePtr& v) {
  std::set<std::string> free;
  free_names(v, free);
  auto p = make_printer(std::move(free));
  return p.value(v, false);
}

std::string print_comp(const CompPtr& c) {
  std::set<std::string> free;
  free_names(c, free);
  auto p = make_printer(std::move(free));
  return p.comp(c, false);
}

std::string print_template(const TemplatePtr& t) {
  std::set<std::string> free;
  free_names(t, free);
  auto p = make_printer(std::move(free));
  return p.templ(t);
}

std::string print_type(const ValueTypePtr& t) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VTUnit>) {
          return "unit";
        } else if constexpr (std::is_same_v<T, VTBool>) {
          return "bool";
        } else if constexpr (std::is_same_v<T, VTFn>) {
          std::string arg = print_type(node.arg);
          if (std::holds_alternative<VTFn>(node.arg->node) ||
              std::holds_alternative<VTHandler>(node.arg->node))
            arg = "(" + arg + ")";
          return arg + " -> " + print_type(node.result);
        } else {
          return "(" + print_type(node.source) + ") => (" + print_type(node.target) + ")";
        }
      },
      t->node);
}

std::string print_type(const CompTypePtr& t) {
  std::string v = print_type(t->value);
  if (std::holds_alternative<VTFn>(t->value->node) ||
      std::holds_alternative<VTHandler>(t->value->node))
    v = "(" + v + ")";
  std::string ops, labels;
  bool first = true;
  for (const auto& [op, sig] : t->sig) {
    if (!first) ops += ", ";
    first = false;
    ops += op;
  }
  first = true;
  for (const auto& eq : t->theory.equations) {
    if (!first) labels += ", ";
    first = false;
    labels += eq.label.empty() ? "?" : eq.label;
  }
  return v + "!{" + ops + "}/{" + labels + "}";
}

std::string print_equation(const Equation& eq) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, type] : eq.value_ctx) {
    if (!first) out << ", ";
    first = false;
    out << name << " : " << print_type(type);
  }
  out << "; ";
  first = true;
  for (const auto& [name, type] : eq.template_ctx) {
    if (!first) out << ", ";
    first = false;
    out << name << " : " << print_type(type) << " -> *";
  }
  out << " |- " << print_template(eq.lhs) << " ~ " << print_template(eq.rhs);
  return out.str();
}

// ---------------------------------------------------------------------------
// type and theory equality

bool type_equal(const ValueTypePtr& a, const ValueTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, VTFn>) {
          return type_equal(na.arg, nb.arg) && type_equal(na.result, nb.result);
        } else if constexpr (std::is_same_v<T, VTHandler>) {
          return type_equal(na.source, nb.source) && type_equal(na.target, nb.target);
        } else {
          return true;
        }
      },
      a->node);
}

bool type_equal(const CompTypePtr& a, const CompTypePtr& b) {
  if (a.get() == b.get()) return true;
  return type_equal(a->value, b->value) && signature_equal(a->sig, b->sig) &&
         theory_equal(a->theory, b->theory);
}

bool signature_equal(const Signature& a, const Signature& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!type_equal(ia->second.param, ib->second.param)) return false;
    if (!type_equal(ia->second.result, ib->second.result)) return false;
  }
  return true;
}

std::string equation_key(const Equation& eq) {
  // Rename both contexts positionally so alpha-variant equations collide.
  std::map<std::string, ValuePtr> renaming;
  std::ostringstream out;
  int i = 0;
  for (const auto& [name, type] : eq.value_ctx) {
    std::string canon = "$v" + std::to_string(i++);
    renaming[name] = mk_free(canon);
    out << canon << ":" << print_type(type) << ",";
  }
  out << ";";
  i = 0;
  std::map<std::string, std::string> tpl_renaming;
  for (const auto& [name, type] : eq.template_ctx) {
    std::string canon = "$z" + std::to_string(i++);
    tpl_renaming[name] = canon;
    out << canon << ":" << print_type(type) << ",";
  }
  auto rename_tpl = [&](const TemplatePtr& t) {
    TemplatePtr renamed = subst(t, renaming);
    // Template variables are a separate namespace; rewrite them structurally.
    std::function<TemplatePtr(const TemplatePtr&)> go = [&](const TemplatePtr& u) -> TemplatePtr {
      return std::visit(
          [&](const auto& node) -> TemplatePtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, TVar>) {
              auto it = tpl_renaming.find(node.var);
              return mk_tvar(it == tpl_renaming.end() ? node.var : it->second, node.arg);
            } else if constexpr (std::is_same_v<T, TIf>) {
              return mk_tif(node.cond, go(node.then_t), go(node.else_t));
            } else {
              return mk_top(node.op, node.arg, node.cont_hint, go(node.body));
            }
          },
          u->node);
    };
    return go(renamed);
  };
  out << "|-" << print_template(rename_tpl(eq.lhs)) << "~" << print_template(rename_tpl(eq.rhs));
  return out.str();
}

bool theory_equal(const Theory& a, const Theory& b) {
  std::set<std::string> ka, kb;
  for (const auto& eq : a.equations) ka.insert(equation_key(eq));
  for (const auto& eq : b.equations) kb.insert(equation_key(eq));
  return ka == kb;
}

Theory make_theory(std::vector<Equation> eqs) {
  std::sort(eqs.begin(), eqs.end(), [](const Equation& a, const Equation& b) {
    if (a.label != b.label) return a.label < b.label;
    return equation_key(a) < equation_key(b);
  });
  std::vector<Equation> dedup;
  std::set<std::string> seen;
  for (auto& eq : eqs) {
    std::string key = eq.label + "\x1f" + equation_key(eq);
    if (seen.insert(key).second) dedup.push_back(std::move(eq));
  }
  return Theory{std::move(dedup)};
}

Signature make_signature(std::vector<std::pair<std::string, OpSig>> ops) {
  Signature sig;
  for (auto& [name, op] : ops) sig.emplace(std::move(name), std::move(op));
  return sig;
}

}  // namespace loceff
