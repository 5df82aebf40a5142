#include "loceff/typecheck.hpp"

namespace loceff {

const ValueTypePtr* ctx_lookup(const Ctx& ctx, const std::string& name) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

std::set<std::string> ctx_names(const Ctx& ctx) {
  std::set<std::string> out;
  for (const auto& [name, type] : ctx) out.insert(name);
  return out;
}

namespace {

struct NullOracle final : RespectsOracle {
  RespectsVerdict respects(const VHandler&, const CompTypePtr&, const CompTypePtr&,
                           std::vector<Diag>&) const override {
    return RespectsVerdict::Unknown;
  }
};

struct FreeOracle final : RespectsOracle {
  RespectsVerdict respects(const VHandler&, const CompTypePtr& source, const CompTypePtr&,
                           std::vector<Diag>&) const override {
    return source->theory.empty() ? RespectsVerdict::Yes : RespectsVerdict::Unknown;
  }
};

void add(std::vector<Diag>& diags, std::string code, std::string message, Span span) {
  diags.push_back(Diag{std::move(code), std::move(message), span});
}

std::string fresh_in(const std::string& hint, const Ctx& ctx,
                     std::initializer_list<CompPtr> comps) {
  std::set<std::string> taken = ctx_names(ctx);
  for (const auto& c : comps) free_names(c, taken);
  return fresh_name(hint, taken);
}

std::string comp_mismatch(const CompTypePtr& actual, const CompTypePtr& expected) {
  if (type_equal(actual->value, expected->value) &&
      signature_equal(actual->sig, expected->sig) &&
      !theory_equal(actual->theory, expected->theory))
    return "TheoryMismatch";
  return "TypeMismatch";
}

void check_value_in(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type,
                    const CheckOpts& opts, std::vector<Diag>& diags);
void check_comp_in(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type,
                   const CheckOpts& opts, std::vector<Diag>& diags);

void check_clauses_in(const Ctx& ctx, const VHandler& h, const CompTypePtr& source,
                      const CompTypePtr& target, const CheckOpts& opts,
                      std::vector<Diag>& diags, Span span) {
  {
    std::string x = fresh_in(h.ret_hint, ctx, {h.ret_body});
    Ctx inner = ctx;
    inner.emplace_back(x, source->value);
    check_comp_in(inner, open_comp(h.ret_body, {mk_free(x)}), target, opts, diags);
  }
  for (const auto& [op, sig] : source->sig) {
    auto it = h.clauses.find(op);
    if (it == h.clauses.end()) {
      add(diags, "MissingClause", "handler lacks a clause for operation " + op, span);
      continue;
    }
    const OpClause& clause = it->second;
    std::set<std::string> taken = ctx_names(ctx);
    free_names(clause.body, taken);
    std::string x = fresh_name(clause.arg_hint, taken);
    taken.insert(x);
    std::string k = fresh_name(clause.cont_hint, taken);
    Ctx inner = ctx;
    inner.emplace_back(x, sig.param);
    inner.emplace_back(k, vt_fn(sig.result, target));
    check_comp_in(inner, open_comp(clause.body, {mk_free(k), mk_free(x)}), target, opts, diags);
  }
  for (const auto& [op, clause] : h.clauses) {
    if (!source->sig.count(op))
      add(diags, "ExtraClause", "handler clause for operation " + op + " outside the handled row",
          span);
  }
  if (!source->theory.empty()) {
    const RespectsOracle* oracle = opts.oracle ? opts.oracle : &null_oracle();
    switch (oracle->respects(h, source, target, diags)) {
      case RespectsVerdict::Yes:
        break;
      case RespectsVerdict::No:
        add(diags, "RespectsFailed",
            "handler clauses do not respect the source theory " + print_type(source), span);
        break;
      case RespectsVerdict::Unknown:
        add(diags, "RespectsUnknown",
            "could not establish that the handler respects the source theory " +
                print_type(source),
            span);
        break;
    }
  }
}

void check_value_in(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type,
                    const CheckOpts& opts, std::vector<Diag>& diags) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          const ValueTypePtr* found = ctx_lookup(ctx, node.name);
          if (!found) {
            add(diags, "UnboundVariable", "unbound variable " + node.name, v->span);
          } else if (!type_equal(*found, type)) {
            add(diags, "TypeMismatch",
                node.name + " has type " + print_type(*found) + ", expected " + print_type(type),
                v->span);
          }
        } else if constexpr (std::is_same_v<T, VBound>) {
          add(diags, "E-INTERNAL", "dangling bound variable in checked term", v->span);
        } else if constexpr (std::is_same_v<T, VUnit>) {
          if (!std::holds_alternative<VTUnit>(type->node))
            add(diags, "TypeMismatch", "() has type unit, expected " + print_type(type), v->span);
        } else if constexpr (std::is_same_v<T, VBool>) {
          if (!std::holds_alternative<VTBool>(type->node))
            add(diags, "TypeMismatch",
                std::string(node.value ? "true" : "false") + " has type bool, expected " +
                    print_type(type),
                v->span);
        } else if constexpr (std::is_same_v<T, VLambda>) {
          auto* fn = std::get_if<VTFn>(&type->node);
          if (!fn) {
            add(diags, "TypeMismatch", "function value, expected " + print_type(type), v->span);
            return;
          }
          std::string x = fresh_in(node.hint, ctx, {node.body});
          Ctx inner = ctx;
          inner.emplace_back(x, fn->arg);
          check_comp_in(inner, open_comp(node.body, {mk_free(x)}), fn->result, opts, diags);
        } else {
          auto* ht = std::get_if<VTHandler>(&type->node);
          if (!ht) {
            add(diags, "TypeMismatch", "handler value, expected " + print_type(type), v->span);
            return;
          }
          if (node.ascription) {
            if (!type_equal(node.ascription->first, ht->source) ||
                !type_equal(node.ascription->second, ht->target)) {
              add(diags, "TypeMismatch",
                  "handler ascribed (" + print_type(node.ascription->first) + ") => (" +
                      print_type(node.ascription->second) + "), expected " + print_type(type),
                  v->span);
              return;
            }
          }
          check_clauses_in(ctx, node, ht->source, ht->target, opts, diags, v->span);
        }
      },
      v->node);
}

void check_comp_in(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type,
                   const CheckOpts& opts, std::vector<Diag>& diags) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          check_value_in(ctx, node.cond, vt_bool(), opts, diags);
          check_comp_in(ctx, node.then_c, type, opts, diags);
          check_comp_in(ctx, node.else_c, type, opts, diags);
        } else if constexpr (std::is_same_v<T, CApply>) {
          if (auto fn_type = infer_value(ctx, node.fn)) {
            auto* fn = std::get_if<VTFn>(&(*fn_type)->node);
            if (!fn) {
              add(diags, "TypeMismatch",
                  "applied value has type " + print_type(*fn_type) + ", not a function type",
                  c->span);
              return;
            }
            check_value_in(ctx, node.arg, fn->arg, opts, diags);
            if (!type_equal(fn->result, type))
              add(diags, comp_mismatch(fn->result, type),
                  "application has type " + print_type(fn->result) + ", expected " +
                      print_type(type),
                  c->span);
          } else if (auto arg_type = infer_value(ctx, node.arg)) {
            check_value_in(ctx, node.fn, vt_fn(*arg_type, type), opts, diags);
          } else {
            add(diags, "E-TYPE-INFER", "cannot infer a type for either side of the application",
                c->span);
          }
        } else if constexpr (std::is_same_v<T, CReturn>) {
          check_value_in(ctx, node.value, type->value, opts, diags);
        } else if constexpr (std::is_same_v<T, COp>) {
          auto it = type->sig.find(node.op);
          if (it == type->sig.end()) {
            add(diags, "UnknownOp", "operation " + node.op + " not in the effect row of " +
                                        print_type(type),
                c->span);
            return;
          }
          check_value_in(ctx, node.arg, it->second.param, opts, diags);
          std::string y = fresh_in(node.cont_hint, ctx, {node.cont});
          Ctx inner = ctx;
          inner.emplace_back(y, it->second.result);
          check_comp_in(inner, open_comp(node.cont, {mk_free(y)}), type, opts, diags);
        } else if constexpr (std::is_same_v<T, CDo>) {
          auto bound = infer_res_type(ctx, node.first, type);
          if (!bound) {
            add(diags, "E-TYPE-INFER", "cannot infer the type bound by do", c->span);
            return;
          }
          check_comp_in(ctx, node.first, ct(*bound, type->sig, type->theory), opts, diags);
          std::string x = fresh_in(node.hint, ctx, {node.rest});
          Ctx inner = ctx;
          inner.emplace_back(x, *bound);
          check_comp_in(inner, open_comp(node.rest, {mk_free(x)}), type, opts, diags);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          auto h_type = infer_value(ctx, node.handler);
          if (!h_type) {
            add(diags, "E-TYPE-INFER",
                "cannot infer the handled type; ascribe the handler with : (C) => (D)", c->span);
            return;
          }
          auto* ht = std::get_if<VTHandler>(&(*h_type)->node);
          if (!ht) {
            add(diags, "TypeMismatch",
                "handled value has type " + print_type(*h_type) + ", not a handler type",
                c->span);
            return;
          }
          if (!type_equal(ht->target, type)) {
            add(diags, comp_mismatch(ht->target, type),
                "handler targets " + print_type(ht->target) + ", expected " + print_type(type),
                c->span);
            return;
          }
          check_value_in(ctx, node.handler, *h_type, opts, diags);
          check_comp_in(ctx, node.body, ht->source, opts, diags);
        } else {
          add(diags, "E-HOLE", "hole outside a schema", c->span);
        }
      },
      c->node);
}

}  // namespace

const RespectsOracle& null_oracle() {
  static const NullOracle o;
  return o;
}

const RespectsOracle& free_oracle() {
  static const FreeOracle o;
  return o;
}

bool wf_vtype(const ValueTypePtr& t, std::vector<Diag>& diags) {
  return std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VTFn>) {
          bool a = wf_vtype(node.arg, diags);
          return wf_ctype(node.result, diags) && a;
        } else if constexpr (std::is_same_v<T, VTHandler>) {
          bool a = wf_ctype(node.source, diags);
          return wf_ctype(node.target, diags) && a;
        } else {
          return true;
        }
      },
      t->node);
}

bool wf_ctype(const CompTypePtr& t, std::vector<Diag>& diags) {
  bool ok = wf_vtype(t->value, diags);
  ok = wf_signature(t->sig, diags) && ok;
  ok = wf_theory(t->theory, t->sig, diags) && ok;
  return ok;
}

bool wf_signature(const Signature& sig, std::vector<Diag>& diags) {
  bool ok = true;
  for (const auto& [op, s] : sig) {
    ok = wf_vtype(s.param, diags) && ok;
    ok = wf_vtype(s.result, diags) && ok;
  }
  return ok;
}

bool wf_ctx(const Ctx& ctx, std::vector<Diag>& diags) {
  bool ok = true;
  std::set<std::string> seen;
  for (const auto& [name, type] : ctx) {
    if (!seen.insert(name).second) {
      add(diags, "Shadowing", "context binds " + name + " twice", {});
      ok = false;
    }
    ok = wf_vtype(type, diags) && ok;
  }
  return ok;
}

bool wf_template(const Ctx& value_ctx, const Ctx& template_ctx, const TemplatePtr& t,
                 const Signature& sig, std::vector<Diag>& diags) {
  return std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          const ValueTypePtr* arg_type = ctx_lookup(template_ctx, node.var);
          if (!arg_type) {
            add(diags, "UnboundTemplateVariable", "unbound template variable " + node.var,
                t->span);
            return false;
          }
          size_t before = diags.size();
          check_value_in(value_ctx, node.arg, *arg_type, CheckOpts{}, diags);
          return diags.size() == before;
        } else if constexpr (std::is_same_v<T, TIf>) {
          size_t before = diags.size();
          check_value_in(value_ctx, node.cond, vt_bool(), CheckOpts{}, diags);
          bool ok = diags.size() == before;
          ok = wf_template(value_ctx, template_ctx, node.then_t, sig, diags) && ok;
          ok = wf_template(value_ctx, template_ctx, node.else_t, sig, diags) && ok;
          return ok;
        } else {
          auto it = sig.find(node.op);
          if (it == sig.end()) {
            add(diags, "UnknownOp", "operation " + node.op + " not in the signature", t->span);
            return false;
          }
          size_t before = diags.size();
          check_value_in(value_ctx, node.arg, it->second.param, CheckOpts{}, diags);
          bool ok = diags.size() == before;
          std::set<std::string> taken = ctx_names(value_ctx);
          std::string y = fresh_name(node.cont_hint, taken);
          Ctx inner = value_ctx;
          inner.emplace_back(y, it->second.result);
          return wf_template(inner, template_ctx, open_template(node.body, {mk_free(y)}), sig,
                             diags) &&
                 ok;
        }
      },
      t->node);
}

bool wf_equation(const Equation& eq, const Signature& sig, std::vector<Diag>& diags) {
  bool ok = wf_ctx(eq.value_ctx, diags);
  std::set<std::string> seen;
  for (const auto& [name, type] : eq.template_ctx) {
    if (!seen.insert(name).second) {
      add(diags, "Shadowing", "equation " + eq.label + " binds template variable " + name +
                                  " twice", {});
      ok = false;
    }
    ok = wf_vtype(type, diags) && ok;
  }
  ok = wf_template(eq.value_ctx, eq.template_ctx, eq.lhs, sig, diags) && ok;
  ok = wf_template(eq.value_ctx, eq.template_ctx, eq.rhs, sig, diags) && ok;
  return ok;
}

bool wf_theory(const Theory& theory, const Signature& sig, std::vector<Diag>& diags) {
  bool ok = true;
  for (const auto& eq : theory.equations) ok = wf_equation(eq, sig, diags) && ok;
  return ok;
}

std::vector<Diag> check_value(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type,
                              const CheckOpts& opts) {
  std::vector<Diag> diags;
  check_value_in(ctx, v, type, opts, diags);
  return diags;
}

std::vector<Diag> check_comp(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type,
                             const CheckOpts& opts) {
  std::vector<Diag> diags;
  check_comp_in(ctx, c, type, opts, diags);
  return diags;
}

std::vector<Diag> check_clauses(const Ctx& ctx, const VHandler& h, const CompTypePtr& source,
                                const CompTypePtr& target, const CheckOpts& opts) {
  std::vector<Diag> diags;
  check_clauses_in(ctx, h, source, target, opts, diags, {});
  return diags;
}

std::optional<ValueTypePtr> infer_value(const Ctx& ctx, const ValuePtr& v) {
  return std::visit(
      [&](const auto& node) -> std::optional<ValueTypePtr> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          const ValueTypePtr* found = ctx_lookup(ctx, node.name);
          if (found) return *found;
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, VUnit>) {
          return vt_unit();
        } else if constexpr (std::is_same_v<T, VBool>) {
          return vt_bool();
        } else if constexpr (std::is_same_v<T, VHandler>) {
          if (node.ascription)
            return vt_handler(node.ascription->first, node.ascription->second);
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      v->node);
}

std::optional<ValueTypePtr> infer_res_type(const Ctx& ctx, const CompPtr& c,
                                           const CompTypePtr& ambient) {
  return std::visit(
      [&](const auto& node) -> std::optional<ValueTypePtr> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          if (auto t = infer_res_type(ctx, node.then_c, ambient)) return t;
          return infer_res_type(ctx, node.else_c, ambient);
        } else if constexpr (std::is_same_v<T, CApply>) {
          if (auto fn_type = infer_value(ctx, node.fn)) {
            auto* fn = std::get_if<VTFn>(&(*fn_type)->node);
            if (!fn) return std::nullopt;
            return fn->result->value;
          }
          auto* lam = std::get_if<VLambda>(&node.fn->node);
          if (!lam) return std::nullopt;
          auto arg_type = infer_value(ctx, node.arg);
          if (!arg_type) return std::nullopt;
          std::string x = fresh_in(lam->hint, ctx, {lam->body});
          Ctx inner = ctx;
          inner.emplace_back(x, *arg_type);
          return infer_res_type(inner, open_comp(lam->body, {mk_free(x)}), ambient);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return infer_value(ctx, node.value);
        } else if constexpr (std::is_same_v<T, COp>) {
          auto it = ambient->sig.find(node.op);
          if (it == ambient->sig.end()) return std::nullopt;
          std::string y = fresh_in(node.cont_hint, ctx, {node.cont});
          Ctx inner = ctx;
          inner.emplace_back(y, it->second.result);
          return infer_res_type(inner, open_comp(node.cont, {mk_free(y)}), ambient);
        } else if constexpr (std::is_same_v<T, CDo>) {
          auto bound = infer_res_type(ctx, node.first, ambient);
          if (!bound) return std::nullopt;
          std::string x = fresh_in(node.hint, ctx, {node.rest});
          Ctx inner = ctx;
          inner.emplace_back(x, *bound);
          return infer_res_type(inner, open_comp(node.rest, {mk_free(x)}), ambient);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          auto h_type = infer_value(ctx, node.handler);
          if (!h_type) return std::nullopt;
          auto* ht = std::get_if<VTHandler>(&(*h_type)->node);
          if (!ht) return std::nullopt;
          return ht->target->value;
        } else {
          return std::nullopt;
        }
      },
      c->node);
}

}  // namespace loceff
