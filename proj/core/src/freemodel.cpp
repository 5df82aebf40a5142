#include "loceff/freemodel.hpp"

namespace loceff {

namespace {

size_t hash_combine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::string fresh_in(const std::string& hint, const Ctx& ctx, const CompPtr& body) {
  std::set<std::string> taken = ctx_names(ctx);
  free_names(body, taken);
  return fresh_name(hint, taken);
}

}  // namespace

size_t sem_hash(const SemValue& v) {
  return std::visit(
      [&](const auto& node) -> size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SemStar>) {
          return 0x57a7u;
        } else if constexpr (std::is_same_v<T, SemBool>) {
          return node.value ? 0xb001u : 0xb000u;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SemFnTable>>) {
          size_t h = 0xf7ab1e;
          for (const auto& d : node->domain) h = hash_combine(h, sem_hash(d));
          for (const auto& r : node->results) h = hash_combine(h, r->hash);
          return h;
        } else {
          // Opaque closures hash by identity; equality on them throws first.
          return std::hash<const void*>{}(node.get());
        }
      },
      v.node);
}

TreePtr tree_return(SemValue v) {
  Tree t;
  t.hash = hash_combine(0x7e7, sem_hash(v));
  t.depth = 0;
  t.size = 1;
  t.node = TreeReturn{std::move(v)};
  return std::make_shared<const Tree>(std::move(t));
}

TreePtr tree_op(std::string op, SemValue arg, std::vector<SemValue> keys,
                std::vector<TreePtr> children) {
  if (keys.size() != children.size())
    throw Error("E-INTERNAL", "operation node with mismatched key and child counts");
  Tree t;
  size_t h = hash_combine(0x09, std::hash<std::string>{}(op));
  h = hash_combine(h, sem_hash(arg));
  int depth = 0;
  size_t size = 1;
  for (size_t i = 0; i < keys.size(); ++i) {
    h = hash_combine(h, sem_hash(keys[i]));
    h = hash_combine(h, children[i]->hash);
    depth = std::max(depth, children[i]->depth);
    size += children[i]->size;
  }
  t.hash = h;
  t.depth = depth + 1;
  t.size = size;
  t.node = TreeOp{std::move(op), std::move(arg), std::move(keys), std::move(children)};
  return std::make_shared<const Tree>(std::move(t));
}

SemValue sem_star() { return SemValue{SemStar{}}; }
SemValue sem_bool(bool b) { return SemValue{SemBool{b}}; }
SemValue sem_table(std::vector<SemValue> domain, std::vector<TreePtr> results) {
  if (domain.size() != results.size())
    throw Error("E-INTERNAL", "function table with mismatched domain and result counts");
  return SemValue{std::make_shared<const SemFnTable>(
      SemFnTable{std::move(domain), std::move(results)})};
}
SemValue sem_fn(std::function<TreePtr(const SemValue&)> call) {
  return SemValue{std::make_shared<const SemFnOpaque>(SemFnOpaque{std::move(call)})};
}
SemValue sem_handler(std::function<TreePtr(const TreePtr&)> call) {
  return SemValue{std::make_shared<const SemHandlerOpaque>(SemHandlerOpaque{std::move(call)})};
}

bool sem_equal(const SemValue& a, const SemValue& b) {
  bool opaque = std::holds_alternative<std::shared_ptr<const SemFnOpaque>>(a.node) ||
                std::holds_alternative<std::shared_ptr<const SemFnOpaque>>(b.node) ||
                std::holds_alternative<std::shared_ptr<const SemHandlerOpaque>>(a.node) ||
                std::holds_alternative<std::shared_ptr<const SemHandlerOpaque>>(b.node);
  if (opaque) throw Error("E-OPAQUE", "cannot compare opaque closures for equality");
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        if constexpr (std::is_same_v<T, SemStar>) {
          return true;
        } else if constexpr (std::is_same_v<T, SemBool>) {
          return na.value == std::get<SemBool>(b.node).value;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SemFnTable>>) {
          const auto& nb = std::get<std::shared_ptr<const SemFnTable>>(b.node);
          if (na->domain.size() != nb->domain.size()) return false;
          for (size_t i = 0; i < na->domain.size(); ++i) {
            if (!sem_equal(na->domain[i], nb->domain[i])) return false;
            if (!tree_equal(na->results[i], nb->results[i])) return false;
          }
          return true;
        } else {
          return false;
        }
      },
      a.node);
}

bool tree_equal(const TreePtr& a, const TreePtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->node.index() != b->node.index()) {
    // Hash inequality is conclusive only for opaque-free trees; force the
    // structural walk to surface E-OPAQUE when closures are present.
    if (a->node.index() != b->node.index()) {
      if (auto* ra = std::get_if<TreeReturn>(&a->node)) (void)sem_hash(ra->value);
      return false;
    }
  }
  if (auto* ra = std::get_if<TreeReturn>(&a->node)) {
    return sem_equal(ra->value, std::get<TreeReturn>(b->node).value);
  }
  const auto& oa = std::get<TreeOp>(a->node);
  const auto& ob = std::get<TreeOp>(b->node);
  if (oa.op != ob.op || oa.keys.size() != ob.keys.size()) return false;
  if (!sem_equal(oa.arg, ob.arg)) return false;
  for (size_t i = 0; i < oa.keys.size(); ++i) {
    if (!sem_equal(oa.keys[i], ob.keys[i])) return false;
    if (!tree_equal(oa.children[i], ob.children[i])) return false;
  }
  return true;
}

std::string print_sem(const SemValue& v) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SemStar>) {
          return "⋆";
        } else if constexpr (std::is_same_v<T, SemBool>) {
          return node.value ? "tt" : "ff";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SemFnTable>>) {
          std::string out = "{";
          for (size_t i = 0; i < node->domain.size(); ++i) {
            if (i) out += ", ";
            out += print_sem(node->domain[i]) + " => " + print_tree(node->results[i]);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SemFnOpaque>>) {
          return "<fn>";
        } else {
          return "<handler>";
        }
      },
      v.node);
}

std::string print_tree(const TreePtr& t) {
  if (auto* ret = std::get_if<TreeReturn>(&t->node))
    return "return " + print_sem(ret->value);
  const auto& op = std::get<TreeOp>(t->node);
  std::string out = op.op + "(" + print_sem(op.arg) + "){ ";
  for (size_t i = 0; i < op.keys.size(); ++i) {
    if (i) out += ", ";
    out += print_sem(op.keys[i]) + " => " + print_tree(op.children[i]);
  }
  return out + " }";
}

std::optional<std::vector<SemValue>> enumerate_ground(const ValueTypePtr& type) {
  if (std::holds_alternative<VTUnit>(type->node))
    return std::vector<SemValue>{sem_star()};
  if (std::holds_alternative<VTBool>(type->node))
    return std::vector<SemValue>{sem_bool(false), sem_bool(true)};
  return std::nullopt;
}

std::optional<std::vector<Env>> enumerate_envs(const Ctx& ctx) {
  std::vector<Env> envs{Env{}};
  for (const auto& [name, type] : ctx) {
    auto carrier = enumerate_ground(type);
    if (!carrier) return std::nullopt;
    std::vector<Env> next;
    next.reserve(envs.size() * carrier->size());
    for (const auto& env : envs) {
      for (const auto& v : *carrier) {
        Env extended = env;
        extended[name] = v;
        next.push_back(std::move(extended));
      }
    }
    envs = std::move(next);
  }
  return envs;
}

Interp free_interp(const Signature& sig) {
  Interp h;
  for (const auto& [op, s] : sig) {
    auto carrier = enumerate_ground(s.result);
    if (!carrier)
      throw Error("E-NONGROUND",
                  "operation " + op + " has a non-enumerable result carrier " +
                      print_type(s.result));
    std::string name = op;
    std::vector<SemValue> keys = *carrier;
    h.ops[op] = [name, keys](const SemValue& arg,
                             const std::function<TreePtr(const SemValue&)>& k) {
      std::vector<TreePtr> children;
      children.reserve(keys.size());
      for (const auto& b : keys) children.push_back(k(b));
      return tree_op(name, arg, keys, children);
    };
  }
  return h;
}

TreePtr lift(const Interp& h, const std::function<TreePtr(const SemValue&)>& f,
             const TreePtr& t) {
  if (auto* ret = std::get_if<TreeReturn>(&t->node)) return f(ret->value);
  const auto& op = std::get<TreeOp>(t->node);
  auto it = h.ops.find(op.op);
  if (it == h.ops.end())
    throw Error("E-INTERNAL", "no interpretation for operation " + op.op);
  const TreeOp* node = &op;
  auto k = [&h, &f, node](const SemValue& b) -> TreePtr {
    for (size_t i = 0; i < node->keys.size(); ++i) {
      if (sem_equal(node->keys[i], b)) return lift(h, f, node->children[i]);
    }
    throw Error("E-INTERNAL", "continuation argument outside the node's carrier");
  };
  return it->second(op.arg, k);
}

namespace {

TreePtr apply_sem_tree(const SemValue& fn, const SemValue& arg) {
  if (auto* table = std::get_if<std::shared_ptr<const SemFnTable>>(&fn.node)) {
    for (size_t i = 0; i < (*table)->domain.size(); ++i) {
      if (sem_equal((*table)->domain[i], arg)) return (*table)->results[i];
    }
    throw Error("E-INTERNAL", "argument outside the function table's domain");
  }
  if (auto* opaque = std::get_if<std::shared_ptr<const SemFnOpaque>>(&fn.node))
    return (*opaque)->call(arg);
  throw Error("E-INTERNAL", "application of a non-function denotation");
}

}  // namespace

SemValue denote_value(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type,
                      const Env& env) {
  return std::visit(
      [&](const auto& node) -> SemValue {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VFree>) {
          auto it = env.find(node.name);
          if (it == env.end())
            throw Error("UnboundVariable", "no denotation for variable " + node.name, v->span);
          return it->second;
        } else if constexpr (std::is_same_v<T, VBound>) {
          throw Error("E-INTERNAL", "dangling bound variable in denoted term", v->span);
        } else if constexpr (std::is_same_v<T, VUnit>) {
          return sem_star();
        } else if constexpr (std::is_same_v<T, VBool>) {
          return sem_bool(node.value);
        } else if constexpr (std::is_same_v<T, VLambda>) {
          auto* fn = std::get_if<VTFn>(&type->node);
          if (!fn)
            throw Error("E-INTERNAL", "function value denoted at " + print_type(type), v->span);
          std::string x = fresh_in(node.hint, ctx, node.body);
          Ctx inner = ctx;
          inner.emplace_back(x, fn->arg);
          CompPtr body = open_comp(node.body, {mk_free(x)});
          CompTypePtr result = fn->result;
          if (auto carrier = enumerate_ground(fn->arg)) {
            std::vector<TreePtr> results;
            results.reserve(carrier->size());
            for (const auto& b : *carrier) {
              Env extended = env;
              extended[x] = b;
              results.push_back(denote_comp(inner, body, result, extended));
            }
            return sem_table(*carrier, std::move(results));
          }
          Env captured = env;
          return sem_fn([inner, body, result, captured, x](const SemValue& d) {
            Env extended = captured;
            extended[x] = d;
            return denote_comp(inner, body, result, extended);
          });
        } else {
          auto* ht = std::get_if<VTHandler>(&type->node);
          if (!ht)
            throw Error("E-INTERNAL", "handler value denoted at " + print_type(type), v->span);
          CompTypePtr source = ht->source;
          CompTypePtr target = ht->target;
          Interp clauses = denote_clauses(ctx, node.clauses, source->sig, target, env);
          std::string x = fresh_in(node.ret_hint, ctx, node.ret_body);
          Ctx inner = ctx;
          inner.emplace_back(x, source->value);
          CompPtr ret_body = open_comp(node.ret_body, {mk_free(x)});
          Env captured = env;
          auto on_return = [inner, ret_body, target, captured, x](const SemValue& d) {
            Env extended = captured;
            extended[x] = d;
            return denote_comp(inner, ret_body, target, extended);
          };
          return sem_handler([clauses, on_return](const TreePtr& t) {
            return lift(clauses, on_return, t);
          });
        }
      },
      v->node);
}

TreePtr denote_comp(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type, const Env& env) {
  return std::visit(
      [&](const auto& node) -> TreePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          SemValue cond = denote_value(ctx, node.cond, vt_bool(), env);
          auto* b = std::get_if<SemBool>(&cond.node);
          if (!b) throw Error("E-INTERNAL", "non-boolean condition denotation", c->span);
          return denote_comp(ctx, b->value ? node.then_c : node.else_c, type, env);
        } else if constexpr (std::is_same_v<T, CApply>) {
          ValueTypePtr fn_type;
          if (auto t = infer_value(ctx, node.fn)) {
            fn_type = *t;
          } else if (auto a = infer_value(ctx, node.arg)) {
            fn_type = vt_fn(*a, type);
          } else {
            throw Error("E-TYPE-INFER", "cannot infer a type for the application", c->span);
          }
          auto* fn = std::get_if<VTFn>(&fn_type->node);
          if (!fn)
            throw Error("E-INTERNAL", "application of a non-function type " + print_type(fn_type),
                        c->span);
          SemValue fnv = denote_value(ctx, node.fn, fn_type, env);
          SemValue argv = denote_value(ctx, node.arg, fn->arg, env);
          return apply_sem_tree(fnv, argv);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return tree_return(denote_value(ctx, node.value, type->value, env));
        } else if constexpr (std::is_same_v<T, COp>) {
          auto it = type->sig.find(node.op);
          if (it == type->sig.end())
            throw Error("UnknownOp", "operation " + node.op + " not in the effect row", c->span);
          SemValue argv = denote_value(ctx, node.arg, it->second.param, env);
          auto carrier = enumerate_ground(it->second.result);
          if (!carrier)
            throw Error("E-NONGROUND", "operation " + node.op +
                                           " has a non-enumerable result carrier", c->span);
          std::string y = fresh_in(node.cont_hint, ctx, node.cont);
          Ctx inner = ctx;
          inner.emplace_back(y, it->second.result);
          CompPtr cont = open_comp(node.cont, {mk_free(y)});
          std::vector<TreePtr> children;
          children.reserve(carrier->size());
          for (const auto& b : *carrier) {
            Env extended = env;
            extended[y] = b;
            children.push_back(denote_comp(inner, cont, type, extended));
          }
          return tree_op(node.op, argv, *carrier, std::move(children));
        } else if constexpr (std::is_same_v<T, CDo>) {
          auto bound = infer_res_type(ctx, node.first, type);
          if (!bound)
            throw Error("E-TYPE-INFER", "cannot infer the type bound by do", c->span);
          TreePtr first = denote_comp(ctx, node.first, ct(*bound, type->sig, type->theory), env);
          std::string x = fresh_in(node.hint, ctx, node.rest);
          Ctx inner = ctx;
          inner.emplace_back(x, *bound);
          CompPtr rest = open_comp(node.rest, {mk_free(x)});
          Interp h = free_interp(type->sig);
          return lift(h,
                      [&](const SemValue& d) {
                        Env extended = env;
                        extended[x] = d;
                        return denote_comp(inner, rest, type, extended);
                      },
                      first);
        } else if constexpr (std::is_same_v<T, CHandle>) {
          auto h_type = infer_value(ctx, node.handler);
          if (!h_type)
            throw Error("E-TYPE-INFER", "cannot infer the handled type", c->span);
          auto* ht = std::get_if<VTHandler>(&(*h_type)->node);
          if (!ht)
            throw Error("E-INTERNAL", "handling with a non-handler type", c->span);
          SemValue hv = denote_value(ctx, node.handler, *h_type, env);
          auto* sem = std::get_if<std::shared_ptr<const SemHandlerOpaque>>(&hv.node);
          if (!sem) throw Error("E-INTERNAL", "handler denoted to a non-handler", c->span);
          TreePtr body = denote_comp(ctx, node.body, ht->source, env);
          return (*sem)->call(body);
        } else {
          throw Error("E-INTERNAL", "hole has no denotation", c->span);
        }
      },
      c->node);
}

Interp denote_clauses(const Ctx& ctx, const OpClauses& clauses, const Signature& sigma,
                      const CompTypePtr& target, const Env& env) {
  Interp h;
  for (const auto& [op, s] : sigma) {
    auto it = clauses.find(op);
    if (it == clauses.end())
      throw Error("MissingClause", "handler lacks a clause for operation " + op);
    auto carrier = enumerate_ground(s.result);
    if (!carrier)
      throw Error("E-NONGROUND",
                  "operation " + op + " has a non-enumerable result carrier");
    const OpClause& clause = it->second;
    std::set<std::string> taken = ctx_names(ctx);
    free_names(clause.body, taken);
    std::string x = fresh_name(clause.arg_hint, taken);
    taken.insert(x);
    std::string k = fresh_name(clause.cont_hint, taken);
    Ctx inner = ctx;
    inner.emplace_back(x, s.param);
    inner.emplace_back(k, vt_fn(s.result, target));
    CompPtr body = open_comp(clause.body, {mk_free(k), mk_free(x)});
    std::vector<SemValue> keys = *carrier;
    Env captured = env;
    CompTypePtr target_copy = target;
    h.ops[op] = [inner, body, keys, captured, x, k, target_copy](
                    const SemValue& arg, const std::function<TreePtr(const SemValue&)>& kont) {
      std::vector<TreePtr> results;
      results.reserve(keys.size());
      for (const auto& b : keys) results.push_back(kont(b));
      Env extended = captured;
      extended[x] = arg;
      extended[k] = sem_table(keys, std::move(results));
      return denote_comp(inner, body, target_copy, extended);
    };
  }
  return h;
}

TreePtr hsem_template(const TemplatePtr& t, const Interp& h, const Signature& sigma,
                      const Ctx& value_ctx, const Env& eta, const Zeta& zeta) {
  return std::visit(
      [&](const auto& node) -> TreePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          auto it = zeta.find(node.var);
          if (it == zeta.end())
            throw Error("UnboundTemplateVariable",
                        "no assignment for template variable " + node.var, t->span);
          auto arg_type = infer_value(value_ctx, node.arg);
          if (!arg_type)
            throw Error("E-TYPE-INFER", "cannot infer the template argument type", t->span);
          return it->second(denote_value(value_ctx, node.arg, *arg_type, eta));
        } else if constexpr (std::is_same_v<T, TIf>) {
          SemValue cond = denote_value(value_ctx, node.cond, vt_bool(), eta);
          auto* b = std::get_if<SemBool>(&cond.node);
          if (!b) throw Error("E-INTERNAL", "non-boolean template condition", t->span);
          return hsem_template(b->value ? node.then_t : node.else_t, h, sigma, value_ctx, eta,
                               zeta);
        } else {
          auto it = sigma.find(node.op);
          if (it == sigma.end())
            throw Error("UnknownOp", "operation " + node.op + " not in the signature", t->span);
          auto hit = h.ops.find(node.op);
          if (hit == h.ops.end())
            throw Error("E-INTERNAL", "no interpretation for operation " + node.op, t->span);
          SemValue argv = denote_value(value_ctx, node.arg, it->second.param, eta);
          std::set<std::string> taken = ctx_names(value_ctx);
          std::string y = fresh_name(node.cont_hint, taken);
          Ctx inner = value_ctx;
          inner.emplace_back(y, it->second.result);
          TemplatePtr body = open_template(node.body, {mk_free(y)});
          auto k = [&](const SemValue& b) {
            Env extended = eta;
            extended[y] = b;
            return hsem_template(body, h, sigma, inner, extended, zeta);
          };
          return hit->second(argv, k);
        }
      },
      t->node);
}

}  // namespace loceff
