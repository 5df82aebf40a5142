#include "loceff/generator.hpp"

#include <random>

namespace loceff {

Signature default_pool() {
  return make_signature({{"choose", OpSig{vt_unit(), vt_bool()}},
                         {"tick", OpSig{vt_unit(), vt_unit()}}});
}

namespace {

struct Gen {
  std::mt19937_64 rng;
  Signature pool;
  size_t counter = 0;

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }
  bool coin() { return pick(2) == 0; }
  std::string fresh(const char* hint) { return hint + std::to_string(counter++); }

  ValueTypePtr ground_type() { return coin() ? vt_bool() : vt_unit(); }

  ValuePtr gen_ground(const Ctx& env, const ValueTypePtr& t) {
    std::vector<std::string> names;
    for (const auto& [name, type] : env) {
      if (type_equal(type, t)) names.push_back(name);
    }
    if (!names.empty() && coin()) return mk_free(names[pick(names.size())]);
    if (std::holds_alternative<VTBool>(t->node)) return mk_bool(coin());
    return mk_unit();
  }

  // When inferable is set the node must expose its result type to the
  // bidirectional checker, so lambda literals cannot head an application.
  CompPtr gen_comp(Ctx& env, const ValueTypePtr& a, const Signature& sig, size_t budget,
                   int depth, bool inferable) {
    CompTypePtr result = ct(a, sig, {});
    std::vector<std::pair<std::string, ValueTypePtr>> fns;
    for (const auto& [name, type] : env) {
      if (auto* fn = std::get_if<VTFn>(&type->node)) {
        if (type_equal(fn->result, result)) fns.emplace_back(name, fn->arg);
      }
    }
    enum Former { Return, If, Do, Op, Apply, Handle };
    std::vector<Former> menu{Return};
    if (budget >= 3 && depth < 12) {
      menu.insert(menu.end(), {If, If, Do, Do, Do});
      if (!inferable || !fns.empty()) menu.insert(menu.end(), {Apply, Apply});
      if (!sig.empty()) menu.insert(menu.end(), {Op, Op, Op});
      if (budget >= 8 && depth < 6) menu.insert(menu.end(), {Handle, Handle});
    }
    switch (menu[pick(menu.size())]) {
      case Return:
        return mk_return(gen_ground(env, a));
      case If: {
        ValuePtr cond = gen_ground(env, vt_bool());
        size_t half = (budget - 2) / 2;
        CompPtr then_c = gen_comp(env, a, sig, half, depth + 1, inferable);
        CompPtr else_c = gen_comp(env, a, sig, half, depth + 1, false);
        return mk_if(cond, then_c, else_c);
      }
      case Do: {
        ValueTypePtr b = ground_type();
        size_t half = (budget - 2) / 2;
        CompPtr first = gen_comp(env, b, sig, half, depth + 1, true);
        std::string x = fresh("x");
        env.emplace_back(x, b);
        CompPtr rest = gen_comp(env, a, sig, half, depth + 1, inferable);
        env.pop_back();
        return mk_do(x, first, close_comp(rest, x));
      }
      case Op: {
        size_t i = pick(sig.size());
        auto it = sig.begin();
        std::advance(it, i);
        ValuePtr arg = gen_ground(env, it->second.param);
        std::string y = fresh("y");
        env.emplace_back(y, it->second.result);
        CompPtr cont = gen_comp(env, a, sig, budget - 2, depth + 1, inferable);
        env.pop_back();
        return mk_op(it->first, arg, y, close_comp(cont, y));
      }
      case Apply: {
        if (!fns.empty() && (inferable || coin())) {
          const auto& [name, arg_type] = fns[pick(fns.size())];
          return mk_apply(mk_free(name), gen_ground(env, arg_type));
        }
        ValueTypePtr arg_type = ground_type();
        std::string x = fresh("x");
        env.emplace_back(x, arg_type);
        CompPtr body = gen_comp(env, a, sig, budget - 3, depth + 1, false);
        env.pop_back();
        return mk_apply(mk_lambda(x, close_comp(body, x)), gen_ground(env, arg_type));
      }
      case Handle:
      default: {
        Signature inner;
        for (const auto& [op, s] : pool) {
          if (coin()) inner[op] = s;
        }
        if (inner.empty()) {
          auto it = pool.begin();
          std::advance(it, pick(pool.size()));
          inner[it->first] = it->second;
        }
        ValueTypePtr b = ground_type();
        CompTypePtr source = ct(b, inner, {});
        CompTypePtr target = ct(a, sig, {});
        size_t share = (budget - 2) / (2 + inner.size());
        std::string xr = fresh("r");
        env.emplace_back(xr, b);
        CompPtr ret_body = gen_comp(env, a, sig, share, depth + 1, false);
        env.pop_back();
        VHandler h{xr, close_comp(ret_body, xr), {}, std::make_pair(source, target), {}};
        for (const auto& [op, s] : inner) {
          std::string x = fresh("x");
          std::string k = fresh("k");
          env.emplace_back(x, s.param);
          env.emplace_back(k, vt_fn(s.result, target));
          CompPtr body = gen_comp(env, a, sig, share, depth + 1, false);
          env.pop_back();
          env.pop_back();
          h.clauses[op] = OpClause{x, k, close_comp(body, {k, x})};
        }
        CompPtr handled = gen_comp(env, b, inner, share, depth + 1, false);
        return mk_handle(mk_handler(std::move(h)), handled);
      }
    }
  }
};

}  // namespace

std::vector<GenTerm> generate_corpus(const GenConfig& cfg) {
  Gen gen;
  gen.rng.seed(cfg.seed);
  gen.pool = cfg.pool.empty() ? default_pool() : cfg.pool;
  Signature ambient = cfg.closed_top ? Signature{} : gen.pool;
  std::vector<GenTerm> out;
  out.reserve(cfg.count);
  for (size_t i = 0; i < cfg.count; ++i) {
    Ctx env;
    ValueTypePtr a = gen.ground_type();
    CompPtr c = gen.gen_comp(env, a, ambient, cfg.size_budget, 0, false);
    out.push_back(GenTerm{c, ct(a, ambient, {})});
  }
  return out;
}

}  // namespace loceff
