#include "loceff/equivalence.hpp"

#include <deque>

namespace loceff {

namespace {

std::string sem_key(const SemValue& v) { return print_sem(v); }

// One syntactically reached (variable, argument) binding, with the deepest
// operation nesting at which it occurs.
struct ReachedBinding {
  SemValue arg;
  int max_depth = 0;
};
using ReachedMap = std::map<std::pair<std::string, std::string>, ReachedBinding>;

SemValue denote_template_arg(const Ctx& value_ctx, const ValuePtr& arg, const Env& eta) {
  auto type = infer_value(value_ctx, arg);
  if (!type) throw Error("E-TYPE-INFER", "cannot infer a template argument type", arg->span);
  return denote_value(value_ctx, arg, *type, eta);
}

void walk_reached(const TemplatePtr& t, const Signature& sigma, const Ctx& value_ctx,
                  const Env& eta, int depth, ReachedMap& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          SemValue argv = denote_template_arg(value_ctx, node.arg, eta);
          auto key = std::make_pair(node.var, sem_key(argv));
          auto it = out.find(key);
          if (it == out.end())
            out.emplace(key, ReachedBinding{argv, depth});
          else
            it->second.max_depth = std::max(it->second.max_depth, depth);
        } else if constexpr (std::is_same_v<T, TIf>) {
          SemValue cond = denote_value(value_ctx, node.cond, vt_bool(), eta);
          bool b = std::get<SemBool>(cond.node).value;
          walk_reached(b ? node.then_t : node.else_t, sigma, value_ctx, eta, depth, out);
        } else {
          auto it = sigma.find(node.op);
          if (it == sigma.end())
            throw Error("UnknownOp", "operation " + node.op + " not in the signature", t->span);
          auto carrier = enumerate_ground(it->second.result);
          if (!carrier)
            throw Error("E-NONGROUND",
                        "operation " + node.op + " has a non-enumerable result carrier");
          std::set<std::string> taken = ctx_names(value_ctx);
          for (const auto& [k, v] : eta) taken.insert(k);
          std::string y = fresh_name(node.cont_hint, taken);
          Ctx inner = value_ctx;
          inner.emplace_back(y, it->second.result);
          TemplatePtr body = open_template(node.body, {mk_free(y)});
          for (const auto& b : *carrier) {
            Env extended = eta;
            extended[y] = b;
            walk_reached(body, sigma, inner, extended, depth + 1, out);
          }
        }
      },
      t->node);
}

// Partial template-variable tables discovered while matching or required
// while instantiating: (variable, argument key) -> result tree.
using BindingTable = std::map<std::pair<std::string, std::string>, std::pair<SemValue, TreePtr>>;

bool walk_match(const TemplatePtr& t, const TreePtr& tree, const Signature& sigma,
                const Ctx& value_ctx, const Env& eta, BindingTable& out) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          SemValue argv = denote_template_arg(value_ctx, node.arg, eta);
          auto key = std::make_pair(node.var, sem_key(argv));
          auto it = out.find(key);
          if (it == out.end()) {
            out.emplace(key, std::make_pair(argv, tree));
            return true;
          }
          return tree_equal(it->second.second, tree);
        } else if constexpr (std::is_same_v<T, TIf>) {
          SemValue cond = denote_value(value_ctx, node.cond, vt_bool(), eta);
          bool b = std::get<SemBool>(cond.node).value;
          return walk_match(b ? node.then_t : node.else_t, tree, sigma, value_ctx, eta, out);
        } else {
          auto* op = std::get_if<TreeOp>(&tree->node);
          if (!op || op->op != node.op) return false;
          SemValue argv = denote_value(value_ctx, node.arg,
                                       sigma.at(node.op).param, eta);
          if (!sem_equal(argv, op->arg)) return false;
          std::set<std::string> taken = ctx_names(value_ctx);
          for (const auto& [k, v] : eta) taken.insert(k);
          std::string y = fresh_name(node.cont_hint, taken);
          Ctx inner = value_ctx;
          inner.emplace_back(y, sigma.at(node.op).result);
          TemplatePtr body = open_template(node.body, {mk_free(y)});
          for (size_t i = 0; i < op->keys.size(); ++i) {
            Env extended = eta;
            extended[y] = op->keys[i];
            if (!walk_match(body, op->children[i], sigma, inner, extended, out)) return false;
          }
          return true;
        }
      },
      t->node);
}

TreePtr walk_instantiate(const TemplatePtr& t, const Signature& sigma, const Ctx& value_ctx,
                         const Env& eta, const BindingTable& table) {
  return std::visit(
      [&](const auto& node) -> TreePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TVar>) {
          SemValue argv = denote_template_arg(value_ctx, node.arg, eta);
          auto it = table.find(std::make_pair(node.var, sem_key(argv)));
          if (it == table.end())
            throw Error("E-INTERNAL",
                        "unbalanced rewrite reached an unbound template variable " + node.var);
          return it->second.second;
        } else if constexpr (std::is_same_v<T, TIf>) {
          SemValue cond = denote_value(value_ctx, node.cond, vt_bool(), eta);
          bool b = std::get<SemBool>(cond.node).value;
          return walk_instantiate(b ? node.then_t : node.else_t, sigma, value_ctx, eta, table);
        } else {
          const OpSig& s = sigma.at(node.op);
          auto carrier = enumerate_ground(s.result);
          if (!carrier)
            throw Error("E-NONGROUND",
                        "operation " + node.op + " has a non-enumerable result carrier");
          SemValue argv = denote_value(value_ctx, node.arg, s.param, eta);
          std::set<std::string> taken = ctx_names(value_ctx);
          for (const auto& [k, v] : eta) taken.insert(k);
          std::string y = fresh_name(node.cont_hint, taken);
          Ctx inner = value_ctx;
          inner.emplace_back(y, s.result);
          TemplatePtr body = open_template(node.body, {mk_free(y)});
          std::vector<TreePtr> children;
          children.reserve(carrier->size());
          for (const auto& b : *carrier) {
            Env extended = eta;
            extended[y] = b;
            children.push_back(walk_instantiate(body, sigma, inner, extended, table));
          }
          return tree_op(node.op, argv, *carrier, std::move(children));
        }
      },
      t->node);
}

void collect_positions(const TreePtr& t, std::vector<size_t>& cur,
                       std::vector<std::vector<size_t>>& out) {
  out.push_back(cur);
  if (auto* op = std::get_if<TreeOp>(&t->node)) {
    for (size_t i = 0; i < op->children.size(); ++i) {
      cur.push_back(i);
      collect_positions(op->children[i], cur, out);
      cur.pop_back();
    }
  }
}

TreePtr subtree_at(const TreePtr& t, const std::vector<size_t>& pos, size_t i = 0) {
  if (i == pos.size()) return t;
  auto* op = std::get_if<TreeOp>(&t->node);
  if (!op || pos[i] >= op->children.size())
    throw Error("E-INTERNAL", "rewrite position escapes the tree");
  return subtree_at(op->children[pos[i]], pos, i + 1);
}

TreePtr rebuild_at(const TreePtr& t, const std::vector<size_t>& pos, size_t i,
                   const TreePtr& replacement) {
  if (i == pos.size()) return replacement;
  const auto& op = std::get<TreeOp>(t->node);
  std::vector<TreePtr> children = op.children;
  children[pos[i]] = rebuild_at(children[pos[i]], pos, i + 1, replacement);
  return tree_op(op.op, op.arg, op.keys, std::move(children));
}

const Equation* find_equation(const Theory& theory, const std::string& label) {
  const Equation* eq = theory.find(label);
  if (!eq) throw Error("UnknownLabel", "no equation labeled " + label + " in the theory");
  return eq;
}

}  // namespace

CompiledRules compile_rules(const Theory& theory, const Signature& sigma) {
  CompiledRules out;
  for (const auto& eq : theory.equations) {
    auto envs = enumerate_envs(eq.value_ctx);
    if (!envs) {
      out.warnings.push_back(
          Diag{"UnusableRule", "equation " + eq.label +
                                   " ranges over a non-enumerable context; not usable for "
                                   "rewriting", Span{}});
      continue;
    }
    for (bool forward : {true, false}) {
      const TemplatePtr& from = forward ? eq.lhs : eq.rhs;
      const TemplatePtr& to = forward ? eq.rhs : eq.lhs;
      bool balanced = true;
      for (const auto& eta : *envs) {
        ReachedMap from_reached, to_reached;
        walk_reached(from, sigma, eq.value_ctx, eta, 0, from_reached);
        walk_reached(to, sigma, eq.value_ctx, eta, 0, to_reached);
        for (const auto& [key, binding] : to_reached) {
          if (!from_reached.count(key)) {
            balanced = false;
            break;
          }
        }
        if (!balanced) break;
      }
      if (balanced) {
        out.rules.push_back(RewriteRule{eq.label, forward, eq});
      } else {
        out.warnings.push_back(Diag{
            "UnbalancedRule",
            "equation " + eq.label + (forward ? "" : " reversed") +
                " reaches variable bindings on the right that the left never produces; "
                "direction disabled", Span{}});
      }
    }
  }
  return out;
}

std::optional<TemplateMatch> match_template(const TemplatePtr& t, const TreePtr& tree,
                                            const Signature& sigma, const Ctx& value_ctx,
                                            const Env& eta) {
  BindingTable table;
  if (!walk_match(t, tree, sigma, value_ctx, eta, table)) return std::nullopt;
  TemplateMatch m;
  for (const auto& [key, entry] : table) m.vars[key.first].push_back(entry);
  return m;
}

std::vector<RewriteStep> rewrite_frontier(const TreePtr& t, const CompiledRules& rules,
                                          const Signature& sigma, const ValueTypePtr& leaf_type,
                                          const EquivBounds& bounds) {
  (void)leaf_type;
  std::vector<RewriteStep> steps;
  std::vector<std::vector<size_t>> positions;
  std::vector<size_t> cur;
  collect_positions(t, cur, positions);
  for (const auto& rule : rules.rules) {
    auto envs = enumerate_envs(rule.eq.value_ctx);
    if (!envs) continue;
    const TemplatePtr& from = rule.forward ? rule.eq.lhs : rule.eq.rhs;
    const TemplatePtr& to = rule.forward ? rule.eq.rhs : rule.eq.lhs;
    for (const auto& pos : positions) {
      TreePtr sub = subtree_at(t, pos);
      for (const auto& eta : *envs) {
        BindingTable table;
        if (!walk_match(from, sub, sigma, rule.eq.value_ctx, eta, table)) continue;
        TreePtr replaced = walk_instantiate(to, sigma, rule.eq.value_ctx, eta, table);
        TreePtr whole = rebuild_at(t, pos, 0, replaced);
        if (whole->size > bounds.size_bound) continue;
        steps.push_back(RewriteStep{rule.label, rule.forward, pos, eta, whole});
      }
    }
  }
  return steps;
}

bool replay_path(const TreePtr& a, const TreePtr& b, const std::vector<RewriteStep>& path,
                 const std::vector<RewriteStep>& path_from_b, const Theory& theory,
                 const Signature& sigma, const ValueTypePtr& leaf_type) {
  (void)leaf_type;
  auto replay_side = [&](TreePtr cur, const std::vector<RewriteStep>& steps) -> TreePtr {
    for (const auto& step : steps) {
      const Equation* eq = find_equation(theory, step.label);
      const TemplatePtr& from = step.forward ? eq->lhs : eq->rhs;
      const TemplatePtr& to = step.forward ? eq->rhs : eq->lhs;
      TreePtr sub = subtree_at(cur, step.position);
      BindingTable table;
      if (!walk_match(from, sub, sigma, eq->value_ctx, step.eta, table))
        throw Error("E-REPLAY", "recorded rewrite no longer matches");
      TreePtr whole = rebuild_at(cur, step.position, 0,
                                 walk_instantiate(to, sigma, eq->value_ctx, step.eta, table));
      if (!tree_equal(whole, step.result))
        throw Error("E-REPLAY", "recorded rewrite result differs on replay");
      cur = whole;
    }
    return cur;
  };
  try {
    TreePtr ma = replay_side(a, path);
    TreePtr mb = replay_side(b, path_from_b);
    return tree_equal(ma, mb);
  } catch (const Error&) {
    return false;
  }
}

size_t universe_estimate(const Signature& sigma, const ValueTypePtr& leaf_type, int depth,
                         size_t cap) {
  auto leaves = enumerate_ground(leaf_type);
  if (!leaves) throw Error("E-NONGROUND", "leaf type is not enumerable");
  size_t limit = cap + 1;
  auto sat_mul = [&](size_t a, size_t b) -> size_t {
    if (a == 0 || b == 0) return 0;
    if (a > limit / b) return limit;
    return std::min(limit, a * b);
  };
  size_t n = leaves->size();
  for (int k = 0; k < depth; ++k) {
    size_t m = leaves->size();
    for (const auto& [op, s] : sigma) {
      auto params = enumerate_ground(s.param);
      auto results = enumerate_ground(s.result);
      if (!params || !results)
        throw Error("E-NONGROUND", "operation " + op + " has non-enumerable types");
      size_t contrib = params->size();
      for (size_t i = 0; i < results->size(); ++i) contrib = sat_mul(contrib, n);
      m = std::min(limit, m + contrib);
    }
    n = m;
    if (n >= limit) return limit;
  }
  return n;
}

struct TreeOracle::Impl {
  Signature sigma;
  ValueTypePtr leaf;
  int depth = 0;
  std::vector<TreePtr> trees;
  std::map<size_t, std::vector<size_t>> index;  // hash -> ids
  mutable std::vector<size_t> parent;

  std::optional<size_t> lookup(const TreePtr& t) const {
    auto it = index.find(t->hash);
    if (it == index.end()) return std::nullopt;
    for (size_t id : it->second) {
      if (tree_equal(trees[id], t)) return id;
    }
    return std::nullopt;
  }

  size_t intern(const TreePtr& t) {
    if (auto found = lookup(t)) return *found;
    size_t id = trees.size();
    trees.push_back(t);
    index[t->hash].push_back(id);
    return id;
  }

  size_t find(size_t id) const {
    while (parent[id] != id) {
      parent[id] = parent[parent[id]];
      id = parent[id];
    }
    return id;
  }

  bool unite(size_t a, size_t b) {
    size_t ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (ra > rb) std::swap(ra, rb);
    parent[rb] = ra;
    return true;
  }
};

TreeOracle::TreeOracle(const Theory& theory, const Signature& sigma,
                       const ValueTypePtr& leaf_type, int depth, size_t universe_cap)
    : impl_(std::make_shared<Impl>()), depth_(depth) {
  size_t estimate = universe_estimate(sigma, leaf_type, depth, universe_cap);
  if (estimate > universe_cap)
    throw Error("UniverseTooLarge", "universe at depth " + std::to_string(depth) +
                                        " exceeds the cap of " + std::to_string(universe_cap) +
                                        " trees");
  Impl& im = *impl_;
  im.sigma = sigma;
  im.leaf = leaf_type;
  im.depth = depth;

  auto leaves = enumerate_ground(leaf_type);
  if (!leaves) throw Error("E-NONGROUND", "leaf type is not enumerable");
  for (const auto& v : *leaves) im.intern(tree_return(v));
  for (int k = 1; k <= depth; ++k) {
    size_t count = im.trees.size();
    for (const auto& [op, s] : sigma) {
      auto params = enumerate_ground(s.param);
      auto results = enumerate_ground(s.result);
      if (!params || !results)
        throw Error("E-NONGROUND", "operation " + op + " has non-enumerable types");
      size_t arity = results->size();
      for (const auto& arg : *params) {
        std::vector<size_t> pick(arity, 0);
        bool done = false;
        while (!done) {
          std::vector<TreePtr> children;
          children.reserve(arity);
          for (size_t i = 0; i < arity; ++i) children.push_back(im.trees[pick[i]]);
          im.intern(tree_op(op, arg, *results, std::move(children)));
          done = true;
          size_t i = arity;
          while (i > 0) {
            --i;
            if (++pick[i] < count) {
              done = false;
              break;
            }
            pick[i] = 0;
          }
        }
      }
    }
  }
  im.parent.resize(im.trees.size());
  for (size_t i = 0; i < im.parent.size(); ++i) im.parent[i] = i;

  Interp free_h = free_interp(sigma);
  bool merged_any = true;
  // Equation instances first, then congruence; repeat both to a joint
  // fixpoint so later merges re-enable earlier buckets.
  while (merged_any) {
    merged_any = false;
    for (const auto& eq : theory.equations) {
      auto envs = enumerate_envs(eq.value_ctx);
      if (!envs)
        throw Error("E-NONGROUND",
                    "equation " + eq.label + " ranges over a non-enumerable context");
      for (const auto& eta : *envs) {
        ReachedMap reached;
        walk_reached(eq.lhs, sigma, eq.value_ctx, eta, 0, reached);
        walk_reached(eq.rhs, sigma, eq.value_ctx, eta, 0, reached);
        std::vector<std::pair<std::string, ReachedBinding>> bindings;
        for (const auto& [key, b] : reached) bindings.emplace_back(key.first, b);
        std::vector<std::vector<size_t>> ranges(bindings.size());
        bool feasible = true;
        for (size_t i = 0; i < bindings.size(); ++i) {
          int budget = depth - bindings[i].second.max_depth;
          if (budget < 0) {
            feasible = false;
            break;
          }
          for (size_t id = 0; id < im.trees.size(); ++id) {
            if (im.trees[id]->depth <= budget) ranges[i].push_back(id);
          }
          if (ranges[i].empty()) feasible = false;
        }
        if (!feasible) continue;
        std::vector<size_t> pick(bindings.size(), 0);
        for (;;) {
          Zeta zeta;
          for (size_t i = 0; i < bindings.size(); ++i) {
            const std::string& var = bindings[i].first;
            SemValue argv = bindings[i].second.arg;
            TreePtr assigned = im.trees[ranges[i][pick[i]]];
            auto prev = zeta.find(var);
            if (prev == zeta.end()) {
              std::vector<std::pair<SemValue, TreePtr>> table{{argv, assigned}};
              zeta[var] = [table](const SemValue& q) -> TreePtr {
                for (const auto& [a, t] : table) {
                  if (sem_equal(a, q)) return t;
                }
                throw Error("E-INTERNAL", "template variable probed outside reached bindings");
              };
            } else {
              auto old = prev->second;
              SemValue argv_copy = argv;
              TreePtr assigned_copy = assigned;
              zeta[var] = [old, argv_copy, assigned_copy](const SemValue& q) -> TreePtr {
                if (sem_equal(argv_copy, q)) return assigned_copy;
                return old(q);
              };
            }
          }
          TreePtr lhs = hsem_template(eq.lhs, free_h, sigma, eq.value_ctx, eta, zeta);
          TreePtr rhs = hsem_template(eq.rhs, free_h, sigma, eq.value_ctx, eta, zeta);
          if (lhs->depth <= depth && rhs->depth <= depth) {
            auto la = im.lookup(lhs);
            auto lb = im.lookup(rhs);
            if (!la || !lb)
              throw Error("E-INTERNAL", "equation instance escaped the interned universe");
            if (im.unite(*la, *lb)) merged_any = true;
          }
          if (bindings.empty()) break;
          size_t i = bindings.size();
          bool done = true;
          while (i > 0) {
            --i;
            if (++pick[i] < ranges[i].size()) {
              done = false;
              break;
            }
            pick[i] = 0;
          }
          if (done) break;
        }
      }
    }
    // Congruence closure over operation nodes.
    bool cong_changed = true;
    while (cong_changed) {
      cong_changed = false;
      std::map<std::string, size_t> buckets;
      for (size_t id = 0; id < im.trees.size(); ++id) {
        auto* op = std::get_if<TreeOp>(&im.trees[id]->node);
        if (!op) continue;
        std::string key = op->op + "\x1f" + sem_key(op->arg);
        for (const auto& child : op->children) {
          auto cid = im.lookup(child);
          if (!cid) throw Error("E-INTERNAL", "universe child not interned");
          key += "," + std::to_string(im.find(*cid));
        }
        auto [it, inserted] = buckets.emplace(key, id);
        if (!inserted && im.unite(it->second, id)) {
          cong_changed = true;
          merged_any = true;
        }
      }
    }
  }
}

TreeOracle::Relation TreeOracle::query(const TreePtr& a, const TreePtr& b) const {
  const Impl& im = *impl_;
  if (a->depth > im.depth || b->depth > im.depth) return Relation::OutsideUniverse;
  auto ia = im.lookup(a);
  auto ib = im.lookup(b);
  if (!ia || !ib) return Relation::OutsideUniverse;
  return im.find(*ia) == im.find(*ib) ? Relation::Related : Relation::NotRelated;
}

size_t TreeOracle::universe_size() const { return impl_->trees.size(); }

std::vector<TreePtr> TreeOracle::universe() const { return impl_->trees; }

size_t TreeOracle::class_count() const {
  const Impl& im = *impl_;
  std::set<size_t> roots;
  for (size_t i = 0; i < im.trees.size(); ++i) roots.insert(im.find(i));
  return roots.size();
}

std::vector<std::vector<TreePtr>> TreeOracle::classes() const {
  const Impl& im = *impl_;
  std::map<size_t, std::vector<TreePtr>> by_root;
  for (size_t i = 0; i < im.trees.size(); ++i) by_root[im.find(i)].push_back(im.trees[i]);
  std::vector<std::vector<TreePtr>> out;
  out.reserve(by_root.size());
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

EquivResult tree_equiv(const TreePtr& a, const TreePtr& b, const Theory& theory,
                       const Signature& sigma, const ValueTypePtr& leaf_type,
                       const EquivBounds& bounds) {
  EquivResult r;
  try {
    if (tree_equal(a, b)) {
      r.outcome = EquivOutcome::Related;
      return r;
    }
  } catch (const Error& e) {
    r.notes.push_back(e.diag);
    return r;
  }

  CompiledRules rules = compile_rules(theory, sigma);
  for (const auto& w : rules.warnings) r.notes.push_back(w);

  if (!rules.rules.empty()) {
    struct Node {
      TreePtr tree;
      int parent = -1;
      RewriteStep step;
    };
    std::vector<Node> nodes[2];
    std::map<size_t, std::vector<int>> seen[2];
    std::deque<std::pair<int, int>> queue;

    auto lookup_side = [&](int side, const TreePtr& t) -> std::optional<int> {
      auto it = seen[side].find(t->hash);
      if (it == seen[side].end()) return std::nullopt;
      for (int id : it->second) {
        if (tree_equal(nodes[side][id].tree, t)) return id;
      }
      return std::nullopt;
    };

    auto collect_path = [&](int side, int idx) {
      std::vector<RewriteStep> path;
      while (idx >= 0 && nodes[side][idx].parent >= 0) {
        path.push_back(nodes[side][idx].step);
        idx = nodes[side][idx].parent;
      }
      std::reverse(path.begin(), path.end());
      return path;
    };

    std::optional<std::pair<int, int>> meet;  // (a-side idx, b-side idx)
    auto push_node = [&](int side, const TreePtr& t, int parent,
                         const RewriteStep& step) -> bool {
      if (lookup_side(side, t)) return false;
      int id = static_cast<int>(nodes[side].size());
      nodes[side].push_back(Node{t, parent, step});
      seen[side][t->hash].push_back(id);
      queue.emplace_back(side, id);
      if (auto other = lookup_side(1 - side, t)) {
        meet = side == 0 ? std::make_pair(id, *other) : std::make_pair(*other, id);
        return true;
      }
      return false;
    };

    push_node(0, a, -1, RewriteStep{});
    if (!meet) push_node(1, b, -1, RewriteStep{});

    while (!meet && !queue.empty()) {
      auto [side, idx] = queue.front();
      queue.pop_front();
      if (nodes[0].size() + nodes[1].size() > bounds.step_bound) break;
      TreePtr cur = nodes[side][idx].tree;
      for (const auto& step : rewrite_frontier(cur, rules, sigma, leaf_type, bounds)) {
        if (push_node(side, step.result, idx, step)) break;
      }
    }

    if (meet) {
      r.outcome = EquivOutcome::Related;
      r.path = collect_path(0, meet->first);
      r.path_from_b = collect_path(1, meet->second);
      return r;
    }
  }

  try {
    TreeOracle oracle(theory, sigma, leaf_type, bounds.oracle_depth_cap, bounds.universe_cap);
    switch (oracle.query(a, b)) {
      case TreeOracle::Relation::Related:
        r.outcome = EquivOutcome::Related;
        r.oracle_depth = bounds.oracle_depth_cap;
        return r;
      case TreeOracle::Relation::NotRelated:
        r.outcome = EquivOutcome::RefutedWithinBound;
        r.oracle_depth = bounds.oracle_depth_cap;
        return r;
      case TreeOracle::Relation::OutsideUniverse:
        r.notes.push_back(Diag{"OutsideUniverse",
                               "trees exceed the oracle universe at depth " +
                                   std::to_string(bounds.oracle_depth_cap), Span{}});
        return r;
    }
  } catch (const Error& e) {
    r.notes.push_back(e.diag);
  }
  return r;
}

RelOutcome rel_comp(const CompTypePtr& type, const TreePtr& a, const TreePtr& b,
                    const EquivBounds& bounds) {
  EquivResult r = tree_equiv(a, b, type->theory, type->sig, type->value, bounds);
  switch (r.outcome) {
    case EquivOutcome::Related:
      return RelOutcome::Related;
    case EquivOutcome::RefutedWithinBound:
      return RelOutcome::NotRelated;
    case EquivOutcome::Unknown:
      return RelOutcome::Unknown;
  }
  return RelOutcome::Unknown;
}

RelOutcome rel_value(const ValueTypePtr& type, const SemValue& a, const SemValue& b,
                     const EquivBounds& bounds) {
  if (std::holds_alternative<VTUnit>(type->node) || std::holds_alternative<VTBool>(type->node)) {
    try {
      return sem_equal(a, b) ? RelOutcome::Related : RelOutcome::NotRelated;
    } catch (const Error&) {
      return RelOutcome::Unknown;
    }
  }
  if (auto* fn = std::get_if<VTFn>(&type->node)) {
    auto carrier = enumerate_ground(fn->arg);
    if (!carrier) return RelOutcome::Unknown;
    auto call = [](const SemValue& f, const SemValue& x) -> std::optional<TreePtr> {
      if (auto* table = std::get_if<std::shared_ptr<const SemFnTable>>(&f.node)) {
        for (size_t i = 0; i < (*table)->domain.size(); ++i) {
          if (sem_equal((*table)->domain[i], x)) return (*table)->results[i];
        }
        return std::nullopt;
      }
      if (auto* opaque = std::get_if<std::shared_ptr<const SemFnOpaque>>(&f.node))
        return (*opaque)->call(x);
      return std::nullopt;
    };
    bool unknown = false;
    for (const auto& x : *carrier) {
      auto ra = call(a, x);
      auto rb = call(b, x);
      if (!ra || !rb) return RelOutcome::Unknown;
      switch (rel_comp(fn->result, *ra, *rb, bounds)) {
        case RelOutcome::NotRelated:
          return RelOutcome::NotRelated;
        case RelOutcome::Unknown:
          unknown = true;
          break;
        case RelOutcome::Related:
          break;
      }
    }
    return unknown ? RelOutcome::Unknown : RelOutcome::Related;
  }
  return RelOutcome::Unknown;
}

}  // namespace loceff
