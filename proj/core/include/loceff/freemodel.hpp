#pragma once

#include <functional>

#include "loceff/typecheck.hpp"

namespace loceff {

struct Tree;
using TreePtr = std::shared_ptr<const Tree>;

struct SemValue;

struct SemStar {};
struct SemBool {
  bool value;
};
// Total function table over an enumerable domain, in canonical domain order.
struct SemFnTable {
  std::vector<SemValue> domain;
  std::vector<TreePtr> results;
};
struct SemFnOpaque {
  std::function<TreePtr(const SemValue&)> call;
};
struct SemHandlerOpaque {
  std::function<TreePtr(const TreePtr&)> call;
};

struct SemValue {
  std::variant<SemStar, SemBool, std::shared_ptr<const SemFnTable>,
               std::shared_ptr<const SemFnOpaque>, std::shared_ptr<const SemHandlerOpaque>>
      node;
};

struct TreeReturn {
  SemValue value;
};
// Children form a total table over the operation's result carrier, keys in
// canonical enumeration order.
struct TreeOp {
  std::string op;
  SemValue arg;
  std::vector<SemValue> keys;
  std::vector<TreePtr> children;
};

struct Tree {
  std::variant<TreeReturn, TreeOp> node;
  size_t hash = 0;
  int depth = 0;
  size_t size = 0;
};

TreePtr tree_return(SemValue v);
TreePtr tree_op(std::string op, SemValue arg, std::vector<SemValue> keys,
                std::vector<TreePtr> children);

SemValue sem_star();
SemValue sem_bool(bool b);
SemValue sem_table(std::vector<SemValue> domain, std::vector<TreePtr> results);
SemValue sem_fn(std::function<TreePtr(const SemValue&)> call);
SemValue sem_handler(std::function<TreePtr(const TreePtr&)> call);

// Structural equality; comparing opaque closures throws E-OPAQUE.
bool sem_equal(const SemValue& a, const SemValue& b);
bool tree_equal(const TreePtr& a, const TreePtr& b);
size_t sem_hash(const SemValue& v);

std::string print_sem(const SemValue& v);
std::string print_tree(const TreePtr& t);

// Canonical carrier of a ground value type: unit -> [*], bool -> [ff, tt].
// Nothing for function or handler types.
std::optional<std::vector<SemValue>> enumerate_ground(const ValueTypePtr& type);

// Interpretation of a signature: per operation, a map from argument and
// continuation to a result tree.
struct Interp {
  std::map<std::string,
           std::function<TreePtr(const SemValue&, const std::function<TreePtr(const SemValue&)>&)>>
      ops;
};

// The free interpretation: each op call becomes an op node whose children
// table the continuation over the result carrier.
Interp free_interp(const Signature& sig);

// Homomorphic extension: replace each return leaf by f and each op node by
// its interpretation under h.
TreePtr lift(const Interp& h, const std::function<TreePtr(const SemValue&)>& f, const TreePtr& t);

using Env = std::map<std::string, SemValue>;

// All ground environments over a context, in canonical order (product of the
// carriers, last entry varying fastest). Nothing if a type is not enumerable.
std::optional<std::vector<Env>> enumerate_envs(const Ctx& ctx);

SemValue denote_value(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type, const Env& env);
TreePtr denote_comp(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type, const Env& env);

// Clause semantics of a handler into target D: continuations are
// materialized as total tables over the op's result carrier.
Interp denote_clauses(const Ctx& ctx, const OpClauses& clauses, const Signature& sigma,
                      const CompTypePtr& target, const Env& env);

using Zeta = std::map<std::string, std::function<TreePtr(const SemValue&)>>;

// Template denotation under an interpretation, a value environment, and an
// assignment of template variables.
TreePtr hsem_template(const TemplatePtr& t, const Interp& h, const Signature& sigma,
                      const Ctx& value_ctx, const Env& eta, const Zeta& zeta);

}  // namespace loceff
