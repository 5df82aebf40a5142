#pragma once

#include "loceff/freemodel.hpp"

namespace loceff {

struct EquivBounds {
  size_t step_bound = 10000;    // rewrite states explored per side
  size_t size_bound = 4096;     // max tree size kept during search
  int oracle_depth_cap = 3;     // universe depth for the oracle fallback
  size_t universe_cap = 100000; // max universe size before giving up
};

// One direction of an equation, usable as a rewrite rule when every template
// variable reached on the right is also reached on the left under the same
// value assignment.
struct RewriteRule {
  std::string label;
  bool forward = true;
  Equation eq;
};

struct CompiledRules {
  std::vector<RewriteRule> rules;
  std::vector<Diag> warnings;  // directions dropped as unbalanced
};

CompiledRules compile_rules(const Theory& theory, const Signature& sigma);

// Partial assignment of template variables discovered while matching:
// argument/result pairs observed at each variable.
struct TemplateMatch {
  std::map<std::string, std::vector<std::pair<SemValue, TreePtr>>> vars;
};

// Match a template against a tree under a fixed value assignment. At most
// one match exists; tables are filled only at syntactically reached
// arguments and must stay consistent.
std::optional<TemplateMatch> match_template(const TemplatePtr& t, const TreePtr& tree,
                                            const Signature& sigma, const Ctx& value_ctx,
                                            const Env& eta);

struct RewriteStep {
  std::string label;
  bool forward = true;
  std::vector<size_t> position;  // child indices from the root
  Env eta;
  TreePtr result;  // whole tree after the step
};

enum class EquivOutcome { Related, RefutedWithinBound, Unknown };

struct EquivResult {
  EquivOutcome outcome = EquivOutcome::Unknown;
  // Related via search: both sides rewrite to a common meeting tree.
  std::vector<RewriteStep> path;         // from the left tree
  std::vector<RewriteStep> path_from_b;  // from the right tree
  // Related or refuted via the oracle: the universe depth used.
  std::optional<int> oracle_depth;
  std::vector<Diag> notes;
};

// Decide whether two trees are related by the theory, by bidirectional
// rewrite search with an exhaustive finite-universe oracle as fallback.
EquivResult tree_equiv(const TreePtr& a, const TreePtr& b, const Theory& theory,
                       const Signature& sigma, const ValueTypePtr& leaf_type,
                       const EquivBounds& bounds = {});

// Re-run a path witness and confirm both segments reach the same tree.
bool replay_path(const TreePtr& a, const TreePtr& b, const std::vector<RewriteStep>& path,
                 const std::vector<RewriteStep>& path_from_b, const Theory& theory,
                 const Signature& sigma, const ValueTypePtr& leaf_type);

// All single-step rewrites of a tree, deterministically ordered by rule
// label, position, then assignment.
std::vector<RewriteStep> rewrite_frontier(const TreePtr& t, const CompiledRules& rules,
                                          const Signature& sigma, const ValueTypePtr& leaf_type,
                                          const EquivBounds& bounds);

// Exhaustive decision procedure over the finite universe of trees up to a
// depth: interns every tree, merges equation instances, closes under
// congruence.
class TreeOracle {
 public:
  enum class Relation { Related, NotRelated, OutsideUniverse };

  // Throws Error UniverseTooLarge when the estimated universe exceeds the cap.
  TreeOracle(const Theory& theory, const Signature& sigma, const ValueTypePtr& leaf_type,
             int depth, size_t universe_cap = 100000);

  Relation query(const TreePtr& a, const TreePtr& b) const;
  size_t universe_size() const;
  // The interned universe in construction order: leaves first, then
  // operation trees level by level.
  std::vector<TreePtr> universe() const;
  size_t class_count() const;
  // Classes as sorted lists of member trees, smallest representative first.
  std::vector<std::vector<TreePtr>> classes() const;
  int depth() const { return depth_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  int depth_;
};

// Estimated universe size at the given depth, saturating at cap + 1.
size_t universe_estimate(const Signature& sigma, const ValueTypePtr& leaf_type, int depth,
                         size_t cap);

enum class RelOutcome { Related, NotRelated, Unknown };

// Logical relation at a value type: structural on ground values, pointwise
// over the carrier at function types.
RelOutcome rel_value(const ValueTypePtr& type, const SemValue& a, const SemValue& b,
                     const EquivBounds& bounds = {});
RelOutcome rel_comp(const CompTypePtr& type, const TreePtr& a, const TreePtr& b,
                    const EquivBounds& bounds = {});

}  // namespace loceff
