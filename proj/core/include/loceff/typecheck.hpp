#pragma once

#include <memory>

#include "loceff/syntax.hpp"

namespace loceff {

// Typing contexts are ordered and never shadow: binders are opened with
// freshened names before entering.
using Ctx = std::vector<std::pair<std::string, ValueTypePtr>>;

const ValueTypePtr* ctx_lookup(const Ctx& ctx, const std::string& name);
std::set<std::string> ctx_names(const Ctx& ctx);

enum class RespectsVerdict { Yes, No, Unknown };

// Decides whether a handler's clauses respect the source theory. Implemented
// by the logic module; the typechecker only sees the interface.
struct RespectsOracle {
  virtual ~RespectsOracle() = default;
  virtual RespectsVerdict respects(const VHandler& h, const CompTypePtr& source,
                                   const CompTypePtr& target, std::vector<Diag>& diags) const = 0;
};

// Never establishes anything.
const RespectsOracle& null_oracle();
// Yes exactly when the source theory is empty.
const RespectsOracle& free_oracle();

struct CheckOpts {
  const RespectsOracle* oracle = &free_oracle();
};

bool wf_vtype(const ValueTypePtr& t, std::vector<Diag>& diags);
bool wf_ctype(const CompTypePtr& t, std::vector<Diag>& diags);
bool wf_signature(const Signature& sig, std::vector<Diag>& diags);
bool wf_theory(const Theory& theory, const Signature& sig, std::vector<Diag>& diags);
bool wf_ctx(const Ctx& ctx, std::vector<Diag>& diags);
// template_ctx entries carry the argument type A of z : A -> *.
bool wf_template(const Ctx& value_ctx, const Ctx& template_ctx, const TemplatePtr& t,
                 const Signature& sig, std::vector<Diag>& diags);
bool wf_equation(const Equation& eq, const Signature& sig, std::vector<Diag>& diags);

std::vector<Diag> check_value(const Ctx& ctx, const ValuePtr& v, const ValueTypePtr& type,
                              const CheckOpts& opts = {});
std::vector<Diag> check_comp(const Ctx& ctx, const CompPtr& c, const CompTypePtr& type,
                             const CheckOpts& opts = {});
std::vector<Diag> check_clauses(const Ctx& ctx, const VHandler& h, const CompTypePtr& source,
                                const CompTypePtr& target, const CheckOpts& opts = {});

// Synthesis is deliberately partial: variables, constants, and ascribed
// handler literals have exactly one type; everything else yields nothing.
std::optional<ValueTypePtr> infer_value(const Ctx& ctx, const ValuePtr& v);

// Best-effort synthesis of the value type a computation returns, given the
// ambient signature for operation results. Used for do-binders.
std::optional<ValueTypePtr> infer_res_type(const Ctx& ctx, const CompPtr& c,
                                           const CompTypePtr& ambient);

}  // namespace loceff
