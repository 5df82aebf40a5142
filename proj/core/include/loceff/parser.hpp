#pragma once

#include "loceff/logic.hpp"

namespace loceff {

// Declarations visible while parsing: the signature resolves operation
// names, the label map resolves theory annotations on types.
struct Decls {
  Signature sig;
  std::map<std::string, Equation> labels;

  Theory theory_of(const std::vector<std::string>& labels_used, const Span& span) const;
};

struct LetDecl {
  std::string name;
  std::variant<std::monostate, ValueTypePtr, CompTypePtr> ascription;
  std::variant<ValuePtr, CompPtr> term;
  Span span;
};

struct TheoryDecl {
  std::string name;
  std::vector<std::string> labels;
  Span span;
};

struct Program {
  Decls decls;
  std::vector<TheoryDecl> theories;
  std::vector<LetDecl> lets;
  std::vector<std::string> proof_imports;
  ProofFile proofs;  // filled by the loader, not the parser
};

Program parse_program(const std::string& source, const std::string& filename = "<input>");
ProofFile parse_proof_file(const std::string& source, const Decls& decls,
                           const std::string& filename = "<proof>");

ValueTypePtr parse_vtype(const std::string& source, const Decls& decls = {});
CompTypePtr parse_ctype(const std::string& source, const Decls& decls = {});
ValuePtr parse_value(const std::string& source, const Decls& decls = {});
CompPtr parse_comp(const std::string& source, const Decls& decls = {});
std::variant<ValuePtr, CompPtr> parse_term(const std::string& source, const Decls& decls = {});
TemplatePtr parse_template(const std::string& source, const Decls& decls = {});
FormulaPtr parse_formula(const std::string& source, const Decls& decls = {});

}  // namespace loceff
