#include "loceff/parser.hpp"

#include <cctype>
#include <cstdlib>

namespace loceff {

namespace {

enum class Tok {
  Ident,
  Int,
  Str,
  KwFun,
  KwHandler,
  KwReturn,
  KwDo,
  KwIn,
  KwWith,
  KwHandle,
  KwIf,
  KwThen,
  KwElse,
  KwTrue,
  KwFalse,
  KwUnit,
  KwBool,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  Pipe,
  Turnstile,  // |-
  Arrow,      // ->
  DArrow,     // =>
  LArrow,     // <-
  Assign,     // :=
  Equal,      // =
  EqEq,       // ==
  Tilde,
  Bang,
  Slash,
  At,
  Star,
  AndAnd,  // conjunction
  OrOr,    // disjunction
  Hole,    // [.]
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  Span span;
};

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> k = {
      {"fun", Tok::KwFun},       {"handler", Tok::KwHandler}, {"return", Tok::KwReturn},
      {"do", Tok::KwDo},         {"in", Tok::KwIn},           {"with", Tok::KwWith},
      {"handle", Tok::KwHandle}, {"if", Tok::KwIf},           {"then", Tok::KwThen},
      {"else", Tok::KwElse},     {"true", Tok::KwTrue},       {"false", Tok::KwFalse},
      {"unit", Tok::KwUnit},     {"bool", Tok::KwBool},
  };
  return k;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  char cur() const { return pos < src.size() ? src[pos] : '\0'; }
  char ahead(size_t k) const { return pos + k < src.size() ? src[pos + k] : '\0'; }
  void adv() {
    if (cur() == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  std::vector<Token> lex() {
    std::vector<Token> out;
    for (;;) {
      while (pos < src.size()) {
        char c = cur();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
          adv();
        } else if (c == '/' && ahead(1) == '/') {
          while (pos < src.size() && cur() != '\n') adv();
        } else {
          break;
        }
      }
      Span sp{line, col, line, col};
      if (pos >= src.size()) {
        out.push_back({Tok::Eof, "", sp});
        return out;
      }
      char c = cur();
      if (ident_start(c)) {
        std::string s;
        while (pos < src.size() && ident_char(cur())) {
          s.push_back(cur());
          adv();
        }
        sp.end_line = line;
        sp.end_col = col;
        auto it = keywords().find(s);
        out.push_back({it == keywords().end() ? Tok::Ident : it->second, s, sp});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string s;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(cur()))) {
          s.push_back(cur());
          adv();
        }
        sp.end_line = line;
        sp.end_col = col;
        out.push_back({Tok::Int, s, sp});
        continue;
      }
      if (c == '"') {
        adv();
        std::string s;
        while (pos < src.size() && cur() != '"') {
          if (cur() == '\\' && (ahead(1) == '"' || ahead(1) == '\\')) adv();
          s.push_back(cur());
          adv();
        }
        if (pos >= src.size()) throw Error("E-PARSE", "unterminated string literal", sp);
        adv();
        sp.end_line = line;
        sp.end_col = col;
        out.push_back({Tok::Str, s, sp});
        continue;
      }
      auto two = [&](char a, char b) { return c == a && ahead(1) == b; };
      Tok kind;
      std::string text;
      if (c == '[' && ahead(1) == '.' && ahead(2) == ']') {
        kind = Tok::Hole;
        text = "[.]";
        adv();
        adv();
        adv();
      } else if (two('|', '-')) {
        kind = Tok::Turnstile;
        text = "|-";
        adv();
        adv();
      } else if (two('-', '>')) {
        kind = Tok::Arrow;
        text = "->";
        adv();
        adv();
      } else if (two('=', '>')) {
        kind = Tok::DArrow;
        text = "=>";
        adv();
        adv();
      } else if (two('<', '-')) {
        kind = Tok::LArrow;
        text = "<-";
        adv();
        adv();
      } else if (two(':', '=')) {
        kind = Tok::Assign;
        text = ":=";
        adv();
        adv();
      } else if (two('=', '=')) {
        kind = Tok::EqEq;
        text = "==";
        adv();
        adv();
      } else if (two('/', '\\')) {
        kind = Tok::AndAnd;
        text = "/\\";
        adv();
        adv();
      } else if (two('\\', '/')) {
        kind = Tok::OrOr;
        text = "\\/";
        adv();
        adv();
      } else {
        switch (c) {
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case '{': kind = Tok::LBrace; break;
          case '}': kind = Tok::RBrace; break;
          case ',': kind = Tok::Comma; break;
          case ';': kind = Tok::Semi; break;
          case ':': kind = Tok::Colon; break;
          case '.': kind = Tok::Dot; break;
          case '|': kind = Tok::Pipe; break;
          case '~': kind = Tok::Tilde; break;
          case '!': kind = Tok::Bang; break;
          case '/': kind = Tok::Slash; break;
          case '@': kind = Tok::At; break;
          case '*': kind = Tok::Star; break;
          case '=': kind = Tok::Equal; break;
          default:
            throw Error("E-PARSE", std::string("unexpected character '") + c + "'", sp);
        }
        text = std::string(1, c);
        adv();
      }
      sp.end_line = line;
      sp.end_col = col;
      out.push_back({kind, std::move(text), sp});
    }
  }
};

using ParsedType = std::variant<ValueTypePtr, CompTypePtr>;
using ParsedTerm = std::variant<ValuePtr, CompPtr>;

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  Decls decls;

  explicit Parser(const std::string& source, Decls d = {}) : decls(std::move(d)) {
    Lexer lx{source};
    toks = lx.lex();
  }

  const Token& peek(size_t k = 0) const {
    size_t i = pos + k;
    if (i >= toks.size()) i = toks.size() - 1;
    return toks[i];
  }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_ident(const char* s) const { return at(Tok::Ident) && peek().text == s; }
  Token eat() {
    Token t = peek();
    if (t.kind != Tok::Eof) ++pos;
    return t;
  }
  Token expect(Tok t, const std::string& what) {
    if (!at(t)) fail("expected " + what);
    return eat();
  }
  void expect_field(const char* name) {
    if (!at_ident(name)) fail(std::string("expected '") + name + ":'");
    eat();
    expect(Tok::Colon, "':'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Diag{"E-PARSE", msg, peek().span});
  }
  void expect_eof() {
    if (!at(Tok::Eof)) fail("trailing input");
  }

  // Index of the token after the matching ')' for the '(' at index i.
  size_t after_matching_paren(size_t i) const {
    int depth = 0;
    for (size_t j = i; j < toks.size(); ++j) {
      if (toks[j].kind == Tok::LParen) ++depth;
      if (toks[j].kind == Tok::RParen && --depth == 0) return j + 1;
    }
    fail("unbalanced '('");
  }

  // -------------------------------------------------------------------------
  // Types

  ValueTypePtr require_vtype(ParsedType t, const std::string& what) {
    if (auto* v = std::get_if<ValueTypePtr>(&t)) return *v;
    fail(what + " must be a value type");
  }
  CompTypePtr require_ctype(ParsedType t, const std::string& what) {
    if (auto* c = std::get_if<CompTypePtr>(&t)) return *c;
    fail(what + " must be a computation type");
  }

  ParsedType parse_type() {
    ParsedType left = parse_type_prefix();
    if (at(Tok::Arrow)) {
      eat();
      ValueTypePtr a = require_vtype(left, "function argument");
      CompTypePtr c = require_ctype(parse_type(), "function result");
      return ParsedType{vt_fn(a, c)};
    }
    if (at(Tok::DArrow)) {
      eat();
      CompTypePtr src = require_ctype(left, "handler source");
      CompTypePtr dst = require_ctype(parse_type(), "handler target");
      return ParsedType{vt_handler(src, dst)};
    }
    return left;
  }

  ParsedType parse_type_prefix() {
    ParsedType a = parse_type_atom();
    if (!at(Tok::Bang)) return a;
    Token bang = eat();
    ValueTypePtr v = require_vtype(a, "carrier of an effect row");
    expect(Tok::LBrace, "'{'");
    Signature sig;
    while (!at(Tok::RBrace)) {
      Token opn = expect(Tok::Ident, "operation name");
      auto it = decls.sig.find(opn.text);
      if (it == decls.sig.end())
        throw Error(Diag{"UnknownOp", "operation " + opn.text + " is not declared", opn.span});
      if (sig.count(opn.text))
        throw Error(Diag{"DuplicateOp", "operation " + opn.text + " listed twice", opn.span});
      sig.emplace(opn.text, it->second);
      if (at(Tok::Comma)) {
        eat();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    Theory theory;
    if (at(Tok::Slash)) {
      eat();
      expect(Tok::LBrace, "'{'");
      std::vector<std::string> labels;
      while (!at(Tok::RBrace)) {
        Token l = expect(Tok::Ident, "equation label");
        labels.push_back(l.text);
        if (at(Tok::Comma)) {
          eat();
          continue;
        }
        break;
      }
      expect(Tok::RBrace, "'}'");
      theory = decls.theory_of(labels, bang.span);
    }
    return ParsedType{ct(v, std::move(sig), std::move(theory))};
  }

  ParsedType parse_type_atom() {
    Token t = peek();
    switch (t.kind) {
      case Tok::KwUnit:
        eat();
        return ParsedType{vt_unit()};
      case Tok::KwBool:
        eat();
        return ParsedType{vt_bool()};
      case Tok::LParen: {
        eat();
        ParsedType inner = parse_type();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a type");
    }
  }

  ValueTypePtr parse_vtype_atom(const std::string& what) {
    return require_vtype(parse_type_atom(), what);
  }

  // -------------------------------------------------------------------------
  // Terms

  static bool value_atom_start(Tok k) {
    return k == Tok::Ident || k == Tok::KwTrue || k == Tok::KwFalse || k == Tok::LParen;
  }
  // Idents that head declarations; never implicit application arguments.
  static bool decl_head(const Token& t) {
    if (t.kind != Tok::Ident) return false;
    return t.text == "let" || t.text == "theory" || t.text == "signature" ||
           t.text == "proofs" || t.text == "by";
  }

  ValuePtr parse_value() {
    Token t = peek();
    if (t.kind == Tok::KwFun) {
      eat();
      Token b = expect(Tok::Ident, "binder");
      expect(Tok::Arrow, "'->'");
      CompPtr body = parse_comp();
      return mk_lambda(b.text, close_comp(body, b.text), t.span);
    }
    if (t.kind == Tok::KwHandler) return parse_handler();
    return parse_value_atom();
  }

  ValuePtr parse_value_atom() {
    Token t = peek();
    switch (t.kind) {
      case Tok::Ident:
        eat();
        return mk_free(t.text, t.span);
      case Tok::KwTrue:
        eat();
        return mk_bool(true, t.span);
      case Tok::KwFalse:
        eat();
        return mk_bool(false, t.span);
      case Tok::LParen: {
        eat();
        if (at(Tok::RParen)) {
          eat();
          return mk_unit(t.span);
        }
        ValuePtr v = parse_value();
        expect(Tok::RParen, "')'");
        return v;
      }
      default:
        fail("expected a value");
    }
  }

  ValuePtr parse_handler() {
    Token t = expect(Tok::KwHandler, "'handler'");
    expect(Tok::LBrace, "'{'");
    VHandler h;
    h.ret_hint = "x";
    h.ret_body = mk_return(mk_bound(0, "x"));
    bool saw_ret = false;
    for (;;) {
      if (at(Tok::KwReturn)) {
        if (saw_ret) fail("duplicate return clause");
        saw_ret = true;
        eat();
        Token b = expect(Tok::Ident, "binder");
        expect(Tok::Arrow, "'->'");
        CompPtr body = parse_comp();
        h.ret_hint = b.text;
        h.ret_body = close_comp(body, b.text);
      } else {
        Token opn = expect(Tok::Ident, "operation name or 'return'");
        expect(Tok::LParen, "'('");
        std::string arg_hint;
        if (at(Tok::LParen) && peek(1).kind == Tok::RParen) {
          eat();
          eat();
          arg_hint = "_";
        } else {
          arg_hint = expect(Tok::Ident, "argument binder").text;
        }
        expect(Tok::Semi, "';'");
        Token k = expect(Tok::Ident, "continuation binder");
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        CompPtr body = parse_comp();
        if (h.clauses.count(opn.text))
          throw Error(Diag{"DuplicateClause", "duplicate clause for " + opn.text, opn.span});
        h.clauses.emplace(opn.text,
                          OpClause{arg_hint, k.text, close_comp(body, {k.text, arg_hint})});
      }
      if (at(Tok::Pipe)) {
        eat();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    if (at(Tok::Colon)) {
      eat();
      ParsedType ty = parse_type();
      ValueTypePtr v = require_vtype(ty, "handler ascription");
      auto* ht = std::get_if<VTHandler>(&v->node);
      if (!ht) fail("handler ascription must be a handler type");
      h.ascription = {ht->source, ht->target};
    }
    if (at_ident("by")) {
      eat();
      if (at_ident("auto")) {
        eat();
        Evidence::Auto a;
        if (at(Tok::LParen)) {
          eat();
          while (!at(Tok::RParen)) {
            Token key = expect(Tok::Ident, "'depth' or 'steps'");
            expect(Tok::Equal, "'='");
            Token n = expect(Tok::Int, "a number");
            if (key.text == "depth")
              a.depth = std::atoi(n.text.c_str());
            else if (key.text == "steps")
              a.steps = std::atoi(n.text.c_str());
            else
              fail("unknown auto parameter " + key.text);
            if (at(Tok::Comma)) {
              eat();
              continue;
            }
            break;
          }
          expect(Tok::RParen, "')'");
        }
        h.evidence = Evidence{a};
      } else {
        Token name = expect(Tok::Ident, "evidence name");
        h.evidence = Evidence{name.text};
      }
    }
    return mk_handler(std::move(h), t.span);
  }

  CompPtr parse_comp() {
    Token t = peek();
    if (t.kind == Tok::KwIf) {
      eat();
      ValuePtr v = parse_value();
      expect(Tok::KwThen, "'then'");
      CompPtr c1 = parse_comp_protected();
      expect(Tok::KwElse, "'else'");
      CompPtr c2 = parse_comp();
      return mk_if(v, c1, c2, t.span);
    }
    if (t.kind == Tok::KwDo) {
      eat();
      Token b = expect(Tok::Ident, "binder");
      expect(Tok::LArrow, "'<-'");
      CompPtr first = parse_comp_protected();
      expect(Tok::KwIn, "'in'");
      CompPtr rest = parse_comp();
      return mk_do(b.text, first, close_comp(rest, b.text), t.span);
    }
    if (t.kind == Tok::KwWith) {
      eat();
      ValuePtr h = parse_value();
      expect(Tok::KwHandle, "'handle'");
      CompPtr body = parse_comp();
      return mk_handle(h, body, t.span);
    }
    CompPtr c = parse_comp_protected();
    if (at(Tok::Semi)) {
      Token semi = eat();
      CompPtr rest = parse_comp();
      return mk_do("_", c, rest, semi.span);
    }
    return c;
  }

  CompPtr parse_comp_protected() {
    Token t = peek();
    switch (t.kind) {
      case Tok::KwReturn: {
        eat();
        ValuePtr v = parse_value();
        return mk_return(v, t.span);
      }
      case Tok::Hole:
        eat();
        return mk_hole(t.span);
      case Tok::LParen: {
        size_t after = after_matching_paren(pos);
        if (after >= toks.size()) after = toks.size() - 1;
        Tok next = toks[after].kind;
        if (value_atom_start(next) && !decl_head(toks[after])) {
          eat();
          ValuePtr fn = parse_value();
          expect(Tok::RParen, "')'");
          ValuePtr arg = parse_value_atom();
          return mk_apply(fn, arg, t.span);
        }
        eat();
        CompPtr c = parse_comp();
        expect(Tok::RParen, "')'");
        return c;
      }
      case Tok::Ident: {
        if (peek(1).kind == Tok::LParen) {
          eat();
          eat();
          if (at(Tok::RParen)) {
            eat();
            return mk_apply(mk_free(t.text, t.span), mk_unit(t.span), t.span);
          }
          ValuePtr arg = parse_value();
          if (at(Tok::Semi)) {
            eat();
            Token k = expect(Tok::Ident, "continuation binder");
            expect(Tok::Dot, "'.'");
            CompPtr body = parse_comp();
            expect(Tok::RParen, "')'");
            return mk_op(t.text, arg, k.text, close_comp(body, k.text), t.span);
          }
          expect(Tok::RParen, "')'");
          return mk_op(t.text, arg, "y", mk_return(mk_bound(0, "y")), t.span);
        }
        if (value_atom_start(peek(1).kind) && !decl_head(peek(1))) {
          eat();
          ValuePtr arg = parse_value_atom();
          return mk_apply(mk_free(t.text, t.span), arg, t.span);
        }
        fail("expected a computation");
      }
      default:
        fail("expected a computation");
    }
  }

  ParsedTerm parse_term_either() {
    size_t save = pos;
    try {
      return ParsedTerm{parse_comp()};
    } catch (const Error& as_comp) {
      size_t comp_pos = pos;
      pos = save;
      try {
        return ParsedTerm{parse_value()};
      } catch (const Error& as_value) {
        // Report whichever reading got further.
        if (pos > comp_pos) throw as_value;
        pos = comp_pos;
        throw as_comp;
      }
    }
  }

  // -------------------------------------------------------------------------
  // Templates

  TemplatePtr parse_template() {
    Token t = peek();
    if (t.kind == Tok::KwIf) {
      eat();
      ValuePtr v = parse_value();
      expect(Tok::KwThen, "'then'");
      TemplatePtr t1 = parse_template();
      expect(Tok::KwElse, "'else'");
      TemplatePtr t2 = parse_template();
      return mk_tif(v, t1, t2, t.span);
    }
    if (t.kind == Tok::LParen) {
      eat();
      TemplatePtr inner = parse_template();
      expect(Tok::RParen, "')'");
      return inner;
    }
    Token id = expect(Tok::Ident, "template variable or operation");
    if (at(Tok::LParen)) {
      eat();
      if (at(Tok::RParen)) {
        eat();
        return mk_tvar(id.text, mk_unit(id.span), id.span);
      }
      ValuePtr arg = parse_value();
      if (at(Tok::Semi)) {
        eat();
        Token k = expect(Tok::Ident, "continuation binder");
        expect(Tok::Dot, "'.'");
        TemplatePtr body = parse_template();
        expect(Tok::RParen, "')'");
        return mk_top(id.text, arg, k.text, close_template(body, k.text), id.span);
      }
      expect(Tok::RParen, "')'");
      return mk_tvar(id.text, arg, id.span);
    }
    return mk_tvar(id.text, mk_unit(id.span), id.span);
  }

  // -------------------------------------------------------------------------
  // Formulas

  FormulaPtr parse_formula() {
    Token t = peek();
    if (at_ident("forall") || at_ident("exists")) {
      bool universal = t.text == "forall";
      eat();
      Token b = expect(Tok::Ident, "binder");
      expect(Tok::Colon, "':'");
      ValueTypePtr a = require_vtype(parse_type(), "quantifier domain");
      expect(Tok::Dot, "'.'");
      FormulaPtr body = close_formula(parse_formula(), b.text);
      return universal ? f_forall(b.text, a, body, t.span) : f_exists(b.text, a, body, t.span);
    }
    FormulaPtr l = parse_formula_or();
    if (at(Tok::DArrow)) {
      Token arr = eat();
      FormulaPtr r = parse_formula();
      return f_implies(l, r, arr.span);
    }
    return l;
  }

  FormulaPtr parse_formula_or() {
    FormulaPtr l = parse_formula_and();
    while (at(Tok::OrOr)) {
      Token op = eat();
      FormulaPtr r = parse_formula_and();
      l = f_or(l, r, op.span);
    }
    return l;
  }

  FormulaPtr parse_formula_and() {
    FormulaPtr l = parse_formula_atom();
    while (at(Tok::AndAnd)) {
      Token op = eat();
      FormulaPtr r = parse_formula_atom();
      l = f_and(l, r, op.span);
    }
    return l;
  }

  bool paren_wraps_formula() const {
    size_t after = after_matching_paren(pos);
    switch (toks[after < toks.size() ? after : toks.size() - 1].kind) {
      case Tok::AndAnd:
      case Tok::OrOr:
      case Tok::DArrow:
      case Tok::RParen:
      case Tok::RBrace:
      case Tok::Semi:
      case Tok::Eof:
        return true;
      case Tok::Ident:
        // A following field name ends the formula; a value atom continues a term.
        return false;
      default:
        return false;
    }
  }

  FormulaPtr parse_formula_atom() {
    Token t = peek();
    if (at_ident("top")) {
      eat();
      return f_true(t.span);
    }
    if (at_ident("bot")) {
      eat();
      return f_false(t.span);
    }
    if (t.kind == Tok::LParen && paren_wraps_formula()) {
      eat();
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    ParsedTerm lhs = parse_term_either();
    Token eq = expect(Tok::EqEq, "'=='");
    ParsedTerm rhs = parse_term_either();
    expect(Tok::At, "'@'");
    ParsedType ty = parse_type();
    if (auto* c = std::get_if<CompTypePtr>(&ty)) {
      auto* lc = std::get_if<CompPtr>(&lhs);
      auto* rc = std::get_if<CompPtr>(&rhs);
      if (!lc || !rc) fail("sides of a computation equation must be computations");
      return f_comp_eq(*lc, *rc, *c, eq.span);
    }
    ValueTypePtr a = std::get<ValueTypePtr>(ty);
    auto to_value = [&](ParsedTerm& side) -> ValuePtr {
      if (auto* v = std::get_if<ValuePtr>(&side)) return *v;
      fail("sides of a value equation must be values");
    };
    return f_value_eq(to_value(lhs), to_value(rhs), a, eq.span);
  }

  // -------------------------------------------------------------------------
  // Programs

  Ctx parse_ctx_entries() {
    Ctx ctx;
    if (!at(Tok::Ident)) return ctx;
    for (;;) {
      Token n = expect(Tok::Ident, "context variable");
      expect(Tok::Colon, "':'");
      ValueTypePtr a = require_vtype(parse_type(), "context entry");
      ctx.emplace_back(n.text, a);
      if (at(Tok::Comma)) {
        eat();
        continue;
      }
      break;
    }
    return ctx;
  }

  Equation parse_equation(const std::string& label) {
    Equation eq;
    eq.label = label;
    while (!at(Tok::Semi)) {
      Token n = expect(Tok::Ident, "context variable");
      expect(Tok::Colon, "':'");
      eq.value_ctx.emplace_back(n.text, require_vtype(parse_type(), "context entry"));
      if (at(Tok::Comma)) {
        eat();
        continue;
      }
      break;
    }
    expect(Tok::Semi, "';'");
    while (!at(Tok::Turnstile)) {
      Token z = expect(Tok::Ident, "template variable");
      expect(Tok::Colon, "':'");
      ValueTypePtr a = parse_vtype_atom("template variable argument");
      expect(Tok::Arrow, "'->'");
      expect(Tok::Star, "'*'");
      eq.template_ctx.emplace_back(z.text, a);
      if (at(Tok::Comma)) {
        eat();
        continue;
      }
      break;
    }
    expect(Tok::Turnstile, "'|-'");
    eq.lhs = parse_template();
    expect(Tok::Tilde, "'~'");
    eq.rhs = parse_template();
    if (at(Tok::Semi)) eat();
    return eq;
  }

  Program parse_program_file() {
    Program p;
    std::set<std::string> let_names;
    while (!at(Tok::Eof)) {
      if (at_ident("signature")) {
        eat();
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
          Token opn = expect(Tok::Ident, "operation name");
          expect(Tok::Colon, "':'");
          ValueTypePtr param = parse_vtype_atom("operation parameter");
          expect(Tok::Arrow, "'->'");
          ValueTypePtr result = parse_vtype_atom("operation result");
          if (p.decls.sig.count(opn.text))
            throw Error(
                Diag{"DuplicateOp", "operation " + opn.text + " declared twice", opn.span});
          p.decls.sig.emplace(opn.text, OpSig{param, result});
          if (at(Tok::Semi)) eat();
        }
        eat();
        decls.sig = p.decls.sig;
      } else if (at_ident("theory")) {
        eat();
        Token name = expect(Tok::Ident, "theory name");
        expect(Tok::LBrace, "'{'");
        TheoryDecl td;
        td.name = name.text;
        td.span = name.span;
        while (!at(Tok::RBrace)) {
          Token label = expect(Tok::Ident, "equation label");
          expect(Tok::Colon, "':'");
          Equation eq = parse_equation(label.text);
          if (p.decls.labels.count(label.text))
            throw Error(Diag{"DuplicateLabel",
                             "equation label " + label.text + " declared twice", label.span});
          p.decls.labels.emplace(label.text, eq);
          decls.labels = p.decls.labels;
          td.labels.push_back(label.text);
        }
        eat();
        p.theories.push_back(std::move(td));
      } else if (at_ident("let")) {
        Token kw = eat();
        Token name = expect(Tok::Ident, "name");
        if (let_names.count(name.text))
          throw Error(Diag{"DuplicateLet", "name " + name.text + " defined twice", name.span});
        let_names.insert(name.text);
        LetDecl d;
        d.name = name.text;
        d.span = kw.span;
        if (at(Tok::Colon)) {
          eat();
          ParsedType ty = parse_type();
          if (auto* v = std::get_if<ValueTypePtr>(&ty))
            d.ascription = *v;
          else
            d.ascription = std::get<CompTypePtr>(ty);
        }
        expect(Tok::Equal, "'='");
        ParsedTerm term = parse_term_either();
        bool holed = false;
        if (auto* c = std::get_if<CompPtr>(&term)) holed = has_hole(*c);
        if (holed) fail("definitions cannot contain holes");
        if (auto* v = std::get_if<ValuePtr>(&term))
          d.term = *v;
        else
          d.term = std::get<CompPtr>(term);
        p.lets.push_back(std::move(d));
      } else if (at_ident("proofs")) {
        eat();
        Token path = expect(Tok::Str, "a quoted path");
        p.proof_imports.push_back(path.text);
      } else {
        fail("expected 'signature', 'theory', 'let', or 'proofs'");
      }
    }
    return p;
  }

  // -------------------------------------------------------------------------
  // Proof files

  void fill_payload(ProofNode& n, const Token& key) {
    auto dup = [&](bool already) {
      if (already)
        throw Error(Diag{"E-PARSE", "duplicate " + key.text + "(...) argument", key.span});
    };
    const std::string& k = key.text;
    if (k == "comp" || k == "subject") {
      dup(n.comp.has_value());
      n.comp = parse_comp();
    } else if (k == "value" || k == "witness") {
      dup(n.value.has_value());
      n.value = parse_value();
    } else if (k == "type") {
      dup(n.vtype.has_value() || n.ctype.has_value());
      ParsedType ty = parse_type();
      if (auto* v = std::get_if<ValueTypePtr>(&ty))
        n.vtype = *v;
      else
        n.ctype = std::get<CompTypePtr>(ty);
    } else if (k == "vtype") {
      dup(n.vtype.has_value());
      n.vtype = require_vtype(parse_type(), "vtype argument");
    } else if (k == "formula" || k == "schema") {
      dup(n.formula.has_value());
      n.formula = parse_formula();
    } else if (k == "op" || k == "label") {
      dup(n.op.has_value());
      n.op = expect(Tok::Ident, "a name").text;
    } else if (k == "binder" || k == "var" || k == "arg" || k == "ret") {
      dup(n.binder.has_value());
      n.binder = expect(Tok::Ident, "a name").text;
    } else if (k == "cont") {
      dup(n.cont.has_value());
      n.cont = expect(Tok::Ident, "a name").text;
    } else if (k == "index") {
      dup(n.index.has_value());
      n.index = static_cast<size_t>(std::atol(expect(Tok::Int, "an index").text.c_str()));
    } else if (k == "vals" || k == "fns") {
      auto& target = k == "vals" ? n.vals : n.fns;
      dup(!target.empty());
      while (!at(Tok::RParen)) {
        Token name = expect(Tok::Ident, "a name");
        expect(Tok::Assign, "':='");
        ValuePtr v = parse_value();
        if (target.count(name.text))
          throw Error(Diag{"E-PARSE", "duplicate binding for " + name.text, name.span});
        target.emplace(name.text, v);
        if (at(Tok::Comma)) {
          eat();
          continue;
        }
        break;
      }
    } else {
      throw Error(Diag{"E-PARSE", "unknown proof step argument " + k, key.span});
    }
  }

  ProofNodePtr parse_proof_node(int col) {
    Token tag = expect(Tok::Ident, "proof step");
    ProofNode n;
    n.tag = tag.text;
    n.span = tag.span;
    int cur_line = tag.span.end_line;
    while (peek().span.line == cur_line && at(Tok::Ident) && peek(1).kind == Tok::LParen) {
      Token key = eat();
      expect(Tok::LParen, "'('");
      fill_payload(n, key);
      Token close = expect(Tok::RParen, "')'");
      cur_line = close.span.end_line;
    }
    if (peek().span.line == cur_line && !at(Tok::RBrace) && !at(Tok::Eof))
      fail("unexpected token after proof step");
    n.children = parse_proof_children(col);
    return std::make_shared<const ProofNode>(std::move(n));
  }

  std::vector<ProofNodePtr> parse_proof_children(int parent_col) {
    std::vector<ProofNodePtr> out;
    if (at(Tok::RBrace) || at(Tok::Eof)) return out;
    int col = peek().span.col;
    if (col <= parent_col) return out;
    while (!at(Tok::RBrace) && !at(Tok::Eof) && peek().span.col == col)
      out.push_back(parse_proof_node(col));
    if (!at(Tok::RBrace) && !at(Tok::Eof) && peek().span.col > parent_col &&
        peek().span.col != col)
      fail("misaligned proof step");
    return out;
  }

  ProofNodePtr parse_script() {
    auto roots = parse_proof_children(0);
    if (roots.size() != 1) fail("a proof script must have exactly one root step");
    return roots[0];
  }

  ProofFile parse_proofs() {
    ProofFile f;
    while (!at(Tok::Eof)) {
      if (at_ident("respects")) {
        eat();
        Token name = expect(Tok::Ident, "bundle name");
        expect(Tok::LBrace, "'{'");
        RespectsBundle b;
        b.name = name.text;
        b.span = name.span;
        expect_field("target");
        b.target = require_ctype(parse_type(), "respects target");
        while (at_ident("equation")) {
          eat();
          Token label = expect(Tok::Ident, "equation label");
          expect(Tok::LBrace, "'{'");
          RespectsCase cs;
          cs.label = label.text;
          cs.span = label.span;
          if (at_ident("context")) {
            eat();
            expect(Tok::Colon, "':'");
            cs.context = parse_ctx_entries();
          }
          expect_field("goal");
          cs.goal = parse_formula();
          cs.eq_only = true;
          if (at_ident("logic")) {
            eat();
            expect(Tok::Colon, "':'");
            Token which = expect(Tok::Ident, "'eq' or 'pred'");
            if (which.text == "pred")
              cs.eq_only = false;
            else if (which.text != "eq")
              fail("logic must be 'eq' or 'pred'");
          }
          expect_field("proof");
          cs.script = parse_script();
          expect(Tok::RBrace, "'}'");
          b.cases.push_back(std::move(cs));
        }
        expect(Tok::RBrace, "'}'");
        f.bundles.push_back(std::move(b));
      } else if (at_ident("proof")) {
        eat();
        Token name = expect(Tok::Ident, "proof name");
        expect(Tok::LBrace, "'{'");
        NamedProof pr;
        pr.name = name.text;
        pr.span = name.span;
        if (at_ident("context")) {
          eat();
          expect(Tok::Colon, "':'");
          pr.context = parse_ctx_entries();
        }
        if (at_ident("hyps")) {
          eat();
          expect(Tok::Colon, "':'");
          for (;;) {
            pr.hyps.push_back(parse_formula());
            if (at(Tok::Semi)) {
              eat();
              if (at_ident("goal") || at_ident("logic") || at_ident("proof")) break;
              continue;
            }
            break;
          }
        }
        expect_field("goal");
        pr.goal = parse_formula();
        pr.eq_only = false;
        if (at_ident("logic")) {
          eat();
          expect(Tok::Colon, "':'");
          Token which = expect(Tok::Ident, "'eq' or 'pred'");
          if (which.text == "eq")
            pr.eq_only = true;
          else if (which.text != "pred")
            fail("logic must be 'eq' or 'pred'");
        }
        expect_field("proof");
        pr.script = parse_script();
        expect(Tok::RBrace, "'}'");
        f.proofs.push_back(std::move(pr));
      } else {
        fail("expected 'respects' or 'proof'");
      }
    }
    return f;
  }
};

}  // namespace

Theory Decls::theory_of(const std::vector<std::string>& labels_used, const Span& span) const {
  std::vector<Equation> eqs;
  for (const auto& name : labels_used) {
    auto it = labels.find(name);
    if (it == labels.end())
      throw Error(Diag{"UnknownLabel", "unknown equation label " + name, span});
    eqs.push_back(it->second);
  }
  return make_theory(eqs);
}

Program parse_program(const std::string& source, const std::string& filename) {
  try {
    Parser p(source);
    return p.parse_program_file();
  } catch (Error& e) {
    e.diag.message = filename + ": " + e.diag.message;
    throw;
  }
}

ProofFile parse_proof_file(const std::string& source, const Decls& decls,
                           const std::string& filename) {
  try {
    Parser p(source, decls);
    return p.parse_proofs();
  } catch (Error& e) {
    e.diag.message = filename + ": " + e.diag.message;
    throw;
  }
}

ValueTypePtr parse_vtype(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto t = p.require_vtype(p.parse_type(), "input");
  p.expect_eof();
  return t;
}

CompTypePtr parse_ctype(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto t = p.require_ctype(p.parse_type(), "input");
  p.expect_eof();
  return t;
}

ValuePtr parse_value(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto v = p.parse_value();
  p.expect_eof();
  return v;
}

CompPtr parse_comp(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto c = p.parse_comp();
  p.expect_eof();
  return c;
}

std::variant<ValuePtr, CompPtr> parse_term(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto t = p.parse_term_either();
  p.expect_eof();
  return t;
}

TemplatePtr parse_template(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto t = p.parse_template();
  p.expect_eof();
  return t;
}

FormulaPtr parse_formula(const std::string& source, const Decls& decls) {
  Parser p(source, decls);
  auto f = p.parse_formula();
  p.expect_eof();
  return f;
}

}  // namespace loceff
