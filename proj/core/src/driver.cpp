#include "loceff/driver.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "loceff/interp.hpp"
#include "loceff/suite.hpp"

namespace loceff {

EquivBounds Config::bounds() const {
  EquivBounds b;
  b.step_bound = step_bound;
  b.size_bound = size_bound;
  b.oracle_depth_cap = oracle_depth_cap;
  b.universe_cap = universe_cap;
  return b;
}

Config config_from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error("E-PARSE", origin + ": config is not a JSON object");
  Config cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "stepBound")
        cfg.step_bound = value.get<size_t>();
      else if (key == "sizeBound")
        cfg.size_bound = value.get<size_t>();
      else if (key == "oracleDepthCap")
        cfg.oracle_depth_cap = value.get<int>();
      else if (key == "universeCap")
        cfg.universe_cap = value.get<size_t>();
      else if (key == "autoDepth")
        cfg.auto_depth = value.get<int>();
      else if (key == "autoSteps")
        cfg.auto_steps = value.get<size_t>();
      else if (key == "seed")
        cfg.seed = value.get<uint64_t>();
      else if (key == "format")
        cfg.format = value.get<std::string>();
      else
        throw Error("E-PARSE", origin + ": unknown config key " + key);
    } catch (const nlohmann::json::exception&) {
      throw Error("E-PARSE", origin + ": bad value for config key " + key);
    }
  }
  if (cfg.format != "human" && cfg.format != "json")
    throw Error("E-PARSE", origin + ": format must be \"human\" or \"json\"");
  return cfg;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("E-FILE", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string dir_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string{} : path.substr(0, slash + 1);
}

}  // namespace

Config load_config(const std::string& path) {
  return config_from_json(read_file(path), path);
}

Program load_program(const std::string& path) {
  Program p = parse_program(read_file(path), path);
  std::string dir = dir_of(path);
  for (const auto& import : p.proof_imports) {
    std::string resolved = (!import.empty() && import[0] == '/') ? import : dir + import;
    ProofFile pf = parse_proof_file(read_file(resolved), p.decls, resolved);
    for (auto& proof : pf.proofs) p.proofs.proofs.push_back(std::move(proof));
    for (auto& bundle : pf.bundles) p.proofs.bundles.push_back(std::move(bundle));
  }
  return p;
}

CheckedProgram check_program(Program program, const Config& cfg, RespectsMode mode) {
  CheckedProgram out{std::move(program), {}, {}};
  auto& diags = out.diags;
  wf_signature(out.program.decls.sig, diags);
  for (const auto& [label, eq] : out.program.decls.labels)
    wf_equation(eq, out.program.decls.sig, diags);
  if (!diags.empty()) return out;

  RespectsConfig rc;
  rc.mode = mode;
  rc.auto_depth = cfg.auto_depth;
  rc.auto_steps = cfg.auto_steps;
  rc.bounds = cfg.bounds();
  rc.proofs = &out.program.proofs;
  auto oracle = make_respects_oracle(rc);
  CheckOpts opts{oracle.get()};

  Ctx ctx;
  for (const auto& let : out.program.lets) {
    std::vector<Diag> let_diags;
    if (auto* v = std::get_if<ValuePtr>(&let.term)) {
      ValueTypePtr type;
      if (auto* a = std::get_if<ValueTypePtr>(&let.ascription)) {
        if (wf_vtype(*a, let_diags)) {
          for (const auto& d : check_value(ctx, *v, *a, opts)) let_diags.push_back(d);
          type = *a;
        }
      } else if (std::holds_alternative<CompTypePtr>(let.ascription)) {
        let_diags.push_back(Diag{"TypeMismatch",
                                 let.name + " is a value but is ascribed a computation type",
                                 let.span});
      } else if (auto inferred = infer_value(ctx, *v)) {
        for (const auto& d : check_value(ctx, *v, *inferred, opts)) let_diags.push_back(d);
        type = *inferred;
      } else {
        let_diags.push_back(Diag{"E-TYPE-INFER",
                                 "cannot infer a type for " + let.name + "; ascribe it",
                                 let.span});
      }
      if (type) {
        out.types.emplace(let.name, type);
        ctx.emplace_back(let.name, type);
      }
    } else {
      const CompPtr& c = std::get<CompPtr>(let.term);
      CompTypePtr type;
      if (auto* a = std::get_if<CompTypePtr>(&let.ascription)) {
        if (wf_ctype(*a, let_diags)) {
          for (const auto& d : check_comp(ctx, c, *a, opts)) let_diags.push_back(d);
          type = *a;
        }
      } else if (std::holds_alternative<ValueTypePtr>(let.ascription)) {
        let_diags.push_back(Diag{"TypeMismatch",
                                 let.name + " is a computation but is ascribed a value type",
                                 let.span});
      } else {
        CompTypePtr ambient = ct(vt_unit(), out.program.decls.sig, {});
        if (auto a = infer_res_type(ctx, c, ambient)) {
          type = ct(*a, out.program.decls.sig, {});
          for (const auto& d : check_comp(ctx, c, type, opts)) let_diags.push_back(d);
        } else {
          let_diags.push_back(Diag{"E-TYPE-INFER",
                                   "cannot infer a type for " + let.name + "; ascribe it",
                                   let.span});
        }
      }
      if (type && let_diags.empty()) out.types.emplace(let.name, type);
    }
    for (const auto& d : let_diags) diags.push_back(d);
  }
  return out;
}

ValuePtr delta_expand(const ValuePtr& v, const CheckedProgram& p) {
  std::map<std::string, ValuePtr> acc;
  for (const auto& let : p.program.lets) {
    if (auto* def = std::get_if<ValuePtr>(&let.term)) acc[let.name] = subst(*def, acc);
  }
  return subst(v, acc);
}

CompPtr delta_expand(const CompPtr& c, const CheckedProgram& p) {
  std::map<std::string, ValuePtr> acc;
  for (const auto& let : p.program.lets) {
    if (auto* def = std::get_if<ValuePtr>(&let.term)) acc[let.name] = subst(*def, acc);
  }
  return subst(c, acc);
}

namespace {

void emit_diags(const std::vector<Diag>& diags, bool as_json, std::ostream& err) {
  if (diags.empty()) return;
  if (as_json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : diags) {
      nlohmann::json row{{"code", d.code}, {"message", d.message}};
      if (d.span.known()) {
        row["line"] = d.span.line;
        row["col"] = d.span.col;
      }
      arr.push_back(std::move(row));
    }
    err << arr.dump(2) << "\n";
    return;
  }
  for (const auto& d : diags) {
    err << d.code << ": " << d.message;
    if (d.span.known()) err << " (line " << d.span.line << ", col " << d.span.col << ")";
    err << "\n";
  }
}

int exit_for(const Error& e, bool as_json, std::ostream& err) {
  emit_diags({e.diag}, as_json, err);
  const std::string& code = e.diag.code;
  if (code == "E-FILE") return 66;
  if (code == "E-INTERNAL") return 70;
  if (code == "UniverseTooLarge" || code == "E-NONGROUND" || code == "E-OPAQUE") return 2;
  return 1;
}

RespectsMode parse_mode(const std::string& name) {
  if (name == "null") return RespectsMode::Null;
  if (name == "free") return RespectsMode::Free;
  if (name == "eq") return RespectsMode::Eq;
  if (name == "pred") return RespectsMode::Pred;
  if (name == "auto") return RespectsMode::Auto;
  throw Error("E-PARSE", "unknown respects mode " + name);
}

struct Loaded {
  CheckedProgram checked;
  bool ok = false;
};

Loaded load_checked(const std::string& file, const Config& cfg, RespectsMode mode, bool as_json,
                    std::ostream& err) {
  Loaded l{check_program(load_program(file), cfg, mode), false};
  if (mode == RespectsMode::Null)
    std::erase_if(l.checked.diags, [](const Diag& d) { return d.code == "RespectsUnknown"; });
  emit_diags(l.checked.diags, as_json, err);
  l.ok = l.checked.ok();
  return l;
}

const LetDecl* find_let(const CheckedProgram& p, const std::string& name, bool want_comp,
                        std::string& why) {
  const LetDecl* found = nullptr;
  for (const auto& let : p.program.lets) {
    bool is_comp = std::holds_alternative<CompPtr>(let.term);
    if (!name.empty()) {
      if (let.name == name) {
        if (is_comp != want_comp) {
          why = let.name + (want_comp ? " is not a computation" : " is not a value");
          return nullptr;
        }
        return &let;
      }
      continue;
    }
    if (is_comp == want_comp) found = &let;
  }
  if (!found && !name.empty())
    why = "no definition named " + name;
  else if (!found)
    why = want_comp ? "the program has no computation definition"
                    : "the program has no value definition";
  return found;
}

struct TypedComp {
  CompPtr comp;
  CompTypePtr type;
};

std::optional<TypedComp> pick_comp(const CheckedProgram& p, const std::string& name,
                                   std::ostream& err) {
  std::string why;
  const LetDecl* let = find_let(p, name, true, why);
  if (!let) {
    err << why << "\n";
    return std::nullopt;
  }
  auto it = p.types.find(let->name);
  if (it == p.types.end() || !std::holds_alternative<CompTypePtr>(it->second)) {
    err << let->name << " did not typecheck\n";
    return std::nullopt;
  }
  return TypedComp{delta_expand(std::get<CompPtr>(let->term), p),
                   std::get<CompTypePtr>(it->second)};
}

int cmd_check(const std::string& file, const Config& cfg, RespectsMode mode, bool as_json,
              std::ostream& out, std::ostream& err) {
  Loaded l = load_checked(file, cfg, mode, as_json, err);
  if (!l.ok) return 1;
  for (const auto& let : l.checked.program.lets) {
    auto it = l.checked.types.find(let.name);
    if (it == l.checked.types.end()) continue;
    std::string t = std::holds_alternative<ValueTypePtr>(it->second)
                        ? print_type(std::get<ValueTypePtr>(it->second))
                        : print_type(std::get<CompTypePtr>(it->second));
    out << let.name << " : " << t << "\n";
  }
  return 0;
}

int cmd_run(const std::string& file, const std::string& name, size_t fuel, bool trace,
            const Config& cfg, bool as_json, std::ostream& out, std::ostream& err) {
  Loaded l = load_checked(file, cfg, RespectsMode::Pred, as_json, err);
  if (!l.ok) return 1;
  auto tc = pick_comp(l.checked, name, err);
  if (!tc) return 1;
  RunResult r = run(tc->comp, fuel ? fuel : cfg.step_bound, trace);
  if (trace) {
    for (const auto& c : r.trace) out << "  " << print_comp(c) << "\n";
  }
  out << print_run_result(r) << "\n";
  return r.kind == RunResult::Kind::FuelExhausted ? 2
         : r.kind == RunResult::Kind::Stuck       ? 1
                                                  : 0;
}

int cmd_denote(const std::string& file, const std::string& name, const Config& cfg,
               bool as_json, std::ostream& out, std::ostream& err) {
  Loaded l = load_checked(file, cfg, RespectsMode::Pred, as_json, err);
  if (!l.ok) return 1;
  auto tc = pick_comp(l.checked, name, err);
  if (!tc) return 1;
  TreePtr tree = denote_comp({}, tc->comp, tc->type, {});
  out << print_tree(tree) << "\n";
  return 0;
}

int cmd_equiv(const std::string& file, const std::string& left, const std::string& right,
              const Config& cfg, bool as_json, std::ostream& out, std::ostream& err) {
  Loaded l = load_checked(file, cfg, RespectsMode::Pred, as_json, err);
  if (!l.ok) return 1;
  auto a = pick_comp(l.checked, left, err);
  auto b = pick_comp(l.checked, right, err);
  if (!a || !b) return 1;
  if (!type_equal(a->type, b->type)) {
    err << "the definitions have different types\n";
    return 1;
  }
  TreePtr ta = denote_comp({}, a->comp, a->type, {});
  TreePtr tb = denote_comp({}, b->comp, b->type, {});
  EquivResult r =
      tree_equiv(ta, tb, a->type->theory, a->type->sig, a->type->value, cfg.bounds());
  emit_diags(r.notes, as_json, err);
  switch (r.outcome) {
    case EquivOutcome::Related:
      out << "related";
      if (!r.path.empty() || !r.path_from_b.empty())
        out << " (" << r.path.size() << "+" << r.path_from_b.size() << " rewrite steps)";
      if (r.oracle_depth) out << " (universe depth " << *r.oracle_depth << ")";
      out << "\n";
      return 0;
    case EquivOutcome::RefutedWithinBound:
      out << "not related (universe depth " << *r.oracle_depth << ")\n";
      return 1;
    case EquivOutcome::Unknown:
    default:
      out << "unknown\n";
      return 2;
  }
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_verify(const std::string& file, const std::string& name, const std::string& mode_name,
               const std::string& theory_csv, const std::string& type_text, const Config& cfg,
               bool as_json, std::ostream& out, std::ostream& err) {
  RespectsMode mode = parse_mode(mode_name);
  Loaded l = load_checked(file, cfg, RespectsMode::Null, as_json, err);
  if (!l.ok) return 1;
  std::string why;
  const LetDecl* let = find_let(l.checked, name, false, why);
  if (!let) {
    err << why << "\n";
    return 1;
  }
  ValuePtr v = delta_expand(std::get<ValuePtr>(let->term), l.checked);
  auto* h = std::get_if<VHandler>(&v->node);
  if (!h) {
    err << let->name << " is not a handler\n";
    return 1;
  }
  auto it = l.checked.types.find(let->name);
  if (it == l.checked.types.end()) {
    err << let->name << " did not typecheck\n";
    return 1;
  }
  auto* ht = std::get_if<VTHandler>(&std::get<ValueTypePtr>(it->second)->node);
  if (!ht) {
    err << let->name << " does not have a handler type\n";
    return 1;
  }
  CompTypePtr source = ht->source;
  CompTypePtr target = ht->target;
  if (!type_text.empty()) {
    ValueTypePtr given = parse_vtype(type_text, l.checked.program.decls);
    auto* gt = std::get_if<VTHandler>(&given->node);
    if (!gt) {
      err << "--type must name a handler type (C) => (D)\n";
      return 64;
    }
    source = gt->source;
    target = gt->target;
  }
  if (!theory_csv.empty()) {
    Theory overridden = l.checked.program.decls.theory_of(split_csv(theory_csv), {});
    source = ct(source->value, source->sig, overridden);
  }
  if (!type_equal(source, ht->source) || !type_equal(target, ht->target)) {
    std::vector<Diag> retyped = check_clauses({}, *h, source, target, CheckOpts{});
    std::erase_if(retyped, [](const Diag& d) { return d.code == "RespectsUnknown"; });
    if (!retyped.empty()) {
      emit_diags(retyped, as_json, err);
      err << let->name << " does not have type (" << print_type(source) << ") => ("
          << print_type(target) << ")\n";
      return 1;
    }
  }
  RespectsConfig rc;
  rc.mode = mode;
  rc.auto_depth = cfg.auto_depth;
  rc.auto_steps = cfg.auto_steps;
  rc.bounds = cfg.bounds();
  rc.proofs = &l.checked.program.proofs;
  RespectsReport rep = check_respects(*h, source, target, rc);
  emit_diags(rep.diags, as_json, err);
  switch (rep.verdict) {
    case RespectsVerdict::Yes:
      out << let->name << " respects the theory\n";
      return 0;
    case RespectsVerdict::No: {
      out << let->name << " breaks equation " << rep.counterexample->label << "\n";
      const auto& cex = *rep.counterexample;
      for (const auto& [x, val] : cex.eta) out << "  " << x << " := " << print_sem(val) << "\n";
      for (const auto& [z, table] : cex.zeta)
        out << "  " << z << " := " << print_sem(table) << "\n";
      out << "  left  " << print_tree(cex.lhs) << "\n";
      out << "  right " << print_tree(cex.rhs) << "\n";
      out << "  replayed: "
          << (replay_counterexample(*h, source, target, cex, cfg.bounds()) ? "yes" : "no")
          << "\n";
      return 1;
    }
    case RespectsVerdict::Unknown:
    default:
      out << let->name << ": unknown\n";
      return 2;
  }
}

int cmd_prove(const std::string& file, const Config& cfg, bool as_json, std::ostream& out,
              std::ostream& err) {
  Loaded l = load_checked(file, cfg, RespectsMode::Null, as_json, err);
  if (!l.ok) return 1;
  const CheckedProgram& checked = l.checked;
  RespectsConfig rc;
  rc.bounds = cfg.bounds();
  rc.proofs = &checked.program.proofs;
  auto oracle = make_respects_oracle(rc);
  CheckOpts opts{oracle.get()};
  bool all_ok = true;
  auto report = [&](const std::string& name, const std::vector<Diag>& diags) {
    if (diags.empty()) {
      out << "proof " << name << ": ok\n";
    } else {
      all_ok = false;
      out << "proof " << name << ": failed\n";
      emit_diags(diags, as_json, err);
    }
  };
  for (const auto& p : checked.program.proofs.proofs)
    report(p.name, check_named_proof(p, opts));
  for (const auto& b : checked.program.proofs.bundles) {
    for (const auto& cs : b.cases) {
      NamedProof p{b.name + "/" + cs.label, cs.context, {}, cs.goal,
                   cs.eq_only, cs.script,   cs.span};
      report(p.name, check_named_proof(p, CheckOpts{}));
    }
  }
  return all_ok ? 0 : 1;
}

int cmd_oracle(const std::string& file, const std::string& left, const std::string& right,
               int depth, const Config& cfg, bool as_json, std::ostream& out,
               std::ostream& err) {
  Loaded l = load_checked(file, cfg, RespectsMode::Pred, as_json, err);
  if (!l.ok) return 1;
  auto a = pick_comp(l.checked, left, err);
  auto b = pick_comp(l.checked, right, err);
  if (!a || !b) return 1;
  if (!type_equal(a->type, b->type)) {
    err << "the definitions have different types\n";
    return 1;
  }
  TreeOracle oracle(a->type->theory, a->type->sig, a->type->value,
                    depth ? depth : cfg.oracle_depth_cap, cfg.universe_cap);
  out << "universe " << oracle.universe_size() << " trees, " << oracle.class_count()
      << " classes at depth " << oracle.depth() << "\n";
  TreePtr ta = denote_comp({}, a->comp, a->type, {});
  TreePtr tb = denote_comp({}, b->comp, b->type, {});
  switch (oracle.query(ta, tb)) {
    case TreeOracle::Relation::Related:
      out << "related\n";
      return 0;
    case TreeOracle::Relation::NotRelated:
      out << "not related\n";
      return 1;
    case TreeOracle::Relation::OutsideUniverse:
    default:
      out << "outside the universe\n";
      return 2;
  }
}

bool apply_auto_payload(const std::string& payload, Config& cfg) {
  for (const std::string& part : split_csv(payload)) {
    auto eq = part.find('=');
    if (eq == std::string::npos) return false;
    std::string key = part.substr(0, eq);
    int value = 0;
    try {
      value = std::stoi(part.substr(eq + 1));
    } catch (const std::exception&) {
      return false;
    }
    if (value <= 0) return false;
    if (key == "depth")
      cfg.auto_depth = value;
    else if (key == "steps")
      cfg.auto_steps = static_cast<size_t>(value);
    else
      return false;
  }
  return true;
}

int cmd_selftest(const SuiteConfig& scfg, std::ostream& out) {
  auto results = run_property_suites(scfg);
  bool all_ok = true;
  for (const auto& r : results) {
    out << (r.pass ? "pass" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << "\n";
    all_ok = all_ok && r.pass;
  }
  out << (all_ok ? "all suites passed" : "some suites failed") << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"effect calculus toolchain", "loceff"};
  app.require_subcommand(1);

  std::string config_path;
  bool json_diags = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("--json-diagnostics", json_diags, "emit diagnostics as JSON");

  std::string file, name, left, right;
  std::string mode_name = "pred";
  size_t fuel = 0;
  bool trace = false;
  int depth = 0;
  uint64_t seed = 0;
  size_t count = 0;
  std::string corpus_dir;

  auto* check = app.add_subcommand("check", "typecheck a program");
  check->add_option("file", file)->required();
  check->add_option("--mode", mode_name, "respects discipline: null|free|eq|pred|auto");

  auto* run_cmd = app.add_subcommand("run", "evaluate a computation");
  run_cmd->add_option("file", file)->required();
  run_cmd->add_option("--term", name, "definition to run (default: the last computation)");
  run_cmd->add_option("--fuel", fuel, "step limit");
  run_cmd->add_flag("--trace", trace, "print intermediate states");

  auto* denote = app.add_subcommand("denote", "denote a computation as an effect tree");
  denote->add_option("file", file)->required();
  denote->add_option("--term", name, "definition to denote");

  auto* equiv = app.add_subcommand("equiv", "decide equivalence of two computations");
  equiv->add_option("file", file)->required();
  equiv->add_option("left", left)->required();
  equiv->add_option("right", right)->required();

  std::string theory_csv, type_text, auto_payload;
  auto* verify = app.add_subcommand("verify", "check that a handler respects its theory");
  verify->add_option("file", file)->required();
  verify->add_option("--handler", name, "handler definition (default: the last value)");
  verify->add_option("--mode", mode_name, "respects discipline: null|free|eq|pred|auto");
  verify->add_option("--theory", theory_csv,
                     "comma-separated equation labels overriding the source theory");
  verify->add_option("--type", type_text, "handler type overriding the ascription");
  auto* auto_opt =
      verify->add_option("--auto", auto_payload, "auto mode, optionally depth=N,steps=N");
  auto_opt->expected(0, 1);

  auto* prove = app.add_subcommand("prove", "check every proof in a program's proof files");
  prove->add_option("file", file)->required();

  auto* oracle = app.add_subcommand("oracle", "query the bounded universe oracle");
  oracle->add_option("file", file)->required();
  oracle->add_option("left", left)->required();
  oracle->add_option("right", right)->required();
  oracle->add_option("--depth", depth, "universe depth");

  auto* selftest = app.add_subcommand("selftest", "run the property suites");
  selftest->add_option("--seed", seed, "generator seed");
  selftest->add_option("--count", count, "generated terms per suite");
  selftest->add_option("--corpus", corpus_dir, "directory with example programs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 64;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (const char* env_seed = std::getenv("LOCEFF_SEED")) {
      try {
        cfg.seed = std::stoull(env_seed);
      } catch (const std::exception&) {
        err << "LOCEFF_SEED is not a number\n";
        return 64;
      }
    }
    bool as_json = json_diags || cfg.format == "json";
    if (check->parsed())
      return cmd_check(file, cfg, parse_mode(mode_name), as_json, out, err);
    if (run_cmd->parsed()) return cmd_run(file, name, fuel, trace, cfg, as_json, out, err);
    if (denote->parsed()) return cmd_denote(file, name, cfg, as_json, out, err);
    if (equiv->parsed()) return cmd_equiv(file, left, right, cfg, as_json, out, err);
    if (verify->parsed()) {
      if (auto_opt->count() > 0) {
        mode_name = "auto";
        if (!auto_payload.empty() && !apply_auto_payload(auto_payload, cfg)) {
          err << "bad --auto payload; expected depth=N,steps=N\n";
          return 64;
        }
      }
      return cmd_verify(file, name, mode_name, theory_csv, type_text, cfg, as_json, out, err);
    }
    if (prove->parsed()) return cmd_prove(file, cfg, as_json, out, err);
    if (oracle->parsed()) return cmd_oracle(file, left, right, depth, cfg, as_json, out, err);
    if (selftest->parsed()) {
      SuiteConfig scfg;
      scfg.seed = seed ? seed : cfg.seed;
      if (count) scfg.gen_count = count;
      scfg.corpus_dir = corpus_dir;
      return cmd_selftest(scfg, out);
    }
    err << "unknown subcommand\n";
    return 64;
  } catch (const Error& e) {
    return exit_for(e, json_diags, err);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace loceff
