#pragma once

#include <iosfwd>

#include "loceff/generator.hpp"
#include "loceff/parser.hpp"

namespace loceff {

struct Config {
  size_t step_bound = 10000;
  size_t size_bound = 4096;
  int oracle_depth_cap = 3;
  size_t universe_cap = 100000;
  int auto_depth = 2;
  size_t auto_steps = 10000;
  uint64_t seed = 42;
  std::string format = "human";  // or "json"

  EquivBounds bounds() const;
};

Config load_config(const std::string& path);
Config config_from_json(const std::string& text, const std::string& origin);

// Parse a program file and its proof imports (paths relative to the file).
Program load_program(const std::string& path);

// Typecheck declarations and lets in order; on success fills `types`.
struct CheckedProgram {
  Program program;
  std::map<std::string, std::variant<ValueTypePtr, CompTypePtr>> types;
  std::vector<Diag> diags;
  bool ok() const { return diags.empty(); }
};

CheckedProgram check_program(Program program, const Config& cfg,
                             RespectsMode mode = RespectsMode::Pred);

// Replace value-level let names in a term by their definitions.
ValuePtr delta_expand(const ValuePtr& v, const CheckedProgram& p);
CompPtr delta_expand(const CompPtr& c, const CheckedProgram& p);

// Exit codes: 0 yes/related/ok, 1 no/unrelated, 2 unknown, 64 usage,
// 66 missing input, 70 internal error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loceff
