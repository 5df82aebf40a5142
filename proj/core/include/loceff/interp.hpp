#pragma once

#include "loceff/syntax.hpp"

namespace loceff {

struct StepNext {
  CompPtr comp;
};
struct StepValue {
  ValuePtr value;
};
// An operation call reached the top with nothing left to handle it.
struct StepOp {
  std::string op;
  ValuePtr arg;
  std::string cont_hint;
  CompPtr cont;
};
struct StepStuck {
  Diag diag;
};

using StepResult = std::variant<StepNext, StepValue, StepOp, StepStuck>;

// One small step of a closed computation.
StepResult step(const CompPtr& c);

struct RunResult {
  enum class Kind { Value, OpStopped, Stuck, FuelExhausted } kind;
  ValuePtr value;            // Kind::Value
  std::string op;            // Kind::OpStopped
  ValuePtr op_arg;           // Kind::OpStopped
  CompPtr last;              // the computation when stopping
  Diag diag;                 // Kind::Stuck
  size_t steps = 0;
  std::vector<CompPtr> trace;  // intermediate states, only when requested
};

RunResult run(const CompPtr& c, size_t fuel = 10000, bool want_trace = false);

std::string print_run_result(const RunResult& r);

}  // namespace loceff
