#include "loceff/interp.hpp"

namespace loceff {

namespace {

StepStuck stuck(std::string message, Span span) {
  return StepStuck{Diag{"E-STUCK", std::move(message), span}};
}

}  // namespace

StepResult step(const CompPtr& c) {
  return std::visit(
      [&](const auto& node) -> StepResult {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CIf>) {
          if (auto* b = std::get_if<VBool>(&node.cond->node))
            return StepNext{b->value ? node.then_c : node.else_c};
          return stuck("if applied to a non-boolean value " + print_value(node.cond), c->span);
        } else if constexpr (std::is_same_v<T, CApply>) {
          if (auto* fn = std::get_if<VLambda>(&node.fn->node))
            return StepNext{open_comp(fn->body, {node.arg})};
          return stuck("application of a non-function value " + print_value(node.fn), c->span);
        } else if constexpr (std::is_same_v<T, CReturn>) {
          return StepValue{node.value};
        } else if constexpr (std::is_same_v<T, COp>) {
          return StepOp{node.op, node.arg, node.cont_hint, node.cont};
        } else if constexpr (std::is_same_v<T, CDo>) {
          if (auto* ret = std::get_if<CReturn>(&node.first->node))
            return StepNext{open_comp(node.rest, {ret->value})};
          if (auto* op = std::get_if<COp>(&node.first->node)) {
            return StepNext{mk_op(op->op, op->arg, op->cont_hint,
                                  mk_do(node.hint, op->cont, node.rest, c->span), c->span)};
          }
          StepResult inner = step(node.first);
          if (auto* next = std::get_if<StepNext>(&inner))
            return StepNext{mk_do(node.hint, next->comp, node.rest, c->span)};
          return inner;
        } else if constexpr (std::is_same_v<T, CHandle>) {
          auto* h = std::get_if<VHandler>(&node.handler->node);
          if (!h)
            return stuck("handling with a non-handler value " + print_value(node.handler),
                         c->span);
          if (auto* ret = std::get_if<CReturn>(&node.body->node))
            return StepNext{open_comp(h->ret_body, {ret->value})};
          if (auto* op = std::get_if<COp>(&node.body->node)) {
            auto it = h->clauses.find(op->op);
            if (it == h->clauses.end())
              return stuck("no clause for operation " + op->op, c->span);
            ValuePtr resume = mk_lambda(op->cont_hint,
                                        mk_handle(node.handler, op->cont, c->span), c->span);
            return StepNext{open_comp(it->second.body, {resume, op->arg})};
          }
          StepResult inner = step(node.body);
          if (auto* next = std::get_if<StepNext>(&inner))
            return StepNext{mk_handle(node.handler, next->comp, c->span)};
          return inner;
        } else {
          return stuck("hole has no dynamics", c->span);
        }
      },
      c->node);
}

RunResult run(const CompPtr& c, size_t fuel, bool want_trace) {
  RunResult r;
  CompPtr cur = c;
  for (;;) {
    if (want_trace) r.trace.push_back(cur);
    StepResult s = step(cur);
    if (auto* next = std::get_if<StepNext>(&s)) {
      if (r.steps >= fuel) {
        r.kind = RunResult::Kind::FuelExhausted;
        r.last = cur;
        return r;
      }
      ++r.steps;
      cur = next->comp;
      continue;
    }
    r.last = cur;
    if (auto* val = std::get_if<StepValue>(&s)) {
      r.kind = RunResult::Kind::Value;
      r.value = val->value;
    } else if (auto* op = std::get_if<StepOp>(&s)) {
      r.kind = RunResult::Kind::OpStopped;
      r.op = op->op;
      r.op_arg = op->arg;
    } else {
      r.kind = RunResult::Kind::Stuck;
      r.diag = std::get<StepStuck>(s).diag;
    }
    return r;
  }
}

std::string print_run_result(const RunResult& r) {
  switch (r.kind) {
    case RunResult::Kind::Value:
      return "return " + print_value(r.value);
    case RunResult::Kind::OpStopped:
      return "opStopped(" + r.op + ", " + print_value(r.op_arg) + ")";
    case RunResult::Kind::Stuck:
      return "stuck: " + r.diag.message;
    case RunResult::Kind::FuelExhausted:
      return "fuel exhausted after " + std::to_string(r.steps) + " steps";
  }
  return "";
}

}  // namespace loceff
