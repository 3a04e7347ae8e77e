#include "carrot/minilang.hpp"

#include <stdexcept>

namespace carrot::mini {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Halted: return "halted";
    case RunStatus::StepBudgetExceeded: return "step budget exceeded";
    case RunStatus::CallDepthExceeded: return "call depth exceeded";
  }
  return "?";
}

namespace {

struct HaltSignal {};
struct BudgetExceeded {};
struct DepthExceeded {};

int64_t wrap_add(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) + uint64_t(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) - uint64_t(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) * uint64_t(b));
}

struct Interp {
  const Program& prog;
  const InterpOptions& opts;
  Trace* trace;  // null when tracing is off
  uint64_t steps = 0;
  uint64_t serial = 0;
  std::size_t depth = 0;

  void step() {
    if (++steps > opts.step_budget) throw BudgetExceeded{};
  }

  void emit(std::size_t point, std::vector<int64_t> values) {
    if (trace) trace->samples.push_back({point, std::move(values), serial++});
  }

  int64_t eval(const Expr& e, std::vector<int64_t>& frame) {
    step();
    switch (e.kind) {
      case Expr::Kind::Int:
        return e.value;
      case Expr::Kind::Var:
        return frame[e.slot];
      case Expr::Kind::Call: {
        std::vector<int64_t> args;
        args.reserve(e.args.size());
        for (const ExprPtr& a : e.args) args.push_back(eval(*a, frame));
        return call(e.callee, std::move(args));
      }
      case Expr::Kind::Binary: {
        const int64_t l = eval(*e.lhs, frame);
        const int64_t r = eval(*e.rhs, frame);
        switch (e.op) {
          case BinOp::Add: return wrap_add(l, r);
          case BinOp::Sub: return wrap_sub(l, r);
          case BinOp::Mul: return wrap_mul(l, r);
          case BinOp::Eq: return l == r;
          case BinOp::Ne: return l != r;
          case BinOp::Lt: return l < r;
          case BinOp::Le: return l <= r;
          case BinOp::Gt: return l > r;
          case BinOp::Ge: return l >= r;
        }
        return 0;
      }
    }
    return 0;
  }

  std::optional<int64_t> exec_block(const Block& b, std::vector<int64_t>& frame) {
    for (const StmtPtr& s : b.stmts)
      if (auto r = exec_stmt(*s, frame)) return r;
    return std::nullopt;
  }

  std::optional<int64_t> exec_stmt(const Stmt& s, std::vector<int64_t>& frame) {
    step();
    switch (s.kind) {
      case Stmt::Kind::Let:
      case Stmt::Kind::Assign:
        frame[s.slot] = eval(*s.expr, frame);
        return std::nullopt;
      case Stmt::Kind::If:
        if (eval(*s.expr, frame) != 0) return exec_block(s.then_block, frame);
        return exec_block(s.else_block, frame);
      case Stmt::Kind::Return:
        return eval(*s.expr, frame);
      case Stmt::Kind::Halt:
        throw HaltSignal{};
    }
    return std::nullopt;
  }

  int64_t call(std::size_t fi, std::vector<int64_t> args) {
    if (++depth > opts.max_call_depth) throw DepthExceeded{};
    step();
    const FunctionDef& fn = prog.functions[fi];
    std::vector<int64_t> frame(fn.n_slots, 0);
    for (std::size_t i = 0; i < args.size(); ++i) frame[i] = args[i];
    emit(2 * fi, std::move(args));
    // the return-check pass guarantees a value here
    const int64_t ret = *exec_block(fn.body, frame);
    std::vector<int64_t> exit_values(frame.begin(),
                                     frame.begin() + std::ptrdiff_t(fn.params.size()));
    exit_values.push_back(ret);
    emit(2 * fi + 1, std::move(exit_values));
    --depth;
    return ret;
  }
};

const FunctionDef& resolve_entry(const Program& program, const InputCase& input) {
  auto fi = program.find_function(input.entry);
  if (!fi)
    throw std::invalid_argument("unknown entry function '" + input.entry + "'");
  const FunctionDef& fn = program.functions[*fi];
  if (fn.params.size() != input.args.size())
    throw std::invalid_argument("'" + fn.name + "' takes " +
                                std::to_string(fn.params.size()) + " argument(s), " +
                                std::to_string(input.args.size()) + " given");
  return fn;
}

// ENTER/EXIT points for every function, called or not: points are a
// static table, observation counts are what distinguish exercised code.
void declare_points(Trace& trace, const Program& program) {
  for (const FunctionDef& fn : program.functions) {
    ProgramPoint enter{fn.name, PptKind::Enter, {}};
    for (const std::string& p : fn.params) enter.decls.push_back({p});
    ProgramPoint exit = enter;
    exit.kind = PptKind::Exit;
    exit.decls.push_back({"return"});
    trace.points.push_back(std::move(enter));
    trace.points.push_back(std::move(exit));
  }
}

}  // namespace

RunOutcome run_traced(const Program& program, const InputCase& input,
                      std::string run_id, const InterpOptions& options) {
  const FunctionDef& entry = resolve_entry(program, input);
  RunOutcome out;
  out.trace.run_id = std::move(run_id);
  if (options.tracing) declare_points(out.trace, program);
  Interp interp{program, options, options.tracing ? &out.trace : nullptr};
  try {
    out.result = interp.call(std::size_t(&entry - program.functions.data()),
                             input.args);
    out.status = RunStatus::Ok;
  } catch (const HaltSignal&) {
    out.status = RunStatus::Halted;
  } catch (const BudgetExceeded&) {
    out.status = RunStatus::StepBudgetExceeded;
  } catch (const DepthExceeded&) {
    out.status = RunStatus::CallDepthExceeded;
  }
  return out;
}

std::vector<Trace> CorpusResult::good_traces() const {
  std::vector<Trace> out;
  for (const LabeledRun& r : runs)
    if (r.good) out.push_back(r.outcome.trace);
  return out;
}

std::vector<Trace> CorpusResult::bad_traces() const {
  std::vector<Trace> out;
  for (const LabeledRun& r : runs)
    if (!r.good) out.push_back(r.outcome.trace);
  return out;
}

std::size_t CorpusResult::good_count() const {
  std::size_t n = 0;
  for (const LabeledRun& r : runs) n += r.good;
  return n;
}

std::size_t CorpusResult::bad_count() const { return runs.size() - good_count(); }

CorpusResult run_corpus(const Program& program, std::span<const InputCase> cases,
                        LabelRule rule, const InterpOptions& options) {
  auto case_name = [](std::size_t index, const InputCase& c) {
    std::string name = "case " + std::to_string(index + 1);
    if (c.line) name += " (line " + std::to_string(c.line) + ")";
    return name;
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (rule == LabelRule::Oracle && !cases[i].expected)
      throw std::invalid_argument(case_name(i, cases[i]) +
                                  ": missing expected value under oracle labeling");
    try {
      resolve_entry(program, cases[i]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(case_name(i, cases[i]) + ": " + e.what());
    }
  }
  CorpusResult result;
  result.runs.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    RunOutcome outcome = run_traced(program, cases[i], "pending", options);
    const bool good =
        outcome.status == RunStatus::Ok &&
        (rule == LabelRule::AssumeGood || outcome.result == cases[i].expected);
    outcome.trace.run_id =
        "run_" + std::to_string(i + 1) + (good ? "_good" : "_bad");
    result.runs.push_back({i, good, std::move(outcome)});
  }
  return result;
}

}  // namespace carrot::mini
