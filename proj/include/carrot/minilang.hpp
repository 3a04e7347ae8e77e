#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carrot/trace.hpp"

namespace carrot::mini {

struct SrcPos {
  std::size_t line = 0;  // 1-based
  std::size_t col = 0;
};

/// Lex, parse, or static-check failure, with source position.
class LangError : public std::runtime_error {
public:
  LangError(std::string message, SrcPos pos);

  SrcPos pos() const { return pos_; }
  const std::string& message() const { return message_; }

private:
  std::string message_;
  SrcPos pos_;
};

enum class BinOp : uint8_t { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind : uint8_t { Int, Var, Call, Binary };
  Kind kind = Kind::Int;
  SrcPos pos;
  int64_t value = 0;        // Int
  std::size_t slot = 0;     // Var: resolved local slot
  std::string name;         // Var/Call: source spelling (for messages)
  std::size_t callee = 0;   // Call: index into Program::functions
  std::vector<ExprPtr> args;
  BinOp op = BinOp::Add;    // Binary
  ExprPtr lhs, rhs;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
};

struct Stmt {
  enum class Kind : uint8_t { Let, Assign, If, Return, Halt };
  Kind kind = Kind::Halt;
  SrcPos pos;
  std::size_t slot = 0;  // Let/Assign target
  ExprPtr expr;          // Let/Assign value, If condition, Return value
  Block then_block;      // If
  Block else_block;      // If (may be empty)
};

struct FunctionDef {
  std::string name;
  SrcPos pos;
  std::vector<std::string> params;
  std::size_t n_slots = 0;  // params plus lets; frame size
  Block body;
};

struct Program {
  std::vector<FunctionDef> functions;

  std::optional<std::size_t> find_function(std::string_view name) const;
};

/// Grammar:
///   program := fn+
///   fn      := "fn" name "(" params? ")" block
///   block   := "{" stmt* "}"
///   stmt    := "let" name "=" expr ";" | name "=" expr ";"
///            | "if" "(" expr ")" block ("else" block)?
///            | "return" expr ";" | "halt" ";"
///   expr    := cmp ; cmp := add (cmpop add)* ; add := mul (("+"|"-") mul)*
///   mul     := atom ("*" atom)* ; atom := int | name | name "(" args ")" | "(" expr ")"
/// Comparisons yield 0/1. `#` starts a comment. There is no unary minus;
/// write `0 - x`. Static checks: duplicate function or variable names,
/// undefined functions/variables, call arity, and that every control path
/// of every function ends in `return` or `halt`.
Program parse_program(std::string_view text);

struct InputCase {
  std::string entry;
  std::vector<int64_t> args;
  std::optional<int64_t> expected;
  std::size_t line = 0;  // 1-based line in the case file, 0 if synthetic
};

/// One case per line: `arg1 arg2 ... -> expected`, the arrow clause
/// optional. `#` comments and blank lines are skipped. Every case gets
/// the given entry function name.
std::vector<InputCase> parse_cases(std::string_view text, std::string_view entry);

enum class RunStatus : uint8_t { Ok, Halted, StepBudgetExceeded, CallDepthExceeded };

std::string_view to_string(RunStatus status);

struct InterpOptions {
  uint64_t step_budget = 1'000'000;  // AST nodes evaluated per run
  std::size_t max_call_depth = 8192;
  bool tracing = true;
};

/// `trace` holds whatever was emitted before the run ended, so aborted
/// runs still yield a usable (if ENTER-heavy) trace.
struct RunOutcome {
  RunStatus status = RunStatus::Ok;
  std::optional<int64_t> result;
  Trace trace;
};

/// Evaluates with wrapping 64-bit arithmetic, emitting an ENTER sample
/// (formals) at each call and an EXIT sample (formals' current values +
/// return) at each return. Throws std::invalid_argument on a case that
/// does not fit the program (unknown entry, wrong arity).
RunOutcome run_traced(const Program& program, const InputCase& input,
                      std::string run_id, const InterpOptions& options = {});

enum class LabelRule : uint8_t {
  Oracle,     // good iff result == expected; every case must carry expected
  AssumeGood  // good iff the run completed normally
};

struct LabeledRun {
  std::size_t case_index = 0;  // 0-based position in the input list
  bool good = false;
  RunOutcome outcome;
};

struct CorpusResult {
  std::vector<LabeledRun> runs;

  std::vector<Trace> good_traces() const;
  std::vector<Trace> bad_traces() const;
  std::size_t good_count() const;
  std::size_t bad_count() const;
};

/// Runs every case and labels it. Trace run_ids follow the on-disk
/// convention: `run_<1-based index>_<good|bad>`. Abnormal terminations
/// (halt, exhausted budget or depth) are always bad.
CorpusResult run_corpus(const Program& program, std::span<const InputCase> cases,
                        LabelRule rule, const InterpOptions& options = {});

}  // namespace carrot::mini
