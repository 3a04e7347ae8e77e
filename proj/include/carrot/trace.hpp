#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carrot {

/// Error raised while reading any of the line-oriented text formats.
/// Always carries a 1-based line number; column is 0 when unknown.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t line, std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

bool is_identifier(std::string_view s);

enum class PptKind : uint8_t { Enter, Exit };

std::string_view to_string(PptKind kind);
std::optional<PptKind> ppt_kind_from_string(std::string_view s);

struct VarDecl {
  std::string name;  // value type is int64 in v1, so no type field yet

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct ProgramPoint {
  std::string name;
  PptKind kind = PptKind::Enter;
  std::vector<VarDecl> decls;

  std::string label() const;  // "name:::ENTER" / "name:::EXIT"
  std::size_t arity() const { return decls.size(); }
  std::optional<std::size_t> find_var(std::string_view var_name) const;

  friend bool operator==(const ProgramPoint&, const ProgramPoint&) = default;
};

// Orders points by (name, kind) with Enter before Exit.
bool point_before(const ProgramPoint& a, const ProgramPoint& b);

struct Sample {
  std::size_t point = 0;  // index into Trace::points
  std::vector<int64_t> values;
  uint64_t serial = 0;
};

struct Trace {
  std::string run_id;
  std::vector<ProgramPoint> points;
  std::vector<Sample> samples;

  const ProgramPoint& point_of(const Sample& s) const { return points[s.point]; }
  std::optional<std::size_t> find_point(std::string_view name, PptKind kind) const;
};

/// Point order is irrelevant (points are a table); sample order is not.
/// Sample serials are compared positionally, so renumbered serials still match.
bool structurally_equal(const Trace& a, const Trace& b);

/// Throws std::invalid_argument when a Trace breaks its invariants.
void validate_trace(const Trace& t);

/// Trace text format:
///
///   # comment
///   run <run_id>
///   ppt <name>:::<ENTER|EXIT>
///   var <name> int
///   (blank line ends the ppt block)
///   sample <name>:::<ENTER|EXIT> <v1> ... <vk>
///
/// All ppt blocks precede all sample lines. Exit points must declare
/// `return` as their last variable.
Trace parse_trace(std::string_view text);

/// Canonical form: points sorted by (name, kind), samples in serial order,
/// single-space separators, LF endings. parse(write(t)) == t structurally.
std::string write_trace(const Trace& t);

}  // namespace carrot
