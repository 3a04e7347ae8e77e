#include "carrot/trace.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "text_format.hpp"

namespace carrot {

using detail::Token;
using detail::parse_i64;
using detail::split_tokens;

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) +
                         (column ? ":" + std::to_string(column) : "") + ": " + message),
      message_(std::move(message)),
      line_(line),
      column_(column) {}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s.substr(1))
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string_view to_string(PptKind kind) {
  return kind == PptKind::Enter ? "ENTER" : "EXIT";
}

std::optional<PptKind> ppt_kind_from_string(std::string_view s) {
  if (s == "ENTER") return PptKind::Enter;
  if (s == "EXIT") return PptKind::Exit;
  return std::nullopt;
}

std::string ProgramPoint::label() const {
  std::string out = name;
  out += ":::";
  out += to_string(kind);
  return out;
}

std::optional<std::size_t> ProgramPoint::find_var(std::string_view var_name) const {
  for (std::size_t i = 0; i < decls.size(); ++i)
    if (decls[i].name == var_name) return i;
  return std::nullopt;
}

bool point_before(const ProgramPoint& a, const ProgramPoint& b) {
  if (a.name != b.name) return a.name < b.name;
  return a.kind < b.kind;
}

std::optional<std::size_t> Trace::find_point(std::string_view name, PptKind kind) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].kind == kind && points[i].name == name) return i;
  return std::nullopt;
}

bool structurally_equal(const Trace& a, const Trace& b) {
  if (a.run_id != b.run_id) return false;
  if (a.points.size() != b.points.size()) return false;
  if (a.samples.size() != b.samples.size()) return false;
  for (const ProgramPoint& p : a.points) {
    auto idx = b.find_point(p.name, p.kind);
    if (!idx || b.points[*idx].decls != p.decls) return false;
  }
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const Sample& sa = a.samples[i];
    const Sample& sb = b.samples[i];
    if (a.point_of(sa).label() != b.point_of(sb).label()) return false;
    if (sa.values != sb.values) return false;
  }
  return true;
}

void validate_trace(const Trace& t) {
  if (t.run_id.empty()) throw std::invalid_argument("trace run_id is empty");
  for (const ProgramPoint& p : t.points) {
    if (!is_identifier(p.name))
      throw std::invalid_argument("bad program point name '" + p.name + "'");
    for (const VarDecl& d : p.decls)
      if (!is_identifier(d.name))
        throw std::invalid_argument("bad variable name '" + d.name + "' at " + p.label());
    for (std::size_t i = 0; i < p.decls.size(); ++i)
      for (std::size_t j = i + 1; j < p.decls.size(); ++j)
        if (p.decls[i].name == p.decls[j].name)
          throw std::invalid_argument("duplicate variable '" + p.decls[i].name +
                                      "' at " + p.label());
    if (p.kind == PptKind::Exit &&
        (p.decls.empty() || p.decls.back().name != "return"))
      throw std::invalid_argument("exit point " + p.label() +
                                  " must declare 'return' as its last variable");
  }
  for (std::size_t i = 0; i < t.points.size(); ++i)
    for (std::size_t j = i + 1; j < t.points.size(); ++j)
      if (t.points[i].name == t.points[j].name && t.points[i].kind == t.points[j].kind)
        throw std::invalid_argument("duplicate program point " + t.points[i].label());
  uint64_t prev_serial = 0;
  bool first = true;
  for (const Sample& s : t.samples) {
    if (s.point >= t.points.size())
      throw std::invalid_argument("sample references undeclared point");
    if (s.values.size() != t.points[s.point].arity())
      throw std::invalid_argument("sample arity mismatch at " + t.points[s.point].label());
    if (!first && s.serial <= prev_serial)
      throw std::invalid_argument("sample serials must be strictly increasing");
    prev_serial = s.serial;
    first = false;
  }
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::map<std::string, std::size_t, std::less<>> by_label;
  bool run_seen = false;
  bool samples_started = false;
  std::optional<std::size_t> open_point;
  std::size_t open_point_line = 0;

  auto close_point = [&]() {
    if (!open_point) return;
    const ProgramPoint& p = t.points[*open_point];
    if (p.kind == PptKind::Exit &&
        (p.decls.empty() || p.decls.back().name != "return"))
      throw ParseError("exit point " + p.label() +
                           " must declare 'return' as its last variable",
                       open_point_line);
    open_point.reset();
  };

  std::size_t last_line = 0;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    last_line = line_no;
    std::vector<Token> toks = split_tokens(line);
    if (toks.empty()) {
      close_point();
      return;
    }
    if (toks[0].text[0] == '#') return;
    std::string_view directive = toks[0].text;

    if (directive == "run") {
      if (run_seen) throw ParseError("duplicate run header", line_no, toks[0].column);
      if (toks.size() != 2)
        throw ParseError("expected 'run <run_id>'", line_no, toks[0].column);
      t.run_id = std::string(toks[1].text);
      run_seen = true;
      return;
    }
    if (!run_seen)
      throw ParseError("expected 'run <run_id>' header before '" +
                           std::string(directive) + "'",
                       line_no, toks[0].column);

    if (directive == "ppt") {
      if (samples_started)
        throw ParseError("point declared after samples", line_no, toks[0].column);
      close_point();
      if (toks.size() != 2)
        throw ParseError("expected 'ppt <name>:::<ENTER|EXIT>'", line_no, toks[0].column);
      std::string_view label = toks[1].text;
      std::size_t sep = label.find(":::");
      if (sep == std::string_view::npos)
        throw ParseError("bad point label '" + std::string(label) + "'", line_no,
                         toks[1].column);
      std::string_view name = label.substr(0, sep);
      auto kind = ppt_kind_from_string(label.substr(sep + 3));
      if (!is_identifier(name) || !kind)
        throw ParseError("bad point label '" + std::string(label) + "'", line_no,
                         toks[1].column);
      if (by_label.contains(label))
        throw ParseError("duplicate point declaration " + std::string(label), line_no,
                         toks[1].column);
      by_label.emplace(std::string(label), t.points.size());
      t.points.push_back({std::string(name), *kind, {}});
      open_point = t.points.size() - 1;
      open_point_line = line_no;
      return;
    }
    if (directive == "var") {
      if (!open_point)
        throw ParseError("'var' outside a ppt block", line_no, toks[0].column);
      if (toks.size() != 3)
        throw ParseError("expected 'var <name> int'", line_no, toks[0].column);
      if (!is_identifier(toks[1].text))
        throw ParseError("bad variable name '" + std::string(toks[1].text) + "'",
                         line_no, toks[1].column);
      if (toks[2].text != "int")
        throw ParseError("unknown value type '" + std::string(toks[2].text) + "'",
                         line_no, toks[2].column);
      ProgramPoint& p = t.points[*open_point];
      if (p.find_var(toks[1].text))
        throw ParseError("duplicate variable '" + std::string(toks[1].text) + "' at " +
                             p.label(),
                         line_no, toks[1].column);
      p.decls.push_back({std::string(toks[1].text)});
      return;
    }
    if (directive == "sample") {
      close_point();
      samples_started = true;
      if (toks.size() < 2)
        throw ParseError("expected 'sample <point> <values...>'", line_no,
                         toks[0].column);
      auto it = by_label.find(toks[1].text);
      if (it == by_label.end())
        throw ParseError("undeclared program point " + std::string(toks[1].text),
                         line_no, toks[1].column);
      const ProgramPoint& p = t.points[it->second];
      if (toks.size() - 2 != p.arity())
        throw ParseError("sample for " + p.label() + " has " +
                             std::to_string(toks.size() - 2) + " values, expected " +
                             std::to_string(p.arity()),
                         line_no, toks[1].column);
      Sample s;
      s.point = it->second;
      s.serial = t.samples.size();
      s.values.reserve(p.arity());
      for (std::size_t i = 2; i < toks.size(); ++i)
        s.values.push_back(parse_i64(toks[i], line_no));
      t.samples.push_back(std::move(s));
      return;
    }
    throw ParseError("unknown directive '" + std::string(directive) + "'", line_no,
                     toks[0].column);
  });
  close_point();
  if (!run_seen) throw ParseError("missing 'run <run_id>' header", last_line ? last_line : 1);
  return t;
}

std::string write_trace(const Trace& t) {
  validate_trace(t);
  std::vector<std::size_t> order(t.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return point_before(t.points[a], t.points[b]);
  });

  std::string out = "run " + t.run_id + "\n";
  for (std::size_t idx : order) {
    const ProgramPoint& p = t.points[idx];
    out += "\nppt " + p.label() + "\n";
    for (const VarDecl& d : p.decls) out += "var " + d.name + " int\n";
  }
  if (!t.samples.empty()) {
    out += "\n";
    for (const Sample& s : t.samples) {
      out += "sample " + t.point_of(s).label();
      for (int64_t v : s.values) out += " " + std::to_string(v);
      out += "\n";
    }
  }
  return out;
}

}  // namespace carrot
