#include "carrot/spectrum.hpp"

#include <algorithm>
#include <map>

#include "text_format.hpp"

namespace carrot {

using detail::Token;
using detail::parse_i64;
using detail::parse_u64;
using detail::split_tokens;

std::optional<std::size_t> PointTable::find(std::string_view name, PptKind kind) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].kind == kind && points[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> PointTable::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].label() == label) return i;
  return std::nullopt;
}

PointTable PointTable::of_trace(const Trace& t) {
  PointTable table;
  table.points = t.points;
  std::sort(table.points.begin(), table.points.end(), point_before);
  return table;
}

void check_compatible(const PointTable& a, const PointTable& b) {
  for (const ProgramPoint& p : b.points) {
    auto idx = a.find(p.name, p.kind);
    if (idx && a.points[*idx].decls != p.decls)
      throw CompatibilityError("point " + p.label() +
                               " is declared with different variables across runs");
  }
}

PointTable merge_tables(const PointTable& a, const PointTable& b) {
  check_compatible(a, b);
  PointTable merged = a;
  for (const ProgramPoint& p : b.points)
    if (!merged.find(p.name, p.kind)) merged.points.push_back(p);
  std::sort(merged.points.begin(), merged.points.end(), point_before);
  return merged;
}

uint64_t Spectrum::live_count() const {
  uint64_t n = 0;
  for (const PointSummary& ps : by_point) n += ps.live.size();
  return n;
}

uint64_t Model::live_count() const {
  uint64_t n = 0;
  for (const PointSummary& ps : by_point) n += ps.live.size();
  return n;
}

RunEngine::RunEngine(AnalysisConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<std::size_t> RunEngine::find(const ProgramPoint& p) const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].kind == p.kind && points_[i].name == p.name) return i;
  return std::nullopt;
}

void RunEngine::absorb_trace(const Trace& t) {
  // index of each trace point in this engine
  std::vector<std::size_t> remap(t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const ProgramPoint& p = t.points[i];
    if (auto idx = find(p)) {
      if (points_[*idx].decls != p.decls)
        throw CompatibilityError("point " + p.label() +
                                 " is declared with different variables across runs");
      remap[i] = *idx;
    } else {
      points_.push_back(p);
      engines_.emplace_back(p, cfg_);
      remap[i] = points_.size() - 1;
    }
  }
  for (const Sample& s : t.samples) engines_[remap[s.point]].observe(s.values);
}

namespace {

PointSummary snapshot_point(const PointEngine& pe) {
  PointSummary out;
  out.samples_seen = pe.samples_seen();
  if (pe.samples_seen() > 0) out.live = pe.live();
  out.vsets = pe.value_sets();
  out.psets = pe.pair_sets();
  return out;
}

template <typename Snapshot>
void snapshot_sorted(const std::vector<ProgramPoint>& points,
                     const std::vector<PointEngine>& engines, PointTable& table,
                     std::vector<PointSummary>& by_point, Snapshot&& snap) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return point_before(points[a], points[b]);
  });
  for (std::size_t idx : order) {
    table.points.push_back(points[idx]);
    by_point.push_back(snap(engines[idx]));
  }
}

}  // namespace

Spectrum RunEngine::to_spectrum(std::string run_id) const {
  Spectrum s;
  s.run_id = std::move(run_id);
  s.config = cfg_;
  snapshot_sorted(points_, engines_, s.table, s.by_point, snapshot_point);
  return s;
}

Model RunEngine::to_model(uint64_t runs_absorbed) const {
  Model m;
  m.config = cfg_;
  m.runs_absorbed = runs_absorbed;
  snapshot_sorted(points_, engines_, m.table, m.by_point, snapshot_point);
  return m;
}

Spectrum compute_spectrum(const Trace& t, const AnalysisConfig& cfg) {
  RunEngine engine(cfg);
  engine.absorb_trace(t);
  return engine.to_spectrum(t.run_id);
}

Model model_of_spectrum(const Spectrum& s) {
  Model m;
  m.config = s.config;
  m.table = s.table;
  m.by_point = s.by_point;
  m.runs_absorbed = 1;
  return m;
}

namespace {

std::vector<InvariantInstance> intersect_live(const std::vector<InvariantInstance>& a,
                                              const std::vector<InvariantInstance>& b,
                                              const ProgramPoint& ppt) {
  std::vector<InvariantInstance> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out), InvariantOrder{&ppt});
  return out;
}

void union_sets(std::vector<ValueSet>& into, const std::vector<ValueSet>& from) {
  for (std::size_t i = 0; i < into.size(); ++i)
    into[i].values.insert(from[i].values.begin(), from[i].values.end());
}

void union_pairs(std::vector<PairValueSet>& into, const std::vector<PairValueSet>& from) {
  for (std::size_t i = 0; i < into.size(); ++i)
    into[i].pairs.insert(from[i].pairs.begin(), from[i].pairs.end());
}

/// Pointwise combination. A point observed on only one side keeps that
/// side's summary: a run that never reached the point abstains rather
/// than vetoing the intersection.
PointSummary merge_point(const PointSummary& a, const PointSummary& b,
                         const ProgramPoint& ppt) {
  if (!b.observed()) return a;
  if (!a.observed()) return b;
  PointSummary out;
  out.samples_seen = a.samples_seen + b.samples_seen;
  out.live = intersect_live(a.live, b.live, ppt);
  out.vsets = a.vsets;
  union_sets(out.vsets, b.vsets);
  out.psets = a.psets;
  union_pairs(out.psets, b.psets);
  return out;
}

void require_same_config(const AnalysisConfig& a, const AnalysisConfig& b) {
  if (!(a == b))
    throw CompatibilityError(
        "spectra were computed under different configurations (schemata or sets)");
}

}  // namespace

Model merge_models(Model a, const Model& b) {
  require_same_config(a.config, b.config);
  PointTable merged = merge_tables(a.table, b.table);
  std::vector<PointSummary> by_point;
  by_point.reserve(merged.points.size());
  const PointSummary empty;
  for (const ProgramPoint& p : merged.points) {
    auto ia = a.table.find(p.name, p.kind);
    auto ib = b.table.find(p.name, p.kind);
    const PointSummary& sa = ia ? a.by_point[*ia] : empty;
    const PointSummary& sb = ib ? b.by_point[*ib] : empty;
    if (!ia)
      by_point.push_back(sb);
    else if (!ib)
      by_point.push_back(sa);
    else
      by_point.push_back(merge_point(sa, sb, p));
  }
  a.table = std::move(merged);
  a.by_point = std::move(by_point);
  a.runs_absorbed += b.runs_absorbed;
  return a;
}

Model absorb(Model m, const Spectrum& s) { return merge_models(std::move(m), model_of_spectrum(s)); }

Model build_model(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw std::invalid_argument("build_model needs at least one spectrum");
  Model m = model_of_spectrum(spectra[0]);
  for (std::size_t i = 1; i < spectra.size(); ++i) m = absorb(std::move(m), spectra[i]);
  return m;
}

Model stream_model(std::span<const Trace> traces, const AnalysisConfig& cfg) {
  RunEngine engine(cfg);
  for (const Trace& t : traces) engine.absorb_trace(t);
  return engine.to_model(traces.size());
}

std::string render_invariant(const InvariantInstance& inv, const ProgramPoint& ppt) {
  const std::string& a = ppt.decls[inv.slot_a].name;
  switch (inv.kind) {
    case SchemaKind::Equality: return a + " == " + ppt.decls[inv.slot_b].name;
    case SchemaKind::LessThan: return a + " < " + ppt.decls[inv.slot_b].name;
    case SchemaKind::Sum:
      return a + " + " + ppt.decls[inv.slot_b].name + " == " +
             std::to_string(inv.learned_const.value_or(0));
    case SchemaKind::ConstantEquality:
      return a + " == " + std::to_string(inv.learned_const.value_or(0));
  }
  return "?";
}

namespace {

void write_summary_body(std::string& out, const PointTable& table,
                        const std::vector<PointSummary>& by_point,
                        const AnalysisConfig& cfg) {
  out += "schemata " + cfg.schemas.to_string() + "\n";
  out += std::string("sets vsets=") + (cfg.value_sets ? "on" : "off") +
         " psets=" + (cfg.pair_sets ? "on" : "off") + "\n";
  for (const ProgramPoint& p : table.points) {
    out += "\nppt " + p.label() + "\n";
    for (const VarDecl& d : p.decls) out += "var " + d.name + " int\n";
  }
  out += "\n";
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const ProgramPoint& p = table.points[i];
    const PointSummary& ps = by_point[i];
    const std::string label = p.label();
    out += "obs " + label + " " + std::to_string(ps.samples_seen) + "\n";
    for (const InvariantInstance& inv : ps.live) {
      out += "inv " + label + " " + std::string(schema_name(inv.kind)) + " " +
             p.decls[inv.slot_a].name;
      if (inv.is_pair()) out += " " + p.decls[inv.slot_b].name;
      if (inv.learned_const) out += " " + std::to_string(*inv.learned_const);
      out += "\n";
    }
    // value sets in variable-name order to keep output canonical
    std::vector<std::size_t> vorder(ps.vsets.size());
    for (std::size_t k = 0; k < vorder.size(); ++k) vorder[k] = k;
    std::sort(vorder.begin(), vorder.end(), [&](std::size_t x, std::size_t y) {
      return p.decls[ps.vsets[x].var].name < p.decls[ps.vsets[y].var].name;
    });
    for (std::size_t k : vorder) {
      const ValueSet& vs = ps.vsets[k];
      if (!ps.observed()) continue;
      out += "vset " + label + " " + p.decls[vs.var].name;
      for (int64_t v : vs.values) out += " " + std::to_string(v);
      out += "\n";
    }
    for (const PairValueSet& pvs : ps.psets) {
      if (!ps.observed()) continue;
      out += "pset " + label + " " + p.decls[pvs.var_a].name + " " +
             p.decls[pvs.var_b].name;
      for (const auto& [v, w] : pvs.pairs)
        out += " (" + std::to_string(v) + "," + std::to_string(w) + ")";
      out += "\n";
    }
  }
}

struct ParsedSummary {
  bool is_model = false;
  std::string run_id;
  uint64_t runs_absorbed = 0;
  AnalysisConfig config;
  PointTable table;
  std::vector<PointSummary> by_point;
};

std::pair<int64_t, int64_t> parse_pair_token(const Token& tok, std::size_t line_no) {
  std::string_view s = tok.text;
  if (s.size() < 5 || s.front() != '(' || s.back() != ')')
    throw ParseError("expected pair '(v,w)', got '" + std::string(s) + "'", line_no,
                     tok.column);
  s = s.substr(1, s.size() - 2);
  std::size_t comma = s.find(',');
  if (comma == std::string_view::npos)
    throw ParseError("expected pair '(v,w)', got '" + std::string(tok.text) + "'",
                     line_no, tok.column);
  Token left{s.substr(0, comma), tok.column + 1};
  Token right{s.substr(comma + 1), tok.column + comma + 2};
  return {parse_i64(left, line_no), parse_i64(right, line_no)};
}

ParsedSummary parse_summary(std::string_view text, bool expect_model) {
  ParsedSummary out;
  bool head_seen = false, schemata_seen = false, sets_seen = false;
  std::optional<std::size_t> open_point;
  std::size_t open_point_line = 0;
  std::map<std::string, std::size_t, std::less<>> by_label;
  // data lines are held back until the point table is complete and sorted
  std::vector<std::string> data_lines;
  std::vector<std::size_t> data_line_nos;

  auto close_point = [&]() {
    if (!open_point) return;
    const ProgramPoint& p = out.table.points[*open_point];
    if (p.kind == PptKind::Exit && (p.decls.empty() || p.decls.back().name != "return"))
      throw ParseError("exit point " + p.label() +
                           " must declare 'return' as its last variable",
                       open_point_line);
    open_point.reset();
  };

  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<Token> toks = split_tokens(line);
    if (toks.empty()) {
      close_point();
      return;
    }
    if (toks[0].text[0] == '#') return;
    std::string_view directive = toks[0].text;

    if (directive == "spectrum" || directive == "model") {
      if (head_seen) throw ParseError("duplicate header line", line_no, toks[0].column);
      bool is_model = directive == "model";
      if (is_model != expect_model)
        throw ParseError(std::string("expected a ") + (expect_model ? "model" : "spectrum") +
                             " file, found '" + std::string(directive) + "'",
                         line_no, toks[0].column);
      if (toks.size() != 2)
        throw ParseError("expected '" + std::string(directive) + " <value>'", line_no,
                         toks[0].column);
      out.is_model = is_model;
      if (is_model)
        out.runs_absorbed = parse_u64(toks[1], line_no);
      else
        out.run_id = std::string(toks[1].text);
      head_seen = true;
      return;
    }
    if (!head_seen)
      throw ParseError("expected 'spectrum <run_id>' or 'model <runs>' header", line_no,
                       toks[0].column);

    if (directive == "schemata") {
      if (toks.size() != 2) throw ParseError("expected 'schemata <list>'", line_no);
      auto set = SchemaSet::from_string(toks[1].text);
      if (!set)
        throw ParseError("unknown schema list '" + std::string(toks[1].text) + "'",
                         line_no, toks[1].column);
      out.config.schemas = *set;
      schemata_seen = true;
      return;
    }
    if (directive == "sets") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::string_view t = toks[i].text;
        if (t == "vsets=on") out.config.value_sets = true;
        else if (t == "vsets=off") out.config.value_sets = false;
        else if (t == "psets=on") out.config.pair_sets = true;
        else if (t == "psets=off") out.config.pair_sets = false;
        else
          throw ParseError("unknown sets option '" + std::string(t) + "'", line_no,
                           toks[i].column);
      }
      sets_seen = true;
      return;
    }
    if (directive == "ppt") {
      close_point();
      if (toks.size() != 2) throw ParseError("expected 'ppt <label>'", line_no);
      std::string_view label = toks[1].text;
      std::size_t sep = label.find(":::");
      auto kind = sep == std::string_view::npos
                      ? std::nullopt
                      : ppt_kind_from_string(label.substr(sep + 3));
      if (sep == std::string_view::npos || !kind || !is_identifier(label.substr(0, sep)))
        throw ParseError("bad point label '" + std::string(label) + "'", line_no,
                         toks[1].column);
      if (by_label.contains(label))
        throw ParseError("duplicate point declaration " + std::string(label), line_no);
      by_label.emplace(std::string(label), out.table.points.size());
      out.table.points.push_back({std::string(label.substr(0, sep)), *kind, {}});
      open_point = out.table.points.size() - 1;
      open_point_line = line_no;
      return;
    }
    if (directive == "var") {
      if (!open_point) throw ParseError("'var' outside a ppt block", line_no);
      if (toks.size() != 3 || toks[2].text != "int")
        throw ParseError("expected 'var <name> int'", line_no);
      if (!is_identifier(toks[1].text))
        throw ParseError("bad variable name '" + std::string(toks[1].text) + "'",
                         line_no, toks[1].column);
      ProgramPoint& p = out.table.points[*open_point];
      if (p.find_var(toks[1].text))
        throw ParseError("duplicate variable '" + std::string(toks[1].text) + "'",
                         line_no, toks[1].column);
      p.decls.push_back({std::string(toks[1].text)});
      return;
    }
    if (directive == "obs" || directive == "inv" || directive == "vset" ||
        directive == "pset") {
      close_point();
      data_lines.emplace_back(line);
      data_line_nos.push_back(line_no);
      return;
    }
    throw ParseError("unknown directive '" + std::string(directive) + "'", line_no,
                     toks[0].column);
  });
  close_point();
  if (!head_seen) throw ParseError("missing 'spectrum' or 'model' header", 1);
  if (!schemata_seen) throw ParseError("missing 'schemata' line", 1);
  if (!sets_seen) throw ParseError("missing 'sets' line", 1);

  // sort the table, then attach data
  std::sort(out.table.points.begin(), out.table.points.end(), point_before);
  out.by_point.resize(out.table.points.size());
  for (std::size_t i = 0; i < out.table.points.size(); ++i) {
    const ProgramPoint& p = out.table.points[i];
    if (out.config.value_sets) out.by_point[i].vsets = make_value_sets(p);
    if (out.config.pair_sets) out.by_point[i].psets = make_pair_sets(p);
  }

  auto point_at = [&](const Token& tok, std::size_t line_no) -> std::size_t {
    auto idx = out.table.find_label(tok.text);
    if (!idx)
      throw ParseError("undeclared program point " + std::string(tok.text), line_no,
                       tok.column);
    return *idx;
  };
  auto var_at = [&](const ProgramPoint& p, const Token& tok,
                    std::size_t line_no) -> uint16_t {
    auto idx = p.find_var(tok.text);
    if (!idx)
      throw ParseError("unknown variable '" + std::string(tok.text) + "' at " +
                           p.label(),
                       line_no, tok.column);
    return static_cast<uint16_t>(*idx);
  };

  for (std::size_t li = 0; li < data_lines.size(); ++li) {
    const std::size_t line_no = data_line_nos[li];
    std::vector<Token> toks = split_tokens(data_lines[li]);
    std::string_view directive = toks[0].text;
    if (directive == "obs") {
      if (toks.size() != 3) throw ParseError("expected 'obs <ppt> <count>'", line_no);
      out.by_point[point_at(toks[1], line_no)].samples_seen = parse_u64(toks[2], line_no);
      continue;
    }
    if (toks.size() < 3) throw ParseError("truncated '" + std::string(directive) + "' line", line_no);
    const std::size_t pi = point_at(toks[1], line_no);
    const ProgramPoint& p = out.table.points[pi];
    PointSummary& ps = out.by_point[pi];
    if (directive == "inv") {
      auto kind = schema_from_name(toks[2].text);
      if (!kind)
        throw ParseError("unknown schema '" + std::string(toks[2].text) + "'", line_no,
                         toks[2].column);
      if (!out.config.schemas.contains(*kind))
        throw ParseError("invariant of disabled schema " +
                             std::string(schema_name(*kind)),
                         line_no);
      InvariantInstance inv;
      inv.kind = *kind;
      inv.status = InvStatus::Live;
      const bool pair = inv.is_pair();
      const bool has_const =
          *kind == SchemaKind::Sum || *kind == SchemaKind::ConstantEquality;
      const std::size_t want = 3 + (pair ? 2 : 1) + (has_const ? 1 : 0);
      if (toks.size() != want)
        throw ParseError("malformed 'inv' line for schema " +
                             std::string(schema_name(*kind)),
                         line_no);
      inv.slot_a = var_at(p, toks[3], line_no);
      if (pair) inv.slot_b = var_at(p, toks[4], line_no);
      if (pair && *kind != SchemaKind::LessThan &&
          !(p.decls[inv.slot_a].name < p.decls[inv.slot_b].name))
        throw ParseError("symmetric schema slots must be in ascending name order",
                         line_no);
      if (pair && *kind == SchemaKind::LessThan && inv.slot_a == inv.slot_b)
        throw ParseError("LessThan requires two distinct variables", line_no);
      if (has_const) inv.learned_const = parse_i64(toks[want - 1], line_no);
      ps.live.push_back(inv);
      continue;
    }
    if (directive == "vset") {
      if (!out.config.value_sets)
        throw ParseError("'vset' line but value sets are off", line_no);
      const uint16_t var = var_at(p, toks[2], line_no);
      for (std::size_t i = 3; i < toks.size(); ++i)
        ps.vsets[var].values.insert(parse_i64(toks[i], line_no));
      continue;
    }
    // pset
    if (!out.config.pair_sets)
      throw ParseError("'pset' line but pair sets are off", line_no);
    if (toks.size() < 4) throw ParseError("truncated 'pset' line", line_no);
    const uint16_t va = var_at(p, toks[2], line_no);
    const uint16_t vb = var_at(p, toks[3], line_no);
    if (!(p.decls[va].name < p.decls[vb].name))
      throw ParseError("pair set variables must be in ascending name order", line_no);
    PairValueSet* slot = nullptr;
    for (PairValueSet& cand : ps.psets)
      if (cand.var_a == va && cand.var_b == vb) slot = &cand;
    if (!slot) throw ParseError("no such variable pair at " + p.label(), line_no);
    for (std::size_t i = 4; i < toks.size(); ++i)
      slot->pairs.insert(parse_pair_token(toks[i], line_no));
  }

  for (std::size_t i = 0; i < out.table.points.size(); ++i) {
    const ProgramPoint& p = out.table.points[i];
    PointSummary& ps = out.by_point[i];
    std::sort(ps.live.begin(), ps.live.end(), InvariantOrder{&p});
    if (!ps.observed() && !ps.live.empty())
      throw ParseError("live invariants at unobserved point " + p.label(), 1);
  }
  out.config.validate();
  return out;
}

}  // namespace

std::string write_spectrum(const Spectrum& s) {
  std::string out = "spectrum " + s.run_id + "\n";
  write_summary_body(out, s.table, s.by_point, s.config);
  return out;
}

std::string write_model(const Model& m) {
  std::string out = "model " + std::to_string(m.runs_absorbed) + "\n";
  write_summary_body(out, m.table, m.by_point, m.config);
  return out;
}

Spectrum parse_spectrum(std::string_view text) {
  ParsedSummary p = parse_summary(text, /*expect_model=*/false);
  Spectrum s;
  s.run_id = std::move(p.run_id);
  s.config = p.config;
  s.table = std::move(p.table);
  s.by_point = std::move(p.by_point);
  return s;
}

Model parse_model(std::string_view text) {
  ParsedSummary p = parse_summary(text, /*expect_model=*/true);
  Model m;
  m.config = p.config;
  m.table = std::move(p.table);
  m.by_point = std::move(p.by_point);
  m.runs_absorbed = p.runs_absorbed;
  return m;
}

}  // namespace carrot
